#pragma once

#include <iosfwd>

namespace ivmc {

/// Exit statuses of the command-line tool.
enum ExitStatus : int {
	EXIT_OK = 0,
	/// SQL parse error, malformed changelog record, unknown view, verification mismatch.
	EXIT_FAILURE_STATUS = 1,
	/// Unsupported or invalid view (compile) and command-line usage errors.
	EXIT_UNSUPPORTED = 2,
	/// File system errors and resource exhaustion.
	EXIT_IO = 3
};

/// Runs the `ivmc` command line. Normal output goes to `out`; failures print one line
/// `error: <kind>: <detail>` to `err`.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ivmc
