#pragma once

#include "ivmc/core/error.hpp"
#include "ivmc/sql/statement.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ivmc {

/// A parsed statement together with the source slice it came from.
struct ScriptStatement {
	Statement statement;
	std::string text;
	SourcePosition position;
};

/// Parses `;`-separated statements. Syntax errors are ParseError(PARSE) listing the expected
/// tokens; constructs outside the supported subset are ParseError(UNSUPPORTED) naming the construct.
/// CREATE MATERIALIZED VIEW is not part of the core grammar: such statements are routed through
/// strip_materialized and come back as CreateView with `materialized` set.
std::vector<Statement> parse_statements(std::string_view text);
std::vector<ScriptStatement> parse_script(std::string_view text);

/// Parses exactly one SELECT query (optionally with CTEs and a trailing semicolon).
SelectQuery parse_query(std::string_view text);
Expr parse_expression(std::string_view text);

struct MaterializedViewText {
	std::string name;
	SelectQuery query;
};

/// Blanks the MATERIALIZED keyword of a `CREATE MATERIALIZED VIEW` statement and parses the rest as
/// an ordinary view definition. Raises ParseError when the text is not such a statement.
MaterializedViewText strip_materialized(std::string_view stmt_text);

} // namespace ivmc
