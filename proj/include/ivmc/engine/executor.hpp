#pragma once

#include "ivmc/engine/database.hpp"
#include "ivmc/sql/statement.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivmc {

/// Bag of rows produced by a query; each distinct row may carry several copies.
struct ResultSet {
	Schema schema;
	std::vector<std::pair<Tuple, std::int64_t>> rows;

	std::int64_t row_count() const;
	ZSetRelation to_relation() const;
};

struct ExecResult {
	std::optional<ResultSet> result;
	/// Row copies inserted, replaced, updated or deleted.
	std::int64_t affected = 0;
};

/// Runs parsed statements against a Database. Each statement is atomic: outside a transaction it
/// runs in its own, inside one it rolls back to its starting point on failure.
class Executor {
public:
	explicit Executor(Database &db) : db_(db) {
	}

	/// Makes reads of `name` see `rows` instead of the stored table.
	void set_read_override(const std::string &name, ResultSet rows);
	void clear_read_overrides() {
		overrides_.clear();
	}

	ExecResult execute(const Statement &stmt);
	ResultSet query(const SelectQuery &query);

private:
	struct Scope;

	ExecResult run(const Statement &stmt);
	ResultSet eval_query(const SelectQuery &query, const Scope *outer);
	ResultSet eval_core(const SelectCore &core, const Scope &scope);
	std::int64_t insert_rows(const std::string &table, const std::vector<std::string> &columns, const ResultSet &rows,
	                         const InsertSelect *conflict);
	std::int64_t delete_rows(const DeleteStatement &del);

	Database &db_;
	std::map<std::string, ResultSet> overrides_;
};

} // namespace ivmc
