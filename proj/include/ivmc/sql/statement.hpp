#pragma once

#include "ivmc/core/expression.hpp"
#include "ivmc/core/value.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ivmc {

struct TableRef {
	std::string name;
	std::string alias;

	/// Name the table's columns are qualified with.
	const std::string &qualifier() const {
		return alias.empty() ? name : alias;
	}
	friend bool operator==(const TableRef &, const TableRef &) = default;
};

enum class JoinType : std::uint8_t { INNER, LEFT };

struct JoinClause {
	JoinType type = JoinType::INNER;
	TableRef table;
	Expr condition;

	friend bool operator==(const JoinClause &, const JoinClause &) = default;
};

struct SelectItem {
	Expr expr;
	std::string alias;

	friend bool operator==(const SelectItem &, const SelectItem &) = default;
};

struct SelectCore {
	std::vector<SelectItem> items;
	TableRef from;
	std::optional<JoinClause> join;
	std::optional<Expr> where;
	std::vector<Expr> group_by;

	friend bool operator==(const SelectCore &, const SelectCore &) = default;
};

struct CommonTableExpr;

/// `[WITH ...] core [UNION ALL core]...`
struct SelectQuery {
	std::vector<CommonTableExpr> ctes;
	std::vector<SelectCore> cores;

	bool operator==(const SelectQuery &other) const;
};

struct CommonTableExpr {
	std::string name;
	SelectQuery query;

	friend bool operator==(const CommonTableExpr &, const CommonTableExpr &) = default;
};

inline bool SelectQuery::operator==(const SelectQuery &other) const {
	return ctes == other.ctes && cores == other.cores;
}

struct ColumnDef {
	std::string name;
	ScalarType type = ScalarType::NULL_TYPE;

	friend bool operator==(const ColumnDef &, const ColumnDef &) = default;
};

struct CreateTable {
	std::string name;
	std::vector<ColumnDef> columns;
	bool if_not_exists = false;

	friend bool operator==(const CreateTable &, const CreateTable &) = default;
};

struct CreateView {
	std::string name;
	SelectQuery query;
	bool materialized = false;

	friend bool operator==(const CreateView &, const CreateView &) = default;
};

struct CreateIndex {
	std::string name;
	std::string table;
	std::vector<std::string> columns;
	bool unique = false;

	friend bool operator==(const CreateIndex &, const CreateIndex &) = default;
};

struct SelectStatement {
	SelectQuery query;

	friend bool operator==(const SelectStatement &, const SelectStatement &) = default;
};

struct InsertValues {
	std::string table;
	std::vector<std::string> columns;
	std::vector<std::vector<Expr>> rows;

	friend bool operator==(const InsertValues &, const InsertValues &) = default;
};

enum class ConflictAction : std::uint8_t { NONE, REPLACE, UPDATE };

struct Assignment {
	std::string column;
	Expr value;

	friend bool operator==(const Assignment &, const Assignment &) = default;
};

/// INSERT ... SELECT, optionally as an upsert: `INSERT OR REPLACE INTO` (REPLACE) or
/// `ON CONFLICT (keys) DO UPDATE SET ...` (UPDATE).
struct InsertSelect {
	std::string table;
	std::vector<std::string> columns;
	SelectQuery query;
	ConflictAction conflict = ConflictAction::NONE;
	std::vector<std::string> conflict_keys;
	std::vector<Assignment> updates;

	friend bool operator==(const InsertSelect &, const InsertSelect &) = default;
};

struct DeleteStatement {
	std::string table;
	std::optional<Expr> where;

	friend bool operator==(const DeleteStatement &, const DeleteStatement &) = default;
};

using Statement = std::variant<CreateTable, CreateView, CreateIndex, SelectStatement, InsertValues, InsertSelect,
                               DeleteStatement>;

} // namespace ivmc
