#pragma once

#include "ivmc/core/operators.hpp"
#include "ivmc/core/schema.hpp"
#include "ivmc/core/zset.hpp"
#include "ivmc/sql/statement.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivmc {

enum class PlanKind : std::uint8_t { SCAN, FILTER, PROJECT, AGGREGATE, JOIN, UNION_ALL };

/// Where a join's output multiplicity comes from once its inputs carry one.
enum class JoinMultiplicity : std::uint8_t {
	/// Plain join of base states.
	NONE,
	/// Delta on the left, base state on the right.
	LEFT,
	/// Base state on the left, delta on the right.
	RIGHT,
	/// Deltas on both sides: the flags multiply.
	PRODUCT
};

/// Logical operator tree. One flat node type keeps the tree a plain value (copyable, comparable).
///
/// Output columns of scans and joins carry their table qualifier; project and aggregate outputs are
/// unqualified. All expressions and column references inside a planned tree are fully qualified.
struct PlanNode {
	PlanKind kind = PlanKind::SCAN;
	Schema output;
	std::vector<PlanNode> children;

	// SCAN: physical table read, the qualifier its columns carry, and the base table it stands for.
	std::string table;
	std::string alias;
	std::string base_table;
	bool delta = false;

	// FILTER
	Expr predicate;

	// PROJECT
	std::vector<ProjectItem> items;

	// AGGREGATE: output columns are the keys (named by key_names) followed by the aggregates.
	std::vector<ColumnRef> group_keys;
	std::vector<std::string> key_names;
	std::vector<AggregateSpec> aggregates;

	// JOIN
	std::vector<JoinKey> join_keys;
	JoinMultiplicity join_mult = JoinMultiplicity::NONE;

	const PlanNode &child() const {
		return children.at(0);
	}

	static PlanNode scan(std::string table, std::string alias, Schema table_schema);

	friend bool operator==(const PlanNode &, const PlanNode &) = default;
};

enum class QueryClass : std::uint8_t { PROJECTION_FILTER, GROUP_AGGREGATE, JOIN, JOIN_AGGREGATE };

const char *query_class_name(QueryClass c);
QueryClass parse_query_class(const std::string &name);

inline bool is_aggregate_class(QueryClass c) {
	return c == QueryClass::GROUP_AGGREGATE || c == QueryClass::JOIN_AGGREGATE;
}

/// Read access to table schemas during planning.
class SchemaProvider {
public:
	virtual ~SchemaProvider() = default;
	virtual std::optional<Schema> table_schema(const std::string &name) const = 0;
};

class MapSchemaProvider : public SchemaProvider {
public:
	MapSchemaProvider() = default;
	explicit MapSchemaProvider(std::map<std::string, Schema> tables) : tables_(std::move(tables)) {
	}

	void add(Schema schema) {
		tables_[schema.name] = std::move(schema);
	}
	std::optional<Schema> table_schema(const std::string &name) const override;

private:
	std::map<std::string, Schema> tables_;
};

/// Schemas of every CREATE TABLE in a script (other statements are ignored).
MapSchemaProvider schemas_from_statements(const std::vector<Statement> &stmts);

/// Resolves a view query into the canonical shape Scan|Join -> [Filter] -> Project|Aggregate.
/// Raises BINDER for unknown tables/columns and aggregate misuse, TYPE for ill-typed expressions
/// and UNSUPPORTED for constructs outside the maintainable subset.
PlanNode plan_select(const SelectQuery &query, const SchemaProvider &catalog);

/// Tags a planned (or incrementally rewritten) tree; UNSUPPORTED for any other shape.
QueryClass classify(const PlanNode &plan);

/// Base tables read by the plan, in scan order, without duplicates.
std::vector<std::string> scanned_tables(const PlanNode &plan);

/// Stable indented text form, one node per line.
std::string serialize_plan(const PlanNode &plan);

/// Lowers a non-incremental plan back into a query over its tables.
SelectQuery plan_to_query(const PlanNode &plan);

/// Physical table contents by name.
using TableSource = std::function<ZSetRelation(const std::string &table)>;

/// Runs a plan with the relational-core operators. When `mult_column` is set, delta scans read it
/// from the stored rows into entry flags and every reference to it is carried implicitly by those
/// flags, so results are flagged relations without the column.
ZSetRelation evaluate_plan(const PlanNode &plan, const TableSource &source, const std::string &mult_column = "");

} // namespace ivmc
