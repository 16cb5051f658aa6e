#pragma once

#include "ivmc/core/operators.hpp"
#include "ivmc/plan/plan.hpp"

#include <string>

namespace ivmc {

/// Hidden per-row (bag views) or per-group (sound aggregate views) count column.
inline constexpr const char *HIDDEN_COUNT_COLUMN = "_ivm_count";
inline constexpr const char *DEFAULT_MULT_COLUMN = "_ivm_multiplicity";

std::string delta_table_name(const std::string &table);

/// Schema a delta table must have: the base columns followed by a BOOLEAN multiplicity column.
Schema delta_table_schema(const Schema &base, const std::string &mult_column);

/// Answers for the wrapped provider and additionally synthesizes `delta_<t>` for every base table
/// the wrapped provider knows, for compiling without a live catalog.
class WithDeltaTables : public SchemaProvider {
public:
	WithDeltaTables(const SchemaProvider &inner, std::string mult_column)
	    : inner_(inner), mult_column_(std::move(mult_column)) {
	}
	std::optional<Schema> table_schema(const std::string &name) const override;

private:
	const SchemaProvider &inner_;
	std::string mult_column_;
};

/// Replaces every Scan(T) by Scan(delta_T) and threads the multiplicity column through all
/// ancestors: projections forward it, aggregations group by it (emitted last), joins multiply it
/// into a single unqualified column. Raises CATALOG when a delta table is missing.
PlanNode bind_deltas(const PlanNode &plan, const SchemaProvider &catalog, const std::string &mult_column);

struct IncrementalPlan {
	/// Delta-bound plan; for joins a UNION_ALL of the three join terms.
	PlanNode plan;
	CombineSpec combine;
	std::string mult_column;
	QueryClass query_class = QueryClass::PROJECTION_FILTER;
};

/// Rewrites a delta-bound plan into its incremental form. Filters and projections keep their shape;
/// aggregations stay grouped by (keys, multiplicity) and merge into the view; a join expands into
/// dA x B, A x dB and dA x dB over pre-refresh base states, with the operators above it repeated
/// on each term. In SOUND emptiness mode aggregations gain a hidden COUNT(*).
IncrementalPlan rewrite_incremental(const PlanNode &bound, EmptinessMode emptiness);

} // namespace ivmc
