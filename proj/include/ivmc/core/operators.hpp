#pragma once

#include "ivmc/core/evaluator.hpp"
#include "ivmc/core/zset.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ivmc {

struct ProjectItem {
	Expr expr;
	std::string name;

	friend bool operator==(const ProjectItem &, const ProjectItem &) = default;
};

struct JoinKey {
	ColumnRef left;
	ColumnRef right;

	friend bool operator==(const JoinKey &, const JoinKey &) = default;
};

struct AggregateSpec {
	AggregateKind kind = AggregateKind::SUM;
	/// Empty for COUNT(*).
	std::optional<ColumnRef> input;
	std::string output;

	friend bool operator==(const AggregateSpec &, const AggregateSpec &) = default;
};

/// Keeps entries whose tuple satisfies the predicate; flags pass through.
ZSetRelation eval_select(const Expr &predicate, const ZSetRelation &r);

/// Multiset projection: one output entry per input entry, flags pass through, no deduplication.
ZSetRelation eval_project(std::span<const ProjectItem> items, const ZSetRelation &r);

/// Equi-join with null-safe key equality. Output concatenates both sides; the flag is the product of
/// the input weights.
ZSetRelation eval_join(const ZSetRelation &l, const ZSetRelation &r, std::span<const JoinKey> keys);

/// Groups by (keys, flag); each group yields one entry carrying the group's flag. Output columns are
/// the keys followed by the aggregate outputs.
ZSetRelation eval_aggregate(std::span<const ColumnRef> group_keys, std::span<const AggregateSpec> aggs,
                            const ZSetRelation &r);

enum class EmptinessMode : std::uint8_t {
	/// A group is deleted once any maintained aggregate equals 0.
	PAPER,
	/// A hidden COUNT(*) decides whether a group is still populated.
	SOUND
};

/// How a delta view merges into its materialized view.
struct CombineSpec {
	enum class Kind : std::uint8_t { BAG, AGGREGATE_MERGE };

	Kind kind = Kind::BAG;
	/// Leading key columns of both V and the delta (AGGREGATE_MERGE only).
	std::size_t key_count = 0;
	/// Kinds of the trailing aggregate columns (AGGREGATE_MERGE only).
	std::vector<AggregateKind> aggregates;
	EmptinessMode emptiness = EmptinessMode::PAPER;
	/// Aggregate position of the hidden COUNT(*) consulted in SOUND mode.
	std::optional<std::size_t> liveness;

	friend bool operator==(const CombineSpec &, const CombineSpec &) = default;
};

/// Integrates a delta view into a view state. BAG: insertions are added, deletions removed
/// (NEGATIVE_STATE when absent). AGGREGATE_MERGE: per group, new = COALESCE(old, 0) + sum of signed
/// contributions, then empty groups are dropped per the emptiness mode.
ZSetRelation combine_view(const ZSetRelation &view, const ZSetRelation &delta, const CombineSpec &spec);

} // namespace ivmc
