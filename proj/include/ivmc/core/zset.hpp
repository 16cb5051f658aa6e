#pragma once

#include "ivmc/core/schema.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ivmc {

/// Boolean Z-set weight: true is an insertion (+1), false a deletion (-1). A tuple with weight N is
/// carried as N copies.
struct Multiplicity {
	bool flag = true;

	static constexpr Multiplicity insertion() {
		return {true};
	}
	static constexpr Multiplicity deletion() {
		return {false};
	}

	friend bool operator==(const Multiplicity &, const Multiplicity &) = default;
	friend auto operator<=>(const Multiplicity &, const Multiplicity &) = default;
};

constexpr int mult_weight(Multiplicity m) {
	return m.flag ? 1 : -1;
}

struct ZSetEntry {
	Tuple tuple;
	Multiplicity mult;

	friend bool operator==(const ZSetEntry &, const ZSetEntry &) = default;
};

class ZSetRelation {
public:
	ZSetRelation() = default;
	explicit ZSetRelation(Schema schema) : schema_(std::move(schema)) {
	}

	const Schema &schema() const {
		return schema_;
	}
	const std::vector<ZSetEntry> &entries() const {
		return entries_;
	}
	std::size_t size() const {
		return entries_.size();
	}
	bool empty() const {
		return entries_.empty();
	}

	/// Appends one entry after checking it against the schema.
	void add(Tuple tuple, Multiplicity mult = Multiplicity::insertion());
	/// Appends `copies` identical entries.
	void add_copies(const Tuple &tuple, Multiplicity mult, std::int64_t copies);
	void reserve(std::size_t n) {
		entries_.reserve(n);
	}

	/// True when every entry carries an insertion flag.
	bool is_table_state() const;

	std::string to_string() const;

	friend bool operator==(const ZSetRelation &a, const ZSetRelation &b) {
		return a.entries_ == b.entries_ && a.schema_.compatible_with(b.schema_);
	}

private:
	Schema schema_;
	std::vector<ZSetEntry> entries_;
};

/// Signed weight per distinct tuple; zero weights are dropped.
std::map<Tuple, std::int64_t> signed_weights(const ZSetRelation &r);

/// Builds the canonical relation for a weight map: |w| copies with the sign's flag, sorted by tuple.
ZSetRelation from_weights(const Schema &schema, const std::map<Tuple, std::int64_t> &weights);

/// Cancels opposite-flag copies of the same tuple and sorts by (tuple, flag).
ZSetRelation normalize(const ZSetRelation &r);

/// Per-tuple weight addition; raises SCHEMA_MISMATCH for incompatible schemas.
ZSetRelation zset_add(const ZSetRelation &a, const ZSetRelation &b);

/// Returns the delta such that zset_add(old_state, delta) == new_state.
ZSetRelation differentiate(const ZSetRelation &old_state, const ZSetRelation &new_state);

/// Applies a delta to a table state; raises NEGATIVE_STATE when a deletion has no stored tuple.
ZSetRelation integrate(const ZSetRelation &state, const ZSetRelation &delta);

} // namespace ivmc
