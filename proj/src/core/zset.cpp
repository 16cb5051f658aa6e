#include "ivmc/core/zset.hpp"

#include "ivmc/core/error.hpp"

namespace ivmc {

void ZSetRelation::add(Tuple tuple, Multiplicity mult) {
	check_tuple(schema_, tuple);
	entries_.push_back({std::move(tuple), mult});
}

void ZSetRelation::add_copies(const Tuple &tuple, Multiplicity mult, std::int64_t copies) {
	check_tuple(schema_, tuple);
	for (std::int64_t i = 0; i < copies; ++i) {
		entries_.push_back({tuple, mult});
	}
}

bool ZSetRelation::is_table_state() const {
	for (const auto &e : entries_) {
		if (!e.mult.flag) {
			return false;
		}
	}
	return true;
}

std::string ZSetRelation::to_string() const {
	std::string out = "{";
	for (std::size_t i = 0; i < entries_.size(); ++i) {
		if (i > 0) {
			out += ", ";
		}
		out += tuple_to_string(entries_[i].tuple);
		out += entries_[i].mult.flag ? "+" : "-";
	}
	return out + "}";
}

std::map<Tuple, std::int64_t> signed_weights(const ZSetRelation &r) {
	std::map<Tuple, std::int64_t> weights;
	for (const auto &e : r.entries()) {
		weights[e.tuple] += mult_weight(e.mult);
	}
	std::erase_if(weights, [](const auto &kv) { return kv.second == 0; });
	return weights;
}

ZSetRelation from_weights(const Schema &schema, const std::map<Tuple, std::int64_t> &weights) {
	ZSetRelation out(schema);
	for (const auto &[tuple, w] : weights) {
		if (w != 0) {
			out.add_copies(tuple, Multiplicity {w > 0}, w > 0 ? w : -w);
		}
	}
	return out;
}

ZSetRelation normalize(const ZSetRelation &r) {
	return from_weights(r.schema(), signed_weights(r));
}

ZSetRelation zset_add(const ZSetRelation &a, const ZSetRelation &b) {
	a.schema().check_compatible(b.schema());
	auto weights = signed_weights(a);
	for (const auto &e : b.entries()) {
		weights[e.tuple] += mult_weight(e.mult);
	}
	return from_weights(a.schema(), weights);
}

ZSetRelation differentiate(const ZSetRelation &old_state, const ZSetRelation &new_state) {
	old_state.schema().check_compatible(new_state.schema());
	auto weights = signed_weights(new_state);
	for (const auto &e : old_state.entries()) {
		weights[e.tuple] -= mult_weight(e.mult);
	}
	return from_weights(old_state.schema(), weights);
}

ZSetRelation integrate(const ZSetRelation &state, const ZSetRelation &delta) {
	auto result = zset_add(state, delta);
	for (const auto &e : result.entries()) {
		if (!e.mult.flag) {
			throw Error(ErrorKind::NEGATIVE_STATE,
			            "deletion of absent tuple " + tuple_to_string(e.tuple) + " from " + state.schema().name);
		}
	}
	return result;
}

} // namespace ivmc
