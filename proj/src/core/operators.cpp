#include "ivmc/core/operators.hpp"

#include "ivmc/core/error.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace ivmc {

ZSetRelation eval_select(const Expr &predicate, const ZSetRelation &r) {
	ExpressionBinder binder(r.schema());
	auto bound = binder.bind(predicate);
	if (bound.type != ScalarType::BOOLEAN && bound.type != ScalarType::NULL_TYPE) {
		throw Error(ErrorKind::TYPE, "filter predicate must be BOOLEAN");
	}
	ZSetRelation out(r.schema());
	for (const auto &e : r.entries()) {
		if (is_true(evaluate(bound, e.tuple))) {
			out.add(e.tuple, e.mult);
		}
	}
	return out;
}

ZSetRelation eval_project(std::span<const ProjectItem> items, const ZSetRelation &r) {
	ExpressionBinder binder(r.schema());
	std::vector<BoundExpr> bound;
	Schema schema;
	schema.name = r.schema().name;
	for (const auto &item : items) {
		bound.push_back(binder.bind(item.expr));
		schema.columns.push_back({item.name, bound.back().type, ""});
	}
	ZSetRelation out(schema);
	out.reserve(r.size());
	for (const auto &e : r.entries()) {
		Tuple t;
		t.reserve(bound.size());
		for (std::size_t i = 0; i < bound.size(); ++i) {
			t.push_back(coerce(evaluate(bound[i], e.tuple), schema.columns[i].type));
		}
		out.add(std::move(t), e.mult);
	}
	return out;
}

ZSetRelation eval_join(const ZSetRelation &l, const ZSetRelation &r, std::span<const JoinKey> keys) {
	std::vector<std::size_t> left_idx;
	std::vector<std::size_t> right_idx;
	for (const auto &k : keys) {
		left_idx.push_back(l.schema().resolve(k.left));
		right_idx.push_back(r.schema().resolve(k.right));
		auto lt = l.schema().columns[left_idx.back()].type;
		auto rt = r.schema().columns[right_idx.back()].type;
		if (lt != rt && !(is_numeric(lt) && is_numeric(rt))) {
			throw Error(ErrorKind::TYPE, "join key " + k.left.to_string() + " = " + k.right.to_string() +
			                                 " compares incompatible types");
		}
	}
	Schema schema;
	schema.columns = l.schema().columns;
	schema.columns.insert(schema.columns.end(), r.schema().columns.begin(), r.schema().columns.end());

	std::unordered_multimap<Tuple, std::size_t, TupleHash> build;
	for (std::size_t i = 0; i < r.entries().size(); ++i) {
		Tuple key;
		for (auto idx : right_idx) {
			key.push_back(r.entries()[i].tuple[idx]);
		}
		build.emplace(std::move(key), i);
	}
	ZSetRelation out(schema);
	for (const auto &le : l.entries()) {
		Tuple key;
		for (auto idx : left_idx) {
			key.push_back(le.tuple[idx]);
		}
		auto [begin, end] = build.equal_range(key);
		std::vector<std::size_t> matches;
		for (auto it = begin; it != end; ++it) {
			matches.push_back(it->second);
		}
		// equal_range order is unspecified; keep build order for determinism
		std::sort(matches.begin(), matches.end());
		for (auto m : matches) {
			const auto &re = r.entries()[m];
			Tuple t = le.tuple;
			t.insert(t.end(), re.tuple.begin(), re.tuple.end());
			out.add(std::move(t), Multiplicity {le.mult.flag == re.mult.flag});
		}
	}
	return out;
}

ZSetRelation eval_aggregate(std::span<const ColumnRef> group_keys, std::span<const AggregateSpec> aggs,
                            const ZSetRelation &r) {
	if (group_keys.empty() && aggs.empty()) {
		throw Error(ErrorKind::BINDER, "aggregate needs group keys or aggregate functions");
	}
	const auto &in = r.schema();
	std::vector<std::size_t> key_idx;
	Schema schema;
	for (const auto &k : group_keys) {
		key_idx.push_back(in.resolve(k));
		schema.columns.push_back({k.name, in.columns[key_idx.back()].type, ""});
	}
	std::vector<std::optional<std::size_t>> agg_idx;
	for (const auto &a : aggs) {
		if (a.input) {
			agg_idx.push_back(in.resolve(*a.input));
			auto t = in.columns[*agg_idx.back()].type;
			if (a.kind == AggregateKind::SUM && !is_numeric(t)) {
				throw Error(ErrorKind::TYPE, "SUM over non-numeric column " + a.input->to_string());
			}
			schema.columns.push_back(
			    {a.output, a.kind == AggregateKind::SUM ? t : ScalarType::INTEGER, ""});
		} else {
			if (a.kind == AggregateKind::SUM) {
				throw Error(ErrorKind::BINDER, "SUM requires an input column");
			}
			agg_idx.push_back(std::nullopt);
			schema.columns.push_back({a.output, ScalarType::INTEGER, ""});
		}
	}

	// (keys, flag) -> accumulators; std::map keeps the output order canonical.
	std::map<std::pair<Tuple, Multiplicity>, std::vector<AggregateAccumulator>> groups;
	for (const auto &e : r.entries()) {
		Tuple key;
		for (auto idx : key_idx) {
			key.push_back(e.tuple[idx]);
		}
		auto [it, inserted] = groups.try_emplace({std::move(key), e.mult});
		if (inserted) {
			for (std::size_t i = 0; i < aggs.size(); ++i) {
				it->second.emplace_back(aggs[i].kind, !agg_idx[i].has_value());
			}
		}
		for (std::size_t i = 0; i < aggs.size(); ++i) {
			it->second[i].add(agg_idx[i] ? e.tuple[*agg_idx[i]] : Value::null());
		}
	}
	ZSetRelation out(schema);
	for (const auto &[group, accs] : groups) {
		Tuple t = group.first;
		for (const auto &acc : accs) {
			t.push_back(acc.result());
		}
		out.add(std::move(t), group.second);
	}
	return out;
}

namespace {

ZSetRelation combine_bag(const ZSetRelation &view, const ZSetRelation &delta) {
	auto weights = signed_weights(view);
	for (const auto &e : delta.entries()) {
		weights[e.tuple] += mult_weight(e.mult);
	}
	for (const auto &[tuple, w] : weights) {
		if (w < 0) {
			throw Error(ErrorKind::NEGATIVE_STATE, "deletion of absent view tuple " + tuple_to_string(tuple));
		}
	}
	return from_weights(view.schema(), weights);
}

ZSetRelation combine_aggregates(const ZSetRelation &view, const ZSetRelation &delta, const CombineSpec &spec) {
	std::size_t width = spec.key_count + spec.aggregates.size();
	if (view.schema().size() != width || delta.schema().size() != width) {
		throw Error(ErrorKind::SCHEMA_MISMATCH, "combine_view: view and delta must have " + std::to_string(width) +
		                                            " columns (keys then aggregates)");
	}
	auto key_of = [&](const Tuple &t) { return Tuple(t.begin(), t.begin() + spec.key_count); };

	std::map<Tuple, Tuple> state;
	for (const auto &e : view.entries()) {
		if (!e.mult.flag) {
			throw Error(ErrorKind::NEGATIVE_STATE, "view state contains a deletion entry");
		}
		Tuple key = key_of(e.tuple);
		if (!state.emplace(key, Tuple(e.tuple.begin() + spec.key_count, e.tuple.end())).second) {
			throw Error(ErrorKind::CONSTRAINT, "duplicate view group " + tuple_to_string(key));
		}
	}

	// Signed per-group contributions, mirroring SUM(CASE WHEN flag = FALSE THEN -x ELSE x END).
	std::map<Tuple, std::vector<AggregateAccumulator>> contributions;
	for (const auto &e : delta.entries()) {
		auto [it, inserted] = contributions.try_emplace(key_of(e.tuple));
		if (inserted) {
			it->second.assign(spec.aggregates.size(), AggregateAccumulator(AggregateKind::SUM));
		}
		for (std::size_t i = 0; i < spec.aggregates.size(); ++i) {
			const auto &v = e.tuple[spec.key_count + i];
			it->second[i].add(e.mult.flag ? v : negate(v));
		}
	}
	for (const auto &[key, accs] : contributions) {
		auto existing = state.find(key);
		Tuple merged;
		for (std::size_t i = 0; i < accs.size(); ++i) {
			Value old = existing != state.end() ? existing->second[i] : Value::null();
			Value base = old.is_null() ? Value(std::int64_t {0}) : old;
			auto type = view.schema().columns[spec.key_count + i].type;
			merged.push_back(coerce(add(base, accs[i].result()), type));
		}
		state[key] = std::move(merged);
	}

	ZSetRelation out(view.schema());
	for (const auto &[key, aggs] : state) {
		bool live = true;
		if (spec.emptiness == EmptinessMode::SOUND && spec.liveness) {
			const auto &count = aggs[*spec.liveness];
			live = !(count == Value(std::int64_t {0}));
		} else {
			for (const auto &v : aggs) {
				if (v == Value(std::int64_t {0})) {
					live = false;
				}
			}
		}
		if (!live) {
			continue;
		}
		Tuple t = key;
		t.insert(t.end(), aggs.begin(), aggs.end());
		out.add(std::move(t));
	}
	return out;
}

} // namespace

ZSetRelation combine_view(const ZSetRelation &view, const ZSetRelation &delta, const CombineSpec &spec) {
	if (!view.is_table_state()) {
		throw Error(ErrorKind::NEGATIVE_STATE, "view state contains a deletion entry");
	}
	if (spec.kind == CombineSpec::Kind::BAG) {
		view.schema().check_compatible(delta.schema());
		return combine_bag(view, delta);
	}
	return combine_aggregates(view, delta, spec);
}

} // namespace ivmc
