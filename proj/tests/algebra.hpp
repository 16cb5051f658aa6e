#pragma once

#include "support.hpp"

#include "ivmc/core/operators.hpp"

#include <functional>

/// Exhaustive checks of the Z-set operator laws over a four-tuple domain. Each returns the number of
/// instances checked and appends a description of every violation to `failures`.
namespace ivmc::algebra {

using Weights = std::map<Tuple, std::int64_t>;

/// Every multiset of at most `max_size` entries drawn from `items`.
inline std::vector<std::vector<ZSetEntry>> multisets(const std::vector<ZSetEntry> &items, std::size_t max_size) {
	std::vector<std::vector<ZSetEntry>> out {{}};
	std::vector<std::vector<std::size_t>> frontier {{}};
	for (std::size_t size = 1; size <= max_size; ++size) {
		std::vector<std::vector<std::size_t>> next;
		for (const auto &combo : frontier) {
			for (std::size_t i = combo.empty() ? 0 : combo.back(); i < items.size(); ++i) {
				auto c = combo;
				c.push_back(i);
				std::vector<ZSetEntry> entries;
				for (auto k : c) {
					entries.push_back(items[k]);
				}
				out.push_back(std::move(entries));
				next.push_back(std::move(c));
			}
		}
		frontier = std::move(next);
	}
	return out;
}

inline ZSetRelation make(const Schema &s, const std::vector<ZSetEntry> &entries) {
	ZSetRelation r(s);
	for (const auto &e : entries) {
		r.add(e.tuple, e.mult);
	}
	return r;
}

inline std::vector<ZSetEntry> domain(bool with_deletions) {
	std::vector<ZSetEntry> out;
	for (const char *k : {"a", "b"}) {
		for (int v : {1, 2}) {
			out.push_back({{k, v}, Multiplicity::insertion()});
			if (with_deletions) {
				out.push_back({{k, v}, Multiplicity::deletion()});
			}
		}
	}
	return out;
}

inline Schema left_schema() {
	return test::make_schema("l", {{"k", ScalarType::TEXT}, {"v", ScalarType::INTEGER}});
}

inline Schema right_schema() {
	return test::make_schema("r", {{"k", ScalarType::TEXT}, {"w", ScalarType::INTEGER}});
}

inline std::vector<JoinKey> join_keys() {
	return {{{"l", "k"}, {"r", "k"}}};
}

/// Brute-force signed-weight join on the first column.
inline Weights join_oracle(const Weights &a, const Weights &b) {
	Weights out;
	for (const auto &[ta, wa] : a) {
		for (const auto &[tb, wb] : b) {
			if (ta[0] == tb[0]) {
				Tuple t = ta;
				t.insert(t.end(), tb.begin(), tb.end());
				out[t] += wa * wb;
			}
		}
	}
	std::erase_if(out, [](const auto &kv) { return kv.second == 0; });
	return out;
}

inline Weights add_weights(Weights a, const Weights &b) {
	for (const auto &[t, w] : b) {
		a[t] += w;
	}
	std::erase_if(a, [](const auto &kv) { return kv.second == 0; });
	return a;
}

/// integrate(A, differentiate(A, B)) == B for table states of up to six rows.
inline std::size_t inverse_law(std::vector<std::string> &failures) {
	auto states = multisets(domain(false), 6);
	Schema s = left_schema();
	std::size_t checked = 0;
	for (const auto &ma : states) {
		auto a = make(s, ma);
		for (const auto &mb : states) {
			auto b = make(s, mb);
			if (normalize(integrate(a, differentiate(a, b))) != normalize(b)) {
				failures.push_back("inverse law: " + a.to_string() + " -> " + b.to_string());
			}
			++checked;
		}
	}
	return checked;
}

/// op(a + b) == op(a) + op(b) for select and project, relations of up to three entries each.
inline std::size_t linearity(std::vector<std::string> &failures) {
	auto rels = multisets(domain(true), 3);
	Schema s = left_schema();
	Expr pred = Expr::binary(ExprOp::GT, Expr::column("", "v"), Expr::literal(Value(1)));
	std::vector<ProjectItem> items {{Expr::column("", "k"), "k"},
	                                {Expr::binary(ExprOp::MUL, Expr::column("", "v"), Expr::literal(Value(3))), "v3"}};
	std::size_t checked = 0;
	for (const auto &ma : rels) {
		auto a = make(s, ma);
		for (const auto &mb : rels) {
			auto b = make(s, mb);
			auto sum = zset_add(a, b);
			if (signed_weights(eval_select(pred, sum)) !=
			    signed_weights(zset_add(eval_select(pred, a), eval_select(pred, b)))) {
				failures.push_back("select linearity: " + a.to_string() + " + " + b.to_string());
			}
			if (signed_weights(eval_project(items, sum)) !=
			    signed_weights(zset_add(eval_project(items, a), eval_project(items, b)))) {
				failures.push_back("project linearity: " + a.to_string() + " + " + b.to_string());
			}
			++checked;
		}
	}
	return checked;
}

/// Join agrees with the weight oracle (up to three entries per side) and distributes over addition in
/// each argument (up to two entries per relation).
inline std::size_t bilinearity(std::vector<std::string> &failures) {
	Schema l = left_schema();
	Schema r = right_schema();
	auto keys = join_keys();
	std::size_t checked = 0;
	auto rels = multisets(domain(true), 3);
	for (const auto &ma : rels) {
		auto a = make(l, ma);
		for (const auto &mb : rels) {
			auto b = make(r, mb);
			if (signed_weights(eval_join(a, b, keys)) != join_oracle(signed_weights(a), signed_weights(b))) {
				failures.push_back("join oracle: " + a.to_string() + " x " + b.to_string());
			}
			++checked;
		}
	}
	auto small = multisets(domain(true), 2);
	for (const auto &ma : small) {
		for (const auto &mb : small) {
			auto al = make(l, ma);
			auto bl = make(l, mb);
			auto ar = make(r, ma);
			auto br = make(r, mb);
			for (const auto &mc : small) {
				auto cl = make(l, mc);
				auto cr = make(r, mc);
				if (signed_weights(eval_join(zset_add(al, bl), cr, keys)) !=
				    add_weights(signed_weights(eval_join(al, cr, keys)), signed_weights(eval_join(bl, cr, keys)))) {
					failures.push_back("left bilinearity: " + al.to_string() + " + " + bl.to_string());
				}
				if (signed_weights(eval_join(cl, zset_add(ar, br), keys)) !=
				    add_weights(signed_weights(eval_join(cl, ar, keys)), signed_weights(eval_join(cl, br, keys)))) {
					failures.push_back("right bilinearity: " + ar.to_string() + " + " + br.to_string());
				}
				++checked;
			}
		}
	}
	return checked;
}

/// The flag of every join output entry is the product of its inputs' flags.
inline std::size_t sign_rule(std::vector<std::string> &failures) {
	std::size_t checked = 0;
	auto keys = join_keys();
	for (const auto &x : domain(true)) {
		for (const auto &y : domain(true)) {
			auto out = eval_join(make(left_schema(), {x}), make(right_schema(), {y}), keys);
			bool match = x.tuple[0] == y.tuple[0];
			bool ok = match ? out.size() == 1 &&
			                      mult_weight(out.entries()[0].mult) == mult_weight(x.mult) * mult_weight(y.mult)
			                : out.empty();
			if (!ok) {
				failures.push_back("sign rule: " + tuple_to_string(x.tuple) + " x " + tuple_to_string(y.tuple));
			}
			++checked;
		}
	}
	return checked;
}

/// combine_view(Q(T), Q(dT)) == Q(T + dT) for a grouped SUM and COUNT over states of up to four rows
/// and valid deltas of up to three entries.
inline std::size_t incremental_aggregate(std::vector<std::string> &failures) {
	Schema s = left_schema();
	std::vector<ColumnRef> keys {{"", "k"}};
	std::vector<AggregateSpec> aggs {{AggregateKind::SUM, ColumnRef {"", "v"}, "total"},
	                                 {AggregateKind::COUNT, std::nullopt, "n"}};
	CombineSpec spec;
	spec.kind = CombineSpec::Kind::AGGREGATE_MERGE;
	spec.key_count = 1;
	spec.aggregates = {AggregateKind::SUM, AggregateKind::COUNT};
	std::size_t checked = 0;
	auto deltas = multisets(domain(true), 3);
	for (const auto &ms : multisets(domain(false), 4)) {
		auto t = make(s, ms);
		auto view = eval_aggregate(keys, aggs, t);
		auto stored = signed_weights(t);
		for (const auto &md : deltas) {
			auto d = make(s, md);
			bool valid = true;
			for (const auto &[tuple, w] : signed_weights(d)) {
				auto it = stored.find(tuple);
				valid = valid && (it == stored.end() ? 0 : it->second) + w >= 0;
			}
			if (!valid) {
				continue;
			}
			auto incremental = combine_view(view, eval_aggregate(keys, aggs, d), spec);
			auto full = eval_aggregate(keys, aggs, integrate(t, d));
			if (normalize(incremental) != normalize(full)) {
				failures.push_back("incremental aggregate: " + t.to_string() + " + " + d.to_string());
			}
			++checked;
		}
	}
	return checked;
}

} // namespace ivmc::algebra
