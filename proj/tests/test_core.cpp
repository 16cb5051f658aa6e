#include "support.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/core/operators.hpp"

#include <doctest.h>

using namespace ivmc;
using ivmc::test::make_schema;
using ivmc::test::rel;

namespace {

Schema kv() {
	return make_schema("t", {{"k", ScalarType::TEXT}, {"v", ScalarType::INTEGER}});
}

ErrorKind kind_of(const std::function<void()> &f) {
	try {
		f();
	} catch (const Error &e) {
		return e.kind();
	}
	FAIL("no error raised");
	return ErrorKind::INTERNAL;
}

} // namespace

TEST_CASE("value ordering and null-safe equality") {
	CHECK(Value() == Value());
	CHECK(Value(2) == Value(Decimal::from_integer(2)));
	CHECK(Value() < Value(false));
	CHECK(Value(true) < Value(0));
	CHECK(Value(5) < Value("a"));
	CHECK(Decimal::parse("1.25").to_string() == "1.25");
	CHECK(kind_of([] { Decimal::parse("0.0000000001"); }) == ErrorKind::TYPE);
}

TEST_CASE("arithmetic") {
	CHECK(add(Value(2), Value(3)) == Value(5));
	CHECK(add(Value(), Value(3)).is_null());
	CHECK(add(Value(1), Value(Decimal::parse("0.5"))) == Value(Decimal::parse("1.5")));
	CHECK(negate(Value(4)) == Value(-4));
	CHECK(kind_of([] { add(Value(INT64_MAX), Value(1)); }) == ErrorKind::OVERFLOW);
	CHECK(coerce(Value(3), ScalarType::DECIMAL) == Value(Decimal::from_integer(3)));
	CHECK(kind_of([] { coerce(Value("x"), ScalarType::INTEGER); }) == ErrorKind::TYPE);
}

TEST_CASE("tuples are checked against the schema") {
	ZSetRelation r(kv());
	CHECK(kind_of([&] { r.add({Value("a")}); }) == ErrorKind::TYPE);
	CHECK(kind_of([&] { r.add({Value(1), Value(1)}); }) == ErrorKind::TYPE);
	r.add({Value(), Value(1)});
	CHECK(r.size() == 1);
}

TEST_CASE("normalize cancels opposite flags and sorts") {
	auto r = rel(kv(), {{{"b", 1}, 1}, {{"a", 1}, 1}, {{"b", 1}, -1}, {{"a", 2}, -1}});
	auto n = normalize(r);
	CHECK(n == rel(kv(), {{{"a", 1}, 1}, {{"a", 2}, -1}}));
	CHECK(normalize(n) == n);
}

TEST_CASE("differentiate and integrate") {
	auto a = rel(kv(), {{{"x", 1}, 1}, {{"y", 2}, 1}});
	auto b = rel(kv(), {{{"y", 2}, 1}, {{"z", 3}, 1}, {{"z", 3}, 1}});
	auto d = differentiate(a, b);
	CHECK(signed_weights(d) == std::map<Tuple, std::int64_t> {{{"x", 1}, -1}, {{"z", 3}, 2}});
	CHECK(normalize(integrate(a, d)) == normalize(b));
	CHECK(integrate(rel(kv(), {{{"x", 1}, 1}}), rel(kv(), {{{"x", 1}, -1}})).empty());
	CHECK(kind_of([] { integrate(rel(kv(), {}), rel(kv(), {{{"x", 1}, -1}})); }) == ErrorKind::NEGATIVE_STATE);
}

TEST_CASE("zset_add rejects incompatible schemas") {
	auto other = make_schema("u", {{"k", ScalarType::TEXT}});
	CHECK(kind_of([&] { zset_add(rel(kv(), {}), rel(other, {})); }) == ErrorKind::SCHEMA_MISMATCH);
}

TEST_CASE("select keeps flags") {
	auto r = rel(kv(), {{{"a", 1}, 1}, {{"b", 3}, -1}});
	Expr gt = Expr::binary(ExprOp::GT, Expr::column("", "v"), Expr::literal(Value(2)));
	CHECK(eval_select(gt, r) == rel(kv(), {{{"b", 3}, -1}}));
	CHECK(eval_select(Expr::literal(Value(true)), r) == r);
	CHECK(eval_select(gt, rel(kv(), {})).empty());
	Expr bad = Expr::binary(ExprOp::GT, Expr::column("", "nope"), Expr::literal(Value(2)));
	CHECK(kind_of([&] { eval_select(bad, r); }) == ErrorKind::BINDER);
}

TEST_CASE("project is a multiset projection") {
	auto r = rel(kv(), {{{"a", 1}, 1}, {{"a", 2}, 1}, {{"c", 2}, -1}});
	std::vector<ProjectItem> items {{Expr::column("", "k"), "k"}};
	auto p = eval_project(items, r);
	REQUIRE(p.size() == 3);
	CHECK(p.entries()[0].tuple == Tuple {"a"});
	CHECK(p.entries()[1].tuple == Tuple {"a"});
	CHECK(p.entries()[2].mult == Multiplicity::deletion());
}

TEST_CASE("join multiplies weights") {
	auto l = make_schema("l", {{"k", ScalarType::TEXT}});
	auto r = make_schema("r", {{"k", ScalarType::TEXT}});
	std::vector<JoinKey> keys {{{"l", "k"}, {"r", "k"}}};
	auto run = [&](int a, int b) {
		auto out = eval_join(rel(l, {{{"x"}, a}}), rel(r, {{{"x"}, b}}), keys);
		REQUIRE(out.size() == 1);
		CHECK(out.entries()[0].tuple == Tuple {"x", "x"});
		return mult_weight(out.entries()[0].mult);
	};
	CHECK(run(1, 1) == 1);
	CHECK(run(1, -1) == -1);
	CHECK(run(-1, -1) == 1);
	auto nulls = eval_join(rel(l, {{{Value()}, 1}}), rel(r, {{{Value()}, 1}}), keys);
	CHECK(nulls.size() == 1);
}

TEST_CASE("aggregate groups by key and flag") {
	auto r = rel(kv(), {{{"a", 5}, 1}, {{"a", 3}, 1}, {{"b", 2}, -1}});
	std::vector<ColumnRef> keys {{"", "k"}};
	std::vector<AggregateSpec> sum {{AggregateKind::SUM, ColumnRef {"", "v"}, "s"}};
	auto out = normalize(eval_aggregate(keys, sum, r));
	auto expect = make_schema("", {{"k", ScalarType::TEXT}, {"s", ScalarType::INTEGER}});
	CHECK(out == rel(expect, {{{"a", 8}, 1}, {{"b", 2}, -1}}));
	CHECK(eval_aggregate(keys, sum, rel(kv(), {})).empty());

	std::vector<AggregateSpec> count {{AggregateKind::COUNT, std::nullopt, "n"}};
	auto c = eval_aggregate(keys, count, rel(kv(), {{{"a", 1}, 1}, {{"a", 9}, 1}}));
	REQUIRE(c.size() == 1);
	CHECK(c.entries()[0].tuple == Tuple {"a", 2});

	auto text = rel(kv(), {{{"a", 1}, 1}});
	std::vector<AggregateSpec> bad {{AggregateKind::SUM, ColumnRef {"", "k"}, "s"}};
	CHECK(kind_of([&] { eval_aggregate(keys, bad, text); }) == ErrorKind::TYPE);
}

TEST_CASE("combine_view merges aggregates and drops empty groups") {
	auto s = make_schema("v", {{"k", ScalarType::TEXT}, {"s", ScalarType::INTEGER}});
	CombineSpec spec;
	spec.kind = CombineSpec::Kind::AGGREGATE_MERGE;
	spec.key_count = 1;
	spec.aggregates = {AggregateKind::SUM};
	auto v = rel(s, {{{"apple", 5}, 1}, {{"banana", 2}, 1}});
	auto dv = rel(s, {{{"apple", 3}, -1}, {{"banana", 1}, 1}});
	CHECK(normalize(combine_view(v, dv, spec)) == rel(s, {{{"apple", 2}, 1}, {{"banana", 3}, 1}}));
	CHECK(normalize(combine_view(v, rel(s, {}), spec)) == normalize(v));
	CHECK(normalize(combine_view(v, rel(s, {{{"apple", 5}, -1}}), spec)) == rel(s, {{{"banana", 2}, 1}}));
}

TEST_CASE("combine_view on bags") {
	CombineSpec bag;
	auto v = rel(kv(), {{{"a", 1}, 1}, {{"a", 1}, 1}});
	auto out = combine_view(v, rel(kv(), {{{"a", 1}, -1}, {{"b", 2}, 1}}), bag);
	CHECK(normalize(out) == rel(kv(), {{{"a", 1}, 1}, {{"b", 2}, 1}}));
	CHECK(kind_of([&] { combine_view(v, rel(kv(), {{{"z", 1}, -1}}), bag); }) == ErrorKind::NEGATIVE_STATE);
}

TEST_CASE("sound emptiness keeps groups whose sum is zero") {
	auto s = make_schema("v", {{"k", ScalarType::TEXT}, {"s", ScalarType::INTEGER}, {"c", ScalarType::INTEGER}});
	CombineSpec spec;
	spec.kind = CombineSpec::Kind::AGGREGATE_MERGE;
	spec.key_count = 1;
	spec.aggregates = {AggregateKind::SUM, AggregateKind::COUNT};
	spec.emptiness = EmptinessMode::SOUND;
	spec.liveness = 1;
	auto v_init = rel(s, {{{"a", 2, 1}, 1}});
	auto out = combine_view(v_init, rel(s, {{{"a", -2, 1}, 1}}), spec);
	CHECK(normalize(out) == rel(s, {{{"a", 0, 2}, 1}}));
	spec.emptiness = EmptinessMode::PAPER;
	spec.liveness.reset();
	CHECK(combine_view(v_init, rel(s, {{{"a", -2, 1}, 1}}), spec).empty());
}
