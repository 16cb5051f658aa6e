#include "ivmc/core/error.hpp"
#include "ivmc/plan/plan.hpp"
#include "ivmc/sql/parser.hpp"

#include <doctest.h>

using namespace ivmc;

namespace {

MapSchemaProvider catalog() {
	return schemas_from_statements(parse_statements("CREATE TABLE groups (group_index VARCHAR, group_value INTEGER);"
	                                                "CREATE TABLE t (a INTEGER, b VARCHAR);"
	                                                "CREATE TABLE u (b VARCHAR, c DECIMAL(10,2));"));
}

PlanNode plan(const std::string &sql) {
	auto cat = catalog();
	return plan_select(parse_query(sql), cat);
}

ErrorKind plan_error(const std::string &sql) {
	try {
		plan(sql);
	} catch (const Error &e) {
		return e.kind();
	}
	FAIL("no error for: " << sql);
	return ErrorKind::INTERNAL;
}

ZSetRelation table(const std::string &name) {
	auto cat = catalog();
	Schema s = *cat.table_schema(name);
	ZSetRelation r(s.qualified(name));
	if (name == "groups") {
		r.add({"a", 5});
		r.add({"a", 3});
		r.add({"b", 2});
		r.add({Value(), 4});
	} else if (name == "t") {
		r.add({1, "x"});
		r.add({2, "y"});
		r.add({3, Value()});
	} else {
		r.add({"x", Value(Decimal::parse("1.5"))});
		r.add({"x", Value(Decimal::parse("2"))});
		r.add({Value(), Value(Decimal::parse("7"))});
	}
	return r;
}

} // namespace

TEST_CASE("grouped sum plan") {
	auto p = plan("SELECT group_index, SUM(group_value) AS total_value FROM groups GROUP BY group_index");
	CHECK(p.kind == PlanKind::AGGREGATE);
	CHECK(p.child().kind == PlanKind::SCAN);
	CHECK(p.child().table == "groups");
	REQUIRE(p.aggregates.size() == 1);
	CHECK(p.aggregates[0].output == "total_value");
	CHECK(p.output.columns[1].type == ScalarType::INTEGER);
	CHECK(classify(p) == QueryClass::GROUP_AGGREGATE);
}

TEST_CASE("classification") {
	CHECK(classify(plan("SELECT a FROM t")) == QueryClass::PROJECTION_FILTER);
	auto pf = plan("SELECT a FROM t WHERE a > 1");
	CHECK(pf.kind == PlanKind::PROJECT);
	CHECK(pf.child().kind == PlanKind::FILTER);
	CHECK(classify(plan("SELECT t.a, u.c FROM t JOIN u ON t.b = u.b")) == QueryClass::JOIN);
	CHECK(classify(plan("SELECT t.b, SUM(u.c) AS s FROM t JOIN u ON t.b = u.b GROUP BY t.b")) ==
	      QueryClass::JOIN_AGGREGATE);
	CHECK(scanned_tables(plan("SELECT t.a FROM t JOIN u ON t.b = u.b")) == std::vector<std::string> {"t", "u"});
}

TEST_CASE("binder and type errors") {
	CHECK(plan_error("SELECT a FROM missing") == ErrorKind::BINDER);
	CHECK(plan_error("SELECT nope FROM t") == ErrorKind::BINDER);
	CHECK(plan_error("SELECT b, SUM(a) FROM t") == ErrorKind::BINDER);
	CHECK(plan_error("SELECT b, SUM(b) FROM t GROUP BY b") == ErrorKind::TYPE);
	CHECK(plan_error("SELECT t.a FROM t LEFT JOIN u ON t.b = u.b") == ErrorKind::UNSUPPORTED);
}

TEST_CASE("evaluate_plan against hand results") {
	TableSource src = [](const std::string &n) { return table(n); };
	auto g = normalize(evaluate_plan(
	    plan("SELECT group_index, SUM(group_value) AS s, COUNT(*) AS n FROM groups GROUP BY group_index"), src));
	REQUIRE(g.size() == 3);
	CHECK(g.entries()[0].tuple == Tuple {Value(), 4, 1});
	CHECK(g.entries()[1].tuple == Tuple {"a", 8, 2});
	CHECK(g.entries()[2].tuple == Tuple {"b", 2, 1});

	auto j = normalize(evaluate_plan(plan("SELECT t.a, u.c FROM t JOIN u ON t.b = u.b WHERE t.a < 3"), src));
	REQUIRE(j.size() == 2);
	CHECK(j.entries()[0].tuple == Tuple {1, Value(Decimal::parse("1.5"))});
	CHECK(j.entries()[1].tuple == Tuple {1, Value(Decimal::parse("2"))});
}

TEST_CASE("serialize and lower back to a query") {
	auto p = plan("SELECT b, a * 2 AS d FROM t WHERE a > 1");
	auto text = serialize_plan(p);
	CHECK(text.find("Scan") != std::string::npos);
	CHECK(text.find("Filter") != std::string::npos);
	auto cat = catalog();
	CHECK(plan_select(plan_to_query(p), cat) == p);
}
