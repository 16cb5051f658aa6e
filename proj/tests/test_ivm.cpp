#include "ivmc/core/error.hpp"
#include "ivmc/ivm/rewriter.hpp"
#include "ivmc/sql/parser.hpp"

#include <doctest.h>

using namespace ivmc;

namespace {

const char *SCHEMA = "CREATE TABLE groups (group_index VARCHAR, group_value INTEGER);"
                     "CREATE TABLE t (a INTEGER, b VARCHAR);"
                     "CREATE TABLE u (b VARCHAR, c INTEGER);";

PlanNode bound(const std::string &sql, const std::string &mult = "m") {
	auto base = schemas_from_statements(parse_statements(SCHEMA));
	WithDeltaTables cat(base, mult);
	return bind_deltas(plan_select(parse_query(sql), cat), cat, mult);
}

const PlanNode *find_scan(const PlanNode &p) {
	if (p.kind == PlanKind::SCAN) {
		return &p;
	}
	return p.children.empty() ? nullptr : find_scan(p.children[0]);
}

} // namespace

TEST_CASE("delta tables") {
	auto base = schemas_from_statements(parse_statements(SCHEMA));
	CHECK(delta_table_name("groups") == "delta_groups");
	auto d = delta_table_schema(*base.table_schema("groups"), "_duckdb_ivm_multiplicity");
	REQUIRE(d.columns.size() == 3);
	CHECK(d.columns[2].name == "_duckdb_ivm_multiplicity");
	CHECK(d.columns[2].type == ScalarType::BOOLEAN);
}

TEST_CASE("bind_deltas rebinds scans and threads the multiplicity column") {
	auto p = bound("SELECT group_index, SUM(group_value) AS total_value FROM groups GROUP BY group_index");
	const auto *scan = find_scan(p);
	REQUIRE(scan);
	CHECK(scan->table == "delta_groups");
	CHECK(scan->delta);
	CHECK(scan->base_table == "groups");
	CHECK(p.output.columns.back().name == "m");

	auto j = bound("SELECT t.a, u.c FROM t JOIN u ON t.b = u.b");
	CHECK(j.output.columns.back().name == "m");
	REQUIRE(j.child().kind == PlanKind::JOIN);
	CHECK(j.child().children[0].table == "delta_t");
	CHECK(j.child().children[1].table == "delta_u");
}

TEST_CASE("bind_deltas needs delta tables") {
	auto base = schemas_from_statements(parse_statements(SCHEMA));
	auto p = plan_select(parse_query("SELECT a FROM t"), base);
	CHECK_THROWS_AS(bind_deltas(p, base, "m"), Error);
}

TEST_CASE("aggregates group by keys and multiplicity") {
	auto ip = rewrite_incremental(
	    bound("SELECT group_index, SUM(group_value) AS total_value FROM groups GROUP BY group_index"),
	    EmptinessMode::PAPER);
	CHECK(ip.query_class == QueryClass::GROUP_AGGREGATE);
	CHECK(ip.plan.kind == PlanKind::AGGREGATE);
	REQUIRE(ip.plan.group_keys.size() == 2);
	CHECK(ip.plan.group_keys[1].name == "m");
	CHECK(ip.combine.kind == CombineSpec::Kind::AGGREGATE_MERGE);
	CHECK(ip.combine.key_count == 1);
	CHECK(!ip.combine.liveness);

	auto sound = rewrite_incremental(
	    bound("SELECT group_index, SUM(group_value) AS total_value FROM groups GROUP BY group_index"),
	    EmptinessMode::SOUND);
	CHECK(sound.combine.liveness.has_value());
	CHECK(sound.plan.aggregates.back().output == HIDDEN_COUNT_COLUMN);
}

TEST_CASE("selection and projection keep their shape") {
	auto b = bound("SELECT a FROM t WHERE a > 1");
	auto ip = rewrite_incremental(b, EmptinessMode::PAPER);
	CHECK(ip.plan == b);
	CHECK(ip.combine.kind == CombineSpec::Kind::BAG);
}

TEST_CASE("joins expand into three terms") {
	auto ip = rewrite_incremental(bound("SELECT t.a, u.c FROM t JOIN u ON t.b = u.b"), EmptinessMode::PAPER);
	CHECK(ip.query_class == QueryClass::JOIN);
	REQUIRE(ip.plan.kind == PlanKind::UNION_ALL);
	REQUIRE(ip.plan.children.size() == 3);
	std::vector<JoinMultiplicity> kinds;
	for (const auto &term : ip.plan.children) {
		const PlanNode *n = &term;
		while (n->kind != PlanKind::JOIN) {
			n = &n->child();
		}
		kinds.push_back(n->join_mult);
		int deltas = 0;
		for (const auto &c : n->children) {
			deltas += c.delta ? 1 : 0;
		}
		CHECK(deltas == (n->join_mult == JoinMultiplicity::PRODUCT ? 2 : 1));
	}
	CHECK(kinds == std::vector<JoinMultiplicity> {JoinMultiplicity::LEFT, JoinMultiplicity::RIGHT,
	                                              JoinMultiplicity::PRODUCT});
}
