#include "support.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/emit/emitter.hpp"
#include "ivmc/emit/render.hpp"
#include "ivmc/sql/parser.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace ivmc;
using ivmc::test::data_file;
using ivmc::test::normalize_sql;
using ivmc::test::strip_comments;

namespace {

const char *GROUPS_SCHEMA = "CREATE TABLE groups(group_index VARCHAR, group_value INTEGER);";
const char *GROUPS_VIEW = "CREATE MATERIALIZED VIEW query_groups AS SELECT group_index, SUM(group_value) AS "
                           "total_value FROM groups GROUP BY group_index;";

CompiledView compile_one(const std::string &schema, const std::string &view, CompileOptions o = {}) {
	auto v = compile_views(schema, view, o);
	REQUIRE(v.size() == 1);
	return v[0];
}

std::vector<std::string> rendered(const std::vector<Statement> &stmts, Dialect d) {
	std::vector<std::string> out;
	for (const auto &s : stmts) {
		out.push_back(render_statement(s, d));
	}
	return out;
}

} // namespace

TEST_CASE("golden propagation script for the grouped sum view") {
	CompileOptions o;
	o.dialect = Dialect::DUCK_STYLE;
	o.mult_column = "_duckdb_ivm_multiplicity";
	auto c = compile_one(GROUPS_SCHEMA, GROUPS_VIEW, o);
	std::string golden = data_file("../golden/query_groups_duck.sql");
	REQUIRE(!golden.empty());
	// The upsert carries the key from the delta side: a brand-new group has no row in the view yet.
	auto patch = [](std::string s, const std::string &from, const std::string &to) {
		auto pos = s.find(from);
		REQUIRE(pos != std::string::npos);
		return s.replace(pos, from.size(), to);
	};
	golden = patch(golden, "SELECT query_groups.group_index", "SELECT delta_query_groups.group_index");
	golden = patch(golden, "GROUP BY query_groups.group_index", "GROUP BY delta_query_groups.group_index");
	CHECK(normalize_sql(strip_comments(c.bundle.propagate_sql)) == normalize_sql(golden));
	CHECK(c.bundle.propagation.size() == 4);
}

TEST_CASE("ddl for the grouped sum view") {
	auto c = compile_one(GROUPS_SCHEMA, GROUPS_VIEW);
	std::vector<std::string> kinds;
	std::vector<std::string> names;
	for (const auto &s : c.bundle.ddl) {
		if (const auto *ct = std::get_if<CreateTable>(&s)) {
			names.push_back(ct->name);
		}
	}
	CHECK(names == std::vector<std::string> {"delta_groups", "query_groups", "delta_query_groups"});
	const auto &idx = std::get<CreateIndex>(c.bundle.ddl.back());
	CHECK(idx.unique);
	CHECK(idx.table == "query_groups");
	CHECK(idx.columns == std::vector<std::string> {"group_index"});
	const auto &dq = std::get<CreateTable>(c.bundle.ddl[2]);
	CHECK(dq.columns.back().name == DEFAULT_MULT_COLUMN);
}

TEST_CASE("dialect upsert forms") {
	CompileOptions o;
	o.dialect = Dialect::POSTGRES_STYLE;
	auto pg = compile_one(GROUPS_SCHEMA, GROUPS_VIEW, o);
	auto text = rendered(pg.bundle.propagation, Dialect::POSTGRES_STYLE);
	CHECK(text[1].find("ON CONFLICT (group_index) DO UPDATE SET") != std::string::npos);
	CHECK(text[1].find("INSERT OR REPLACE") == std::string::npos);
	CHECK(pg.bundle.ddl_sql.find("group_index TEXT") != std::string::npos);
	o.dialect = Dialect::GENERIC;
	auto gen = compile_one(GROUPS_SCHEMA, GROUPS_VIEW, o);
	CHECK(rendered(gen.bundle.propagation, Dialect::GENERIC)[1].rfind("INSERT OR REPLACE INTO query_groups", 0) == 0);
}

TEST_CASE("materialization none folds the delta query into the upsert") {
	CompileOptions o;
	o.materialize = Materialization::NONE;
	auto c = compile_one(GROUPS_SCHEMA, GROUPS_VIEW, o);
	CHECK(c.bundle.propagation.size() == 2);
	const auto &up = std::get<InsertSelect>(c.bundle.propagation[0]);
	CHECK(up.query.ctes.size() == 2);
	CHECK(c.bundle.propagate_sql.find("INSERT INTO delta_query_groups") == std::string::npos);
	CHECK(c.bundle.propagate_sql.find("DELETE FROM delta_query_groups") == std::string::npos);
}

TEST_CASE("sound emptiness deletes on the hidden count") {
	CompileOptions o;
	o.emptiness = EmptinessMode::SOUND;
	auto c = compile_one(GROUPS_SCHEMA, GROUPS_VIEW, o);
	CHECK(c.bundle.propagate_sql.find("WHERE _ivm_count = 0") != std::string::npos);
}

TEST_CASE("emitted scripts re-parse to the same trees") {
	std::string schema = data_file("schema.sql");
	for (const char *file : {"projection_filter.sql", "group_aggregate.sql", "join.sql", "join_aggregate.sql"}) {
		for (auto d : {Dialect::GENERIC, Dialect::DUCK_STYLE, Dialect::POSTGRES_STYLE}) {
			CompileOptions o;
			o.dialect = d;
			auto c = compile_one(schema, data_file(file), o);
			CHECK(parse_statements(c.bundle.propagate_sql) == c.bundle.propagation);
			CHECK(parse_statements(c.bundle.ddl_sql) == c.bundle.ddl);
		}
	}
}

TEST_CASE("bag views get a hidden count and a key over every column") {
	auto c = compile_one(data_file("schema.sql"), data_file("join.sql"));
	CHECK(c.view.view_schema.columns.back().name == HIDDEN_COUNT_COLUMN);
	CHECK(c.view.key_columns == std::vector<std::string> {"id", "product", "category"});
}

TEST_CASE("metadata") {
	auto c = compile_one(GROUPS_SCHEMA, GROUPS_VIEW);
	auto meta = nlohmann::json::parse(c.bundle.metadata_json);
	CHECK(meta["view"] == "query_groups");
	CHECK(meta["query_class"] == "GROUP_AGGREGATE");
	CHECK(meta["base_tables"] == nlohmann::json::array({"groups"}));
}

TEST_CASE("render escapes and literals") {
	CHECK(quote_identifier("group") == "\"group\"");
	CHECK(quote_identifier("Mixed") == "\"Mixed\"");
	CHECK(render_expr(Expr::literal(Value("it's"))) == "'it''s'");
	CHECK(render_expr(Expr::literal(Value(false))) == "FALSE");
	auto e = parse_expression("(a + b) * 2");
	CHECK(parse_expression(render_expr(e)) == e);
}

TEST_CASE("compile errors") {
	CHECK_THROWS_AS(compile_views(GROUPS_SCHEMA,
	                              "CREATE MATERIALIZED VIEW v AS SELECT group_index, AVG(group_value) FROM groups "
	                              "GROUP BY group_index;",
	                              {}),
	                Error);
	CHECK_THROWS_AS(compile_views(GROUPS_SCHEMA, std::string(GROUPS_VIEW) + GROUPS_VIEW, {}), Error);
}
