#include "ivmc/core/error.hpp"
#include "ivmc/sql/lexer.hpp"
#include "ivmc/sql/parser.hpp"

#include <doctest.h>

using namespace ivmc;

namespace {

ErrorKind parse_error_kind(const std::string &sql) {
	try {
		parse_statements(sql);
	} catch (const ParseError &e) {
		return e.kind();
	}
	FAIL("no error for: " << sql);
	return ErrorKind::INTERNAL;
}

} // namespace

TEST_CASE("create table and materialized view") {
	auto stmts = parse_statements("CREATE TABLE groups(group_index VARCHAR, group_value INTEGER);\n"
	                              "CREATE MATERIALIZED VIEW query_groups AS SELECT group_index, SUM(group_value) AS "
	                              "total_value FROM groups GROUP BY group_index;");
	REQUIRE(stmts.size() == 2);
	const auto &ct = std::get<CreateTable>(stmts[0]);
	CHECK(ct.name == "groups");
	REQUIRE(ct.columns.size() == 2);
	CHECK(ct.columns[0].type == ScalarType::TEXT);
	CHECK(ct.columns[1].type == ScalarType::INTEGER);
	const auto &cv = std::get<CreateView>(stmts[1]);
	CHECK(cv.materialized);
	CHECK(cv.name == "query_groups");
	REQUIRE(cv.query.cores.size() == 1);
	CHECK(cv.query.cores[0].items.size() == 2);
	CHECK(cv.query.cores[0].items[1].alias == "total_value");
	CHECK(cv.query.cores[0].group_by.size() == 1);
}

TEST_CASE("strip_materialized") {
	auto m = strip_materialized("CREATE MATERIALIZED VIEW Q AS SELECT a FROM t");
	CHECK(m.name == "q");
	CHECK(m.query.cores[0].from.name == "t");
	CHECK_THROWS_AS(strip_materialized("CREATE VIEW q AS SELECT a FROM t"), ParseError);
}

TEST_CASE("expressions keep precedence") {
	auto e = parse_expression("a + b * 2 = 7 AND NOT c IS NULL");
	CHECK(e.op == ExprOp::AND);
	CHECK(e.args[0].op == ExprOp::EQ);
	CHECK(e.args[0].args[0].op == ExprOp::ADD);
	CHECK(e.args[0].args[0].args[1].op == ExprOp::MUL);
	auto c = parse_expression("CASE WHEN m = FALSE THEN -x ELSE x END");
	CHECK(c.kind == ExprKind::CASE);
	CHECK(c.flag);
	CHECK(c.args.size() == 3);
}

TEST_CASE("upsert forms") {
	auto r = parse_statements("INSERT OR REPLACE INTO v WITH c AS (SELECT k FROM d) SELECT k FROM c;");
	CHECK(std::get<InsertSelect>(r[0]).conflict == ConflictAction::REPLACE);
	CHECK(std::get<InsertSelect>(r[0]).query.ctes.size() == 1);
	auto u = parse_statements("INSERT INTO v (k, s) SELECT k, s FROM d ON CONFLICT (k) DO UPDATE SET s = excluded.s;");
	const auto &ins = std::get<InsertSelect>(u[0]);
	CHECK(ins.conflict == ConflictAction::UPDATE);
	CHECK(ins.conflict_keys == std::vector<std::string> {"k"});
	REQUIRE(ins.updates.size() == 1);
	CHECK(ins.updates[0].value.qualifier == "excluded");
}

TEST_CASE("insert, delete, index, join") {
	auto s = parse_statements("INSERT INTO t VALUES ('a', 1), ('b', NULL);"
	                          "DELETE FROM t WHERE v = 0 OR v IS NULL;"
	                          "CREATE UNIQUE INDEX i ON t (k);"
	                          "SELECT t.k, u.w FROM t LEFT JOIN u ON t.k = u.k;");
	CHECK(std::get<InsertValues>(s[0]).rows.size() == 2);
	CHECK(std::get<DeleteStatement>(s[1]).where.has_value());
	CHECK(std::get<CreateIndex>(s[2]).unique);
	CHECK(std::get<SelectStatement>(s[3]).query.cores[0].join->type == JoinType::LEFT);
}

TEST_CASE("script positions") {
	auto s = parse_script("SELECT a FROM t;\n  SELECT b FROM u;");
	REQUIRE(s.size() == 2);
	CHECK(s[1].position.line == 2);
	CHECK(s[1].position.column == 3);
}

TEST_CASE("errors carry positions and kinds") {
	try {
		parse_statements("SELECT a FROM\n WHERE");
		FAIL("expected error");
	} catch (const ParseError &e) {
		CHECK(e.kind() == ErrorKind::PARSE);
		CHECK(e.position().line == 2);
	}
	CHECK(parse_error_kind("SELECT FROM t") == ErrorKind::PARSE);
	CHECK(parse_error_kind("SELECT 'abc FROM t") == ErrorKind::PARSE);
	CHECK(parse_error_kind("SELECT a FROM t ORDER BY a") == ErrorKind::UNSUPPORTED);
	CHECK(parse_error_kind("SELECT a FROM (SELECT a FROM t) x") == ErrorKind::UNSUPPORTED);
}

TEST_CASE("tokens advance") {
	auto toks = tokenize("SELECT a, 'x''y' FROM t -- comment\n;");
	REQUIRE(toks.size() >= 6);
	for (std::size_t i = 1; i < toks.size(); ++i) {
		CHECK(toks[i - 1].position < toks[i].position);
	}
}
