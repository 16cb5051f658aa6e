#include "ivmc/core/error.hpp"
#include "ivmc/engine/executor.hpp"
#include "ivmc/sql/parser.hpp"

#include <doctest.h>
#include <functional>

using namespace ivmc;

namespace {

struct Fixture {
	Database db;
	Executor ex {db};

	ExecResult run(const std::string &sql) {
		ExecResult last;
		for (const auto &s : parse_statements(sql)) {
			last = ex.execute(s);
		}
		return last;
	}

	std::map<Tuple, std::int64_t> select(const std::string &sql) {
		auto r = run(sql);
		REQUIRE(r.result);
		std::map<Tuple, std::int64_t> out;
		for (const auto &[row, n] : r.result->rows) {
			out[row] += n;
		}
		return out;
	}
};

ErrorKind error_kind(const std::function<void()> &f) {
	try {
		f();
	} catch (const Error &e) {
		return e.kind();
	}
	FAIL("no error raised");
	return ErrorKind::INTERNAL;
}

} // namespace

TEST_CASE("insert and select with bags") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER); INSERT INTO t VALUES ('a', 1), ('a', 1), ('b', NULL);");
	CHECK(f.db.table("t").row_count == 3);
	CHECK(f.select("SELECT k, v FROM t WHERE v = 1") == std::map<Tuple, std::int64_t> {{{"a", 1}, 2}});
	CHECK(f.select("SELECT k FROM t WHERE v IS NULL") == std::map<Tuple, std::int64_t> {{{"b"}, 1}});
	CHECK(f.select("SELECT k FROM t WHERE NOT v = 1").empty());
	CHECK(f.select("SELECT k, SUM(v) AS s, COUNT(v) AS c, COUNT(*) AS n FROM t GROUP BY k") ==
	      std::map<Tuple, std::int64_t> {{{"a", 2, 2, 2}, 1}, {{"b", Value(), 0, 1}, 1}});
	CHECK(f.select("SELECT COUNT(*) AS n FROM t WHERE v > 5") == std::map<Tuple, std::int64_t> {{{0}, 1}});
}

TEST_CASE("joins are null-safe on keys") {
	Fixture f;
	f.run("CREATE TABLE l (k VARCHAR, x INTEGER); CREATE TABLE r (k VARCHAR, y INTEGER);"
	      "INSERT INTO l VALUES ('a', 1), (NULL, 2), ('z', 3); INSERT INTO r VALUES ('a', 10), (NULL, 20);");
	CHECK(f.select("SELECT l.x, r.y FROM l JOIN r ON l.k = r.k") ==
	      std::map<Tuple, std::int64_t> {{{1, 10}, 1}, {{2, 20}, 1}});
	CHECK(f.select("SELECT l.x, r.y FROM l LEFT JOIN r ON l.k = r.k") ==
	      std::map<Tuple, std::int64_t> {{{1, 10}, 1}, {{2, 20}, 1}, {{3, Value()}, 1}});
}

TEST_CASE("ctes and union all") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER); INSERT INTO t VALUES ('a', 1), ('b', 2);");
	CHECK(f.select("WITH c AS (SELECT k, v * 10 AS w FROM t) SELECT k, w FROM c WHERE w > 10") ==
	      std::map<Tuple, std::int64_t> {{{"b", 20}, 1}});
	CHECK(f.select("SELECT k FROM t UNION ALL SELECT k FROM t") ==
	      std::map<Tuple, std::int64_t> {{{"a"}, 2}, {{"b"}, 2}});
}

TEST_CASE("unique index, replace and on conflict") {
	Fixture f;
	f.run("CREATE TABLE v (k VARCHAR, s INTEGER); CREATE UNIQUE INDEX v_key ON v (k);"
	      "INSERT INTO v VALUES ('a', 1), ('b', 2);");
	CHECK(error_kind([&] { f.run("INSERT INTO v VALUES ('a', 9);"); }) == ErrorKind::CONSTRAINT);
	CHECK(f.db.table("v").row_count == 2);
	f.run("CREATE TABLE d (k VARCHAR, s INTEGER); INSERT INTO d VALUES ('a', 5), ('c', 7);");
	f.run("INSERT OR REPLACE INTO v SELECT k, s FROM d;");
	CHECK(f.select("SELECT k, s FROM v") ==
	      std::map<Tuple, std::int64_t> {{{"a", 5}, 1}, {{"b", 2}, 1}, {{"c", 7}, 1}});
	f.run("INSERT INTO v (k, s) SELECT k, s + 100 FROM d ON CONFLICT (k) DO UPDATE SET s = excluded.s;");
	CHECK(f.select("SELECT k, s FROM v") ==
	      std::map<Tuple, std::int64_t> {{{"a", 105}, 1}, {{"b", 2}, 1}, {{"c", 107}, 1}});
	CHECK(error_kind([&] { f.run("INSERT INTO d (k, s) SELECT k, s FROM v ON CONFLICT (k) DO UPDATE SET s = 1;"); }) ==
	      ErrorKind::BINDER);
}

TEST_CASE("delete with three-valued predicates") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER); INSERT INTO t VALUES ('a', 0), ('b', NULL), ('c', 3);");
	CHECK(f.run("DELETE FROM t WHERE v = 0;").affected == 1);
	CHECK(f.run("DELETE FROM t WHERE v <> 3;").affected == 0);
	CHECK(f.run("DELETE FROM t;").affected == 2);
}

TEST_CASE("statements are atomic") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER); CREATE UNIQUE INDEX tk ON t (k); INSERT INTO t VALUES ('a', 1);");
	auto before = f.db.fingerprint();
	CHECK(error_kind([&] { f.run("INSERT INTO t VALUES ('b', 2), ('a', 3);"); }) == ErrorKind::CONSTRAINT);
	CHECK(f.db.fingerprint() == before);
}

TEST_CASE("transactions roll back through the journal") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER); INSERT INTO t VALUES ('a', 1);");
	auto before = f.db.fingerprint();
	{
		Transaction txn(f.db);
		f.run("INSERT INTO t VALUES ('b', 2); DELETE FROM t WHERE k = 'a'; CREATE TABLE u (x INTEGER);");
		f.run("CREATE UNIQUE INDEX tk ON t (k);");
		CHECK(f.db.fingerprint() != before);
	}
	CHECK(f.db.fingerprint() == before);
	{
		Transaction txn(f.db);
		f.run("INSERT INTO t VALUES ('b', 2);");
		txn.commit();
	}
	CHECK(f.db.table("t").row_count == 2);
}

TEST_CASE("fault hook aborts mutations") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER);");
	int calls = 0;
	f.db.set_fault_hook([&](const char *) {
		if (++calls == 3) {
			throw Error(ErrorKind::INJECTED, "fault");
		}
	});
	CHECK(error_kind([&] { f.run("INSERT INTO t VALUES ('a', 1), ('b', 2), ('c', 3);"); }) == ErrorKind::INJECTED);
	CHECK(f.db.table("t").row_count == 0);
}

TEST_CASE("read overrides and type checks") {
	Fixture f;
	f.run("CREATE TABLE t (k VARCHAR, v INTEGER); INSERT INTO t VALUES ('a', 1);");
	ResultSet fake;
	fake.schema = *f.db.table_schema("t");
	fake.rows.push_back({{"z", 9}, 2});
	f.ex.set_read_override("t", fake);
	CHECK(f.select("SELECT k, v FROM t") == std::map<Tuple, std::int64_t> {{{"z", 9}, 2}});
	f.ex.clear_read_overrides();
	CHECK(error_kind([&] { f.run("INSERT INTO t VALUES (1, 'a');"); }) == ErrorKind::TYPE);
	CHECK(error_kind([&] { f.run("SELECT nope FROM t;"); }) == ErrorKind::BINDER);
	CHECK(error_kind([&] { f.run("CREATE TABLE t (x INTEGER);"); }) == ErrorKind::COLLISION);
	CHECK(error_kind([&] { f.db.erase_row("t", {"q", 1}); }) == ErrorKind::NEGATIVE_STATE);
}
