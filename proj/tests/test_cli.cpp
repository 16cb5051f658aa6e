#include "support.hpp"

#include "ivmc/cli/cli.hpp"

#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ivmc;
namespace fs = std::filesystem;

namespace {

struct Run {
	int code = 0;
	std::string out;
	std::string err;
};

Run cli(std::vector<std::string> args) {
	args.insert(args.begin(), "ivmc");
	std::vector<const char *> argv;
	for (const auto &a : args) {
		argv.push_back(a.c_str());
	}
	std::ostringstream out;
	std::ostringstream err;
	Run r;
	r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
	r.out = out.str();
	r.err = err.str();
	return r;
}

std::string data(const std::string &name) {
	return std::string(IVMC_TEST_DATA) + "/" + name;
}

fs::path scratch(const std::string &name) {
	auto p = fs::temp_directory_path() / ("ivmc_cli_" + name);
	fs::remove_all(p);
	fs::create_directories(p);
	return p;
}

} // namespace

TEST_CASE("compile writes one bundle per view") {
	auto dir = scratch("compile");
	auto r = cli({"compile", data("schema.sql"), data("query_groups_view.sql"), "--out", dir.string(), "--dialect", "duck",
	              "--mult-col", "_duckdb_ivm_multiplicity"});
	CHECK(r.code == EXIT_OK);
	CHECK(fs::exists(dir / "query_groups" / "ddl.sql"));
	CHECK(fs::exists(dir / "query_groups" / "metadata.json"));
	std::ifstream in(dir / "query_groups" / "propagate.sql");
	std::stringstream ss;
	ss << in.rdbuf();
	CHECK(ss.str().find("INSERT OR REPLACE INTO query_groups") != std::string::npos);
	fs::remove_all(dir);
}

TEST_CASE("exit codes") {
	CHECK(cli({"--help"}).code == EXIT_OK);
	auto usage = cli({"compile", data("schema.sql"), data("join.sql"), "--dialect", "oracle"});
	CHECK(usage.code == EXIT_UNSUPPORTED);
	CHECK(usage.err.rfind("error: usage:", 0) == 0);
	CHECK(cli({"frobnicate"}).code == EXIT_UNSUPPORTED);

	auto missing = cli({"compile", "/nonexistent/schema.sql", data("join.sql")});
	CHECK(missing.code == EXIT_IO);
	CHECK(missing.err.rfind("error: io:", 0) == 0);

	auto dir = scratch("codes");
	std::ofstream(dir / "bad.sql") << "CREATE TABLE t (a INTEGER";
	auto parse = cli({"compile", (dir / "bad.sql").string(), data("join.sql")});
	CHECK(parse.code == EXIT_FAILURE_STATUS);
	CHECK(parse.err.find("bad.sql:1:") != std::string::npos);

	std::ofstream(dir / "avg.sql") << "CREATE MATERIALIZED VIEW v AS SELECT id, AVG(amount) FROM sales GROUP BY id;";
	auto unsupported = cli({"compile", data("schema.sql"), (dir / "avg.sql").string(), "--out", dir.string()});
	CHECK(unsupported.code == EXIT_UNSUPPORTED);
	CHECK(unsupported.err.rfind("error: unsupported:", 0) == 0);
	fs::remove_all(dir);
}

TEST_CASE("catalog workflow") {
	auto dir = scratch("workflow");
	auto cat = (dir / "cat").string();
	auto r = cli({"exec", "--catalog", cat, data("query_groups_setup.sql"), "--sql",
	              "INSERT INTO groups VALUES ('apple', 3), ('apple', 2), ('banana', 2);"});
	REQUIRE(r.code == EXIT_OK);

	std::ofstream(dir / "changes.jsonl")
	    << R"({"table":"groups","action":"delete","values":{"group_index":"apple","group_value":3}})" << "\n"
	    << R"({"table":"groups","action":"insert","values":{"group_index":"banana","group_value":1}})" << "\n";
	r = cli({"apply", "--catalog", cat, (dir / "changes.jsonl").string()});
	CHECK(r.code == EXIT_OK);
	CHECK(r.out.find("2 records ingested") != std::string::npos);

	r = cli({"refresh", "--catalog", cat, "query_groups"});
	CHECK(r.code == EXIT_OK);
	CHECK(r.out.find("5 rows propagated") != std::string::npos);

	r = cli({"query", "--catalog", cat, "query_groups", "--format", "csv"});
	CHECK(r.code == EXIT_OK);
	CHECK(r.out == "group_index,total_value\napple,2\nbanana,3\n");

	r = cli({"query", "--catalog", cat, "nope"});
	CHECK(r.code == EXIT_FAILURE_STATUS);

	std::ofstream(dir / "bad.jsonl") << R"({"table":"groups","action":"insert"})" << "\n";
	r = cli({"apply", "--catalog", cat, (dir / "bad.jsonl").string()});
	CHECK(r.code == EXIT_FAILURE_STATUS);
	CHECK(r.err.find("line 1") != std::string::npos);

	r = cli({"exec", "--catalog", cat, "--dialect", "postgres", "--sql", "SELECT 1 AS one FROM groups;"});
	CHECK(r.code == EXIT_FAILURE_STATUS);
	fs::remove_all(dir);
}

TEST_CASE("verify exit status") {
	auto ok = cli({"verify", data("schema.sql"), data("group_aggregate.sql"), "--seeds", "20"});
	CHECK(ok.code == EXIT_OK);
	auto broken = cli({"verify", data("schema.sql"), data("group_aggregate.sql"), "--seeds", "20", "--override",
	                   "query_groups=" + data("broken_query_groups.sql")});
	CHECK(broken.code == EXIT_FAILURE_STATUS);
	CHECK(broken.out.find("MISMATCH") != std::string::npos);
}

TEST_CASE("bench json report") {
	auto r = cli({"bench", "--base-rows", "2000", "--delta-rows", "20", "--repetitions", "2", "--format", "json"});
	CHECK(r.code == EXIT_OK);
	CHECK(r.out.find("\"speedup\"") != std::string::npos);
}
