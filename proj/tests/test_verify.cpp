#include "support.hpp"

#include "ivmc/catalog/verify.hpp"

#include <doctest.h>

using namespace ivmc;
using ivmc::test::data_file;

namespace {

VerifyReport run(const std::string &views, VerifyOptions o = {}) {
	o.seeds = 40;
	return verify_views(data_file("schema.sql"), data_file(views), o);
}

} // namespace

TEST_CASE("every query class under every configuration") {
	for (const char *views : {"projection_filter.sql", "group_aggregate.sql", "join.sql", "join_aggregate.sql"}) {
		for (auto materialize : {Materialization::EAGER, Materialization::NONE}) {
			for (auto emptiness : {EmptinessMode::PAPER, EmptinessMode::SOUND}) {
				for (auto refresh : {RefreshPolicy::LAZY, RefreshPolicy::EAGER}) {
					VerifyOptions o;
					o.config.compile.materialize = materialize;
					o.config.compile.emptiness = emptiness;
					o.config.refresh = refresh;
					auto r = run(views, o);
					INFO(views << " " << materialization_name(materialize) << " " << emptiness_name(emptiness));
					CHECK_MESSAGE(r.ok(), (r.failure ? r.failure->to_string() : ""));
					CHECK(r.workloads == 40);
				}
			}
		}
	}
}

TEST_CASE("dialects agree") {
	VerifyOptions o;
	o.compare_dialects = {Dialect::DUCK_STYLE, Dialect::POSTGRES_STYLE};
	auto r = run("join_aggregate.sql", o);
	CHECK_MESSAGE(r.ok(), (r.failure ? r.failure->to_string() : ""));
}

TEST_CASE("a corrupted propagation script is caught") {
	VerifyOptions o;
	o.propagation_overrides["query_groups"] = data_file("broken_query_groups.sql");
	auto r = run("group_aggregate.sql", o);
	REQUIRE_FALSE(r.ok());
	CHECK(r.failure->view == "query_groups");
	CHECK(r.failure->check.find("differs from full recompute") != std::string::npos);
	CHECK(!r.failure->expected_only.empty());
}

TEST_CASE("zero-sum groups are flagged in paper mode only") {
	// COUNT over a nullable column can reach 0 while the group still has rows.
	std::string view = "CREATE MATERIALIZED VIEW c AS SELECT group_value, COUNT(group_index) AS n FROM groups "
	                   "GROUP BY group_value;";
	VerifyOptions o;
	o.seeds = 200;
	o.null_rate = 0.5;
	auto paper = verify_views(data_file("schema.sql"), view, o);
	CHECK_FALSE(paper.ok());
	o.config.compile.emptiness = EmptinessMode::SOUND;
	auto sound = verify_views(data_file("schema.sql"), view, o);
	CHECK_MESSAGE(sound.ok(), (sound.failure ? sound.failure->to_string() : ""));
}
