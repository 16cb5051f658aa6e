#include "algebra.hpp"

#include <doctest.h>

using namespace ivmc;

namespace {

void expect_law(std::size_t (*law)(std::vector<std::string> &), std::size_t min_instances) {
	std::vector<std::string> failures;
	std::size_t checked = law(failures);
	CHECK(checked >= min_instances);
	CHECK(failures.empty());
	if (!failures.empty()) {
		MESSAGE(failures.front());
	}
}

} // namespace

TEST_CASE("inverse law") {
	expect_law(algebra::inverse_law, 40000);
}

TEST_CASE("select and project linearity") {
	expect_law(algebra::linearity, 20000);
}

TEST_CASE("join bilinearity and weight oracle") {
	expect_law(algebra::bilinearity, 20000);
}

TEST_CASE("join sign rule") {
	expect_law(algebra::sign_rule, 64);
}

TEST_CASE("incremental aggregation matches recomputation") {
	expect_law(algebra::incremental_aggregate, 1000);
}

TEST_CASE("normalize is idempotent and preserves weights") {
	for (const auto &m : algebra::multisets(algebra::domain(true), 4)) {
		auto r = algebra::make(algebra::left_schema(), m);
		auto n = normalize(r);
		REQUIRE(normalize(n) == n);
		REQUIRE(signed_weights(n) == signed_weights(r));
	}
}
