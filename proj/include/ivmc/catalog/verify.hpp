#pragma once

#include "ivmc/catalog/catalog.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ivmc {

struct VerifyOptions {
	std::int64_t seeds = 500;
	std::uint64_t first_seed = 1;
	std::size_t max_base_rows = 50;
	std::size_t max_batches = 10;
	std::size_t max_batch_size = 10;
	/// Probability of NULL in TEXT columns (numeric columns are never NULL and always positive).
	double null_rate = 0.1;
	CatalogConfig config;
	/// Every workload is replayed under these dialects too; final view states must match.
	std::vector<Dialect> compare_dialects;
	/// View name -> propagation script used instead of the compiled one.
	std::map<std::string, std::string> propagation_overrides;
};

struct Counterexample {
	std::uint64_t seed = 0;
	std::string view;
	/// 0 for the initial load, then the 1-based batch after which the check failed.
	std::size_t batch = 0;
	/// Change records applied so far in the workload.
	std::size_t records = 0;
	std::string check;
	std::vector<std::string> expected_only;
	std::vector<std::string> actual_only;

	std::string to_string() const;
};

struct VerifyReport {
	std::int64_t workloads = 0;
	std::int64_t refreshes = 0;
	std::int64_t comparisons = 0;
	std::optional<Counterexample> failure;

	bool ok() const {
		return !failure;
	}
};

/// Random workloads (initial load, change batches, interleaved refreshes) over the tables of
/// `schema_sql` with the views of `views_sql`. After every refresh the engine's view state is compared
/// with a full recompute over a shadow copy of the base tables and with direct evaluation of the
/// incremental plan merged by combine_view; delta tables must be drained, paper-mode aggregates must
/// hold no zero rows and the multiplicity column must not leak into views. Stops at the first
/// mismatch.
VerifyReport verify_views(const std::string &schema_sql, const std::string &views_sql, const VerifyOptions &options);

} // namespace ivmc
