#pragma once

#include "ivmc/catalog/catalog.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivmc {

struct BenchOptions {
	std::int64_t base_rows = 1000000;
	std::int64_t delta_rows = 1000;
	int repetitions = 5;
	/// Distinct values drawn for TEXT columns (the group count of a grouped view).
	std::int64_t groups = 10000;
	std::uint64_t seed = 1;
	/// View to measure; empty picks the first view of the source catalog.
	std::string view;
};

struct BenchRun {
	double recompute_millis = 0;
	double apply_millis = 0;
	double refresh_millis = 0;
	double integrate_millis = 0;
	std::vector<StepTiming> steps;
};

struct BenchReport {
	std::string view;
	std::string query_class;
	BenchOptions options;
	double load_millis = 0;
	double register_millis = 0;
	std::int64_t view_rows = 0;
	std::vector<BenchRun> runs;

	double median_recompute() const;
	double median_refresh() const;
	double median_apply() const;
	/// Median per propagation step, in script order.
	std::vector<std::pair<std::string, double>> median_steps() const;

	std::string to_json() const;
	std::string to_text() const;
};

/// Builds a fresh in-memory catalog with the tables and view definition of `source` (or, when null,
/// the grouped-SUM view `query_groups` over `groups(group_index VARCHAR, group_value INTEGER)`),
/// loads synthetic rows into the first base table (other base tables get `groups` rows), and times a
/// full recompute of the view against an incremental refresh of one delta batch per repetition.
BenchReport run_bench(const Catalog *source, const CatalogConfig &config, const BenchOptions &options);

} // namespace ivmc
