#include "ivmc/catalog/bench.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/sql/parser.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <json.hpp>
#include <random>

namespace ivmc {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
	return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
	if (v.empty()) {
		return 0;
	}
	std::sort(v.begin(), v.end());
	std::size_t n = v.size();
	return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

const char *DEFAULT_SCHEMA = "CREATE TABLE groups (group_index VARCHAR, group_value INTEGER);";
const char *DEFAULT_VIEW = "CREATE MATERIALIZED VIEW query_groups AS SELECT group_index, SUM(group_value) AS "
                           "total_value FROM groups GROUP BY group_index;";

class RowMaker {
public:
	RowMaker(std::uint64_t seed, std::int64_t groups) : rng_(seed), groups_(std::max<std::int64_t>(groups, 1)) {
	}

	Tuple make(const Schema &schema) {
		Tuple row;
		row.reserve(schema.columns.size());
		for (const auto &c : schema.columns) {
			switch (c.type) {
			case ScalarType::TEXT:
				row.emplace_back("g" + std::to_string(rng_() % static_cast<std::uint64_t>(groups_)));
				break;
			case ScalarType::INTEGER:
				row.emplace_back(static_cast<std::int64_t>(1 + rng_() % 100));
				break;
			case ScalarType::DECIMAL:
				row.emplace_back(Decimal {static_cast<__int128>(1 + rng_() % 10000) * (Decimal::ONE / 100)});
				break;
			case ScalarType::BOOLEAN:
				row.emplace_back(rng_() % 2 == 0);
				break;
			case ScalarType::NULL_TYPE:
				row.emplace_back();
				break;
			}
		}
		return row;
	}

	std::size_t below(std::size_t n) {
		return static_cast<std::size_t>(rng_() % n);
	}

private:
	std::mt19937_64 rng_;
	std::int64_t groups_;
};

} // namespace

double BenchReport::median_recompute() const {
	std::vector<double> v;
	for (const auto &r : runs) {
		v.push_back(r.recompute_millis);
	}
	return median(v);
}

double BenchReport::median_refresh() const {
	std::vector<double> v;
	for (const auto &r : runs) {
		v.push_back(r.refresh_millis);
	}
	return median(v);
}

double BenchReport::median_apply() const {
	std::vector<double> v;
	for (const auto &r : runs) {
		v.push_back(r.apply_millis);
	}
	return median(v);
}

std::vector<std::pair<std::string, double>> BenchReport::median_steps() const {
	std::vector<std::pair<std::string, double>> out;
	std::size_t n = 0;
	for (const auto &r : runs) {
		n = std::max(n, r.steps.size());
	}
	for (std::size_t i = 0; i < n; ++i) {
		std::vector<double> v;
		std::string label;
		for (const auto &r : runs) {
			if (i < r.steps.size()) {
				v.push_back(r.steps[i].millis);
				label = r.steps[i].view + " step " + std::to_string(r.steps[i].step) + " (" + r.steps[i].statement + ")";
			} else {
				v.push_back(0);
			}
		}
		out.emplace_back(label, median(v));
	}
	std::vector<double> integrate;
	for (const auto &r : runs) {
		integrate.push_back(r.integrate_millis);
	}
	if (!runs.empty()) {
		out.emplace_back("integrate base deltas and drain", median(integrate));
	}
	return out;
}

std::string BenchReport::to_json() const {
	json runs_json = json::array();
	for (const auto &r : runs) {
		json steps = json::array();
		for (const auto &s : r.steps) {
			steps.push_back({{"view", s.view}, {"step", s.step}, {"statement", s.statement}, {"rows", s.rows},
			                 {"millis", s.millis}});
		}
		runs_json.push_back({{"recompute_millis", r.recompute_millis},
		                     {"apply_millis", r.apply_millis},
		                     {"refresh_millis", r.refresh_millis},
		                     {"integrate_millis", r.integrate_millis},
		                     {"steps", steps}});
	}
	json medians_steps = json::array();
	for (const auto &[label, ms] : median_steps()) {
		medians_steps.push_back({{"step", label}, {"millis", ms}});
	}
	double refresh = median_refresh();
	json out = {
	    {"view", view},
	    {"query_class", query_class},
	    {"base_rows", options.base_rows},
	    {"delta_rows", options.delta_rows},
	    {"repetitions", options.repetitions},
	    {"groups", options.groups},
	    {"seed", options.seed},
	    {"view_rows", view_rows},
	    {"load_millis", load_millis},
	    {"register_millis", register_millis},
	    {"median",
	     {{"recompute_millis", median_recompute()},
	      {"apply_millis", median_apply()},
	      {"refresh_millis", refresh},
	      {"steps", medians_steps}}},
	    {"speedup", refresh > 0 ? json(median_recompute() / refresh) : json(nullptr)},
	    {"runs", runs_json},
	};
	return out.dump(2) + "\n";
}

std::string BenchReport::to_text() const {
	char buf[256];
	std::string out;
	std::snprintf(buf, sizeof buf, "view %s (%s): %lld base rows, %lld-row delta batches, %d repetitions\n",
	              view.c_str(), query_class.c_str(), static_cast<long long>(options.base_rows),
	              static_cast<long long>(options.delta_rows), options.repetitions);
	out += buf;
	std::snprintf(buf, sizeof buf, "load %.1f ms, register (initial load) %.1f ms, %lld view rows\n", load_millis,
	              register_millis, static_cast<long long>(view_rows));
	out += buf;
	std::snprintf(buf, sizeof buf, "median full recompute    %10.3f ms\n", median_recompute());
	out += buf;
	std::snprintf(buf, sizeof buf, "median delta capture     %10.3f ms\n", median_apply());
	out += buf;
	std::snprintf(buf, sizeof buf, "median incremental refresh %8.3f ms\n", median_refresh());
	out += buf;
	for (const auto &[label, ms] : median_steps()) {
		std::snprintf(buf, sizeof buf, "  %-40s %10.3f ms\n", label.c_str(), ms);
		out += buf;
	}
	if (median_refresh() > 0) {
		std::snprintf(buf, sizeof buf, "recompute / refresh      %10.1fx\n", median_recompute() / median_refresh());
		out += buf;
	}
	return out;
}

BenchReport run_bench(const Catalog *source, const CatalogConfig &config, const BenchOptions &options) {
	if (options.base_rows < 0 || options.delta_rows < 0 || options.repetitions < 1) {
		throw Error(ErrorKind::UNSUPPORTED, "bench sizes must be non-negative and repetitions at least 1");
	}
	BenchReport report;
	report.options = options;

	std::vector<Schema> tables;
	std::string view_sql;
	if (source) {
		std::string name = options.view;
		if (name.empty()) {
			auto names = source->view_names();
			if (names.empty()) {
				throw Error(ErrorKind::CATALOG, "catalog has no views to benchmark");
			}
			name = names.front();
		}
		const auto &def = source->view(name).definition;
		view_sql = def.source_sql;
		for (const auto &t : def.base_tables) {
			Schema s = source->database().table(t).schema;
			tables.push_back(s);
		}
	} else {
		for (const auto &s : parse_script(DEFAULT_SCHEMA)) {
			const auto &ct = std::get<CreateTable>(s.statement);
			Schema schema;
			schema.name = ct.name;
			for (const auto &c : ct.columns) {
				schema.columns.push_back({c.name, c.type, ""});
			}
			tables.push_back(schema);
		}
		view_sql = DEFAULT_VIEW;
	}

	Catalog catalog(CatalogConfig {config.compile, RefreshPolicy::LAZY});
	RowMaker maker(options.seed, options.groups);
	auto load_start = Clock::now();
	Database &db = catalog.database();
	std::vector<Tuple> fact_rows;
	for (std::size_t i = 0; i < tables.size(); ++i) {
		catalog.create_base_table(tables[i]);
		std::int64_t n = i == 0 ? options.base_rows : options.groups;
		if (i == 0) {
			fact_rows.reserve(static_cast<std::size_t>(n));
		}
		for (std::int64_t k = 0; k < n; ++k) {
			Tuple row = maker.make(tables[i]);
			db.insert_row(tables[i].name, row);
			if (i == 0) {
				fact_rows.push_back(std::move(row));
			}
		}
	}
	report.load_millis = millis_since(load_start);

	auto register_start = Clock::now();
	const RegisteredView &reg = catalog.register_view(view_sql);
	report.register_millis = millis_since(register_start);
	report.view = reg.definition.name;
	report.query_class = query_class_name(reg.definition.query_class);
	const std::string fact = tables.front().name;

	// The full recompute is the view's own initial-load statement, run after clearing the view.
	std::optional<Statement> reload;
	for (auto &s : parse_script(reg.ddl_sql)) {
		if (const auto *ins = std::get_if<InsertSelect>(&s.statement); ins && ins->table == reg.definition.name) {
			reload = s.statement;
		}
	}
	if (!reload) {
		throw Error(ErrorKind::INTERNAL, "view DDL has no initial load");
	}
	Statement clear = DeleteStatement {reg.definition.name, std::nullopt};

	for (int rep = 0; rep < options.repetitions; ++rep) {
		BenchRun run;
		{
			Transaction txn(db);
			Executor ex(db);
			auto start = Clock::now();
			ex.execute(clear);
			ex.execute(*reload);
			run.recompute_millis = millis_since(start);
			report.view_rows = db.table(reg.definition.name).row_count;
		}

		std::vector<ChangeRecord> batch;
		for (std::int64_t k = 0; k < options.delta_rows; ++k) {
			if (k % 2 == 1 && !fact_rows.empty()) {
				std::size_t victim = maker.below(fact_rows.size());
				batch.push_back({fact, ChangeAction::DELETE, fact_rows[victim]});
				fact_rows[victim] = std::move(fact_rows.back());
				fact_rows.pop_back();
			} else {
				Tuple row = maker.make(tables.front());
				batch.push_back({fact, ChangeAction::INSERT, row});
				fact_rows.push_back(std::move(row));
			}
		}
		auto apply_start = Clock::now();
		catalog.apply_base_changes(batch);
		run.apply_millis = millis_since(apply_start);

		auto refresh_start = Clock::now();
		RefreshReport r = catalog.refresh_view(reg.definition.name);
		run.refresh_millis = millis_since(refresh_start);
		run.steps = r.steps;
		run.integrate_millis = r.integrate_millis;
		report.runs.push_back(std::move(run));
	}
	return report;
}

} // namespace ivmc
