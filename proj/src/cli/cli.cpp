#include "ivmc/cli/cli.hpp"

#include "ivmc/catalog/bench.hpp"
#include "ivmc/catalog/catalog.hpp"
#include "ivmc/catalog/codec.hpp"
#include "ivmc/catalog/verify.hpp"
#include "ivmc/core/error.hpp"
#include "ivmc/sql/parser.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>

namespace ivmc {

namespace {

using json = nlohmann::ordered_json;

std::string read_text(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(ErrorKind::IO, "cannot read " + path);
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out || !(out << text)) {
		throw Error(ErrorKind::IO, "cannot write " + path);
	}
}

/// SQL parse errors re-raised with the file name in front of the position.
std::vector<ScriptStatement> parse_file(const std::string &path, const std::string &text) {
	try {
		return parse_script(text);
	} catch (const ParseError &e) {
		throw Error(e.kind(), path + ":" + e.what());
	}
}

struct ConfigFlags {
	std::string dialect = "generic";
	std::string mult_column = DEFAULT_MULT_COLUMN;
	std::string materialize = "eager";
	std::string emptiness = "paper";
	std::string refresh = "lazy";
	std::vector<CLI::Option *> options;

	void add_compile(CLI::App *sub) {
		options.push_back(sub->add_option("--dialect", dialect, "SQL dialect of the emitted scripts")
		                      ->check(CLI::IsMember({"generic", "duck", "postgres"}))
		                      ->capture_default_str());
		options.push_back(
		    sub->add_option("--mult-col", mult_column, "name of the multiplicity column")->capture_default_str());
		options.push_back(sub->add_option("--materialize", materialize, "materialize the delta view (eager) or not")
		                      ->check(CLI::IsMember({"none", "eager"}))
		                      ->capture_default_str());
		options.push_back(sub->add_option("--emptiness", emptiness, "rule for deleting empty aggregate groups")
		                      ->check(CLI::IsMember({"paper", "sound"}))
		                      ->capture_default_str());
	}
	void add_refresh(CLI::App *sub) {
		refresh_option = sub->add_option("--refresh", refresh, "refresh views after every change batch or on query")
		                     ->check(CLI::IsMember({"eager", "lazy"}))
		                     ->capture_default_str();
	}
	bool any_compile_flag_given() const {
		for (const auto *o : options) {
			if (o->count() > 0) {
				return true;
			}
		}
		return false;
	}

	CatalogConfig config() const {
		CatalogConfig c;
		c.compile.dialect = parse_dialect(dialect);
		c.compile.mult_column = mult_column;
		c.compile.materialize = parse_materialization(materialize);
		c.compile.emptiness = parse_emptiness(emptiness);
		c.refresh = parse_refresh_policy(refresh);
		return c;
	}

	CLI::Option *refresh_option = nullptr;
};

std::string csv_field(const Value &v) {
	if (v.is_null()) {
		return "";
	}
	std::string s = v.to_string();
	if (v.type() == ScalarType::TEXT && (s.empty() || s.find_first_of(",\"\n\r") != std::string::npos)) {
		std::string q = "\"";
		for (char c : s) {
			q += c;
			if (c == '"') {
				q += '"';
			}
		}
		return q + "\"";
	}
	return s;
}

void print_rows(std::ostream &out, const Schema &schema, const std::vector<Tuple> &rows, const std::string &format) {
	if (format == "csv") {
		for (std::size_t i = 0; i < schema.columns.size(); ++i) {
			out << (i ? "," : "") << schema.columns[i].name;
		}
		out << "\n";
		for (const auto &r : rows) {
			for (std::size_t i = 0; i < r.size(); ++i) {
				out << (i ? "," : "") << csv_field(r[i]);
			}
			out << "\n";
		}
		return;
	}
	if (format == "json") {
		json arr = json::array();
		for (const auto &r : rows) {
			json obj = json::object();
			for (std::size_t i = 0; i < r.size(); ++i) {
				obj[schema.columns[i].name] = value_to_json(r[i]);
			}
			arr.push_back(obj);
		}
		out << arr.dump(2) << "\n";
		return;
	}
	std::vector<std::size_t> width;
	for (const auto &c : schema.columns) {
		width.push_back(c.name.size());
	}
	for (const auto &r : rows) {
		for (std::size_t i = 0; i < r.size(); ++i) {
			width[i] = std::max(width[i], r[i].to_string().size());
		}
	}
	auto line = [&](const std::vector<std::string> &cells) {
		std::string s;
		for (std::size_t i = 0; i < cells.size(); ++i) {
			std::string cell = cells[i];
			cell.resize(width[i], ' ');
			s += (i ? " | " : "") + cell;
		}
		while (!s.empty() && s.back() == ' ') {
			s.pop_back();
		}
		out << s << "\n";
	};
	std::vector<std::string> header;
	std::vector<std::string> rule;
	for (std::size_t i = 0; i < schema.columns.size(); ++i) {
		header.push_back(schema.columns[i].name);
		rule.push_back(std::string(width[i], '-'));
	}
	line(header);
	std::string sep;
	for (std::size_t i = 0; i < rule.size(); ++i) {
		sep += (i ? "-+-" : "") + rule[i];
	}
	out << sep << "\n";
	for (const auto &r : rows) {
		std::vector<std::string> cells;
		for (const auto &v : r) {
			cells.push_back(v.to_string());
		}
		line(cells);
	}
	out << "(" << rows.size() << (rows.size() == 1 ? " row" : " rows") << ")\n";
}

std::vector<Tuple> expand(const ResultSet &rs) {
	std::vector<Tuple> out;
	for (const auto &[row, count] : rs.rows) {
		for (std::int64_t i = 0; i < count; ++i) {
			out.push_back(row);
		}
	}
	return out;
}

std::string format_ms(double ms) {
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.3f", ms);
	return buf;
}

void print_refresh(std::ostream &out, const RefreshReport &r) {
	std::string views;
	for (const auto &v : r.views) {
		views += (views.empty() ? "" : ", ") + v;
	}
	out << r.rows_propagated << " rows propagated (views: " << views << ") in " << format_ms(r.total_millis)
	    << " ms\n";
	for (const auto &s : r.steps) {
		out << "  " << s.view << " step " << s.step << " " << s.statement << ": " << s.rows << " rows, "
		    << format_ms(s.millis) << " ms\n";
	}
	if (r.rows_propagated > 0) {
		out << "  integrate and drain base deltas: " << format_ms(r.integrate_millis) << " ms\n";
	}
}

std::unique_ptr<Catalog> open_catalog(const std::string &dir) {
	return Catalog::load(dir);
}

enum class Command { COMPILE, OTHER };

int exit_code(ErrorKind kind, Command cmd) {
	if (kind == ErrorKind::IO) {
		return EXIT_IO;
	}
	if (kind == ErrorKind::PARSE) {
		return EXIT_FAILURE_STATUS;
	}
	return cmd == Command::COMPILE ? EXIT_UNSUPPORTED : EXIT_FAILURE_STATUS;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
	CLI::App app {"Compiles materialized view definitions into incremental maintenance SQL and runs them.", "ivmc"};
	app.require_subcommand(1);

	// compile
	ConfigFlags compile_flags;
	std::string schema_file;
	std::string views_file;
	std::string out_dir = "ivm_out";
	auto *compile = app.add_subcommand("compile", "emit ddl.sql, propagate.sql and metadata.json for each view");
	compile->add_option("schema", schema_file, "SQL file with CREATE TABLE statements")->required();
	compile->add_option("views", views_file, "SQL file with CREATE MATERIALIZED VIEW statements")->required();
	compile->add_option("--out", out_dir, "output directory (one subdirectory per view)")->capture_default_str();
	compile_flags.add_compile(compile);

	// exec
	ConfigFlags exec_flags;
	std::string catalog_dir;
	std::vector<std::string> exec_files;
	std::string exec_sql;
	std::string format = "table";
	auto *exec = app.add_subcommand("exec", "run SQL against a catalog (created on first use)");
	exec->add_option("--catalog", catalog_dir, "catalog directory")->required();
	exec->add_option("files", exec_files, "SQL script files");
	exec->add_option("--sql", exec_sql, "SQL text to run after the files");
	exec->add_option("--format", format, "output format for SELECT results")
	    ->check(CLI::IsMember({"table", "csv", "json"}))
	    ->capture_default_str();
	exec_flags.add_compile(exec);
	exec_flags.add_refresh(exec);

	// apply
	std::string changelog;
	std::string input_format;
	auto *apply = app.add_subcommand("apply", "ingest a changelog (JSON lines or CSV) into the catalog");
	apply->add_option("--catalog", catalog_dir, "catalog directory")->required();
	apply->add_option("changelog", changelog, "changelog file; .csv files are read as CSV")->required();
	apply->add_option("--input-format", input_format, "override the changelog format")
	    ->check(CLI::IsMember({"jsonl", "csv"}));

	// refresh / query
	std::string view_name;
	auto *refresh = app.add_subcommand("refresh", "propagate pending changes into a view");
	refresh->add_option("--catalog", catalog_dir, "catalog directory")->required();
	refresh->add_option("view", view_name, "view name")->required();

	auto *query = app.add_subcommand("query", "print a view (refreshing first under the lazy policy)");
	query->add_option("--catalog", catalog_dir, "catalog directory")->required();
	query->add_option("view", view_name, "view name")->required();
	query->add_option("--format", format, "output format")
	    ->check(CLI::IsMember({"table", "csv", "json"}))
	    ->capture_default_str();

	// verify
	ConfigFlags verify_flags;
	VerifyOptions vopts;
	std::vector<std::string> overrides;
	bool all_dialects = false;
	auto *verify = app.add_subcommand("verify", "compare incremental maintenance with full recomputation");
	verify->add_option("schema", schema_file, "SQL file with CREATE TABLE statements")->required();
	verify->add_option("views", views_file, "SQL file with CREATE MATERIALIZED VIEW statements")->required();
	verify->add_option("--seeds", vopts.seeds, "number of random workloads")->capture_default_str();
	verify->add_option("--seed", vopts.first_seed, "seed of the first workload")->capture_default_str();
	verify->add_option("--base-rows", vopts.max_base_rows, "maximum initial rows per table")->capture_default_str();
	verify->add_option("--batches", vopts.max_batches, "maximum change batches per workload")->capture_default_str();
	verify->add_option("--batch-size", vopts.max_batch_size, "maximum records per batch")->capture_default_str();
	verify->add_option("--null-rate", vopts.null_rate, "probability of NULL in text columns")->capture_default_str();
	verify->add_flag("--all-dialects", all_dialects, "replay each workload under every dialect and compare");
	verify->add_option("--override", overrides, "VIEW=FILE: use FILE as the propagation script of VIEW");
	verify_flags.add_compile(verify);
	verify_flags.add_refresh(verify);

	// bench
	ConfigFlags bench_flags;
	BenchOptions bopts;
	std::string bench_json;
	std::string bench_format = "text";
	auto *bench = app.add_subcommand("bench", "time full recomputation against incremental refresh");
	bench->add_option("--catalog", catalog_dir, "take the view and its tables from this catalog");
	bench->add_option("--view", bopts.view, "view to measure (default: first view)");
	bench->add_option("--base-rows", bopts.base_rows, "rows loaded into the first base table")->capture_default_str();
	bench->add_option("--delta-rows", bopts.delta_rows, "change records per refresh")->capture_default_str();
	bench->add_option("--repetitions", bopts.repetitions, "timed repetitions")->capture_default_str();
	bench->add_option("--groups", bopts.groups, "distinct text values (groups)")->capture_default_str();
	bench->add_option("--seed", bopts.seed, "data generator seed")->capture_default_str();
	bench->add_option("--format", bench_format, "report format on standard output")
	    ->check(CLI::IsMember({"text", "json"}))
	    ->capture_default_str();
	bench->add_option("--json", bench_json, "also write the JSON report to this file");
	bench_flags.add_compile(bench);

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e, out, err);
	} catch (const CLI::CallForAllHelp &e) {
		return app.exit(e, out, err);
	} catch (const CLI::ParseError &e) {
		std::string msg = e.what();
		err << "error: usage: " << (msg.empty() ? "invalid arguments" : msg) << "\n";
		return EXIT_UNSUPPORTED;
	}

	Command cmd = compile->parsed() ? Command::COMPILE : Command::OTHER;
	try {
		if (compile->parsed()) {
			std::string schema_sql = read_text(schema_file);
			std::string views_sql = read_text(views_file);
			parse_file(schema_file, schema_sql);
			parse_file(views_file, views_sql);
			auto compiled = compile_views(schema_sql, views_sql, compile_flags.config().compile);
			if (compiled.empty()) {
				throw Error(ErrorKind::UNSUPPORTED, "no CREATE MATERIALIZED VIEW statement in " + views_file);
			}
			for (const auto &c : compiled) {
				for (const auto &p : write_bundle(c.view, c.bundle, out_dir)) {
					out << p.string() << "\n";
				}
			}
			return EXIT_OK;
		}

		if (exec->parsed()) {
			std::unique_ptr<Catalog> cat;
			if (std::filesystem::exists(std::filesystem::path(catalog_dir) / "catalog.json")) {
				cat = open_catalog(catalog_dir);
				if (exec_flags.any_compile_flag_given()) {
					const auto &have = cat->config().compile;
					auto want = exec_flags.config().compile;
					if (have.dialect != want.dialect || have.mult_column != want.mult_column ||
					    have.materialize != want.materialize || have.emptiness != want.emptiness) {
						throw Error(ErrorKind::CATALOG, "catalog " + catalog_dir +
						                                    " was created with different compile options");
					}
				}
				if (exec_flags.refresh_option->count() > 0) {
					cat->set_refresh_policy(parse_refresh_policy(exec_flags.refresh));
				}
			} else {
				cat = std::make_unique<Catalog>(exec_flags.config());
			}
			std::vector<std::pair<std::string, std::string>> scripts;
			for (const auto &f : exec_files) {
				scripts.emplace_back(f, read_text(f));
			}
			if (!exec_sql.empty()) {
				scripts.emplace_back("--sql", exec_sql);
			}
			try {
				for (const auto &[name, text] : scripts) {
					parse_file(name, text);
					for (const auto &rs : cat->execute_sql(text)) {
						print_rows(out, rs.schema, expand(rs), format);
					}
				}
			} catch (...) {
				cat->save(catalog_dir);
				throw;
			}
			cat->save(catalog_dir);
			return EXIT_OK;
		}

		if (apply->parsed()) {
			auto cat = open_catalog(catalog_dir);
			std::ifstream in(changelog, std::ios::binary);
			if (!in) {
				throw Error(ErrorKind::IO, "cannot read " + changelog);
			}
			bool csv = input_format == "csv" ||
			           (input_format.empty() && std::filesystem::path(changelog).extension() == ".csv");
			IngestReport report;
			try {
				report = cat->ingest_changelog(in, csv ? ChangelogFormat::CSV : ChangelogFormat::JSONL);
			} catch (...) {
				cat->save(catalog_dir);
				throw;
			}
			cat->save(catalog_dir);
			out << report.records << " records ingested\n";
			std::set<std::string> tables;
			for (const auto &[t, _] : report.inserts) {
				tables.insert(t);
			}
			for (const auto &[t, _] : report.deletes) {
				tables.insert(t);
			}
			for (const auto &t : tables) {
				out << "  " << t << ": " << (report.inserts.count(t) ? report.inserts.at(t) : 0) << " inserts, "
				    << (report.deletes.count(t) ? report.deletes.at(t) : 0) << " deletes\n";
			}
			for (const auto &r : report.refreshes) {
				print_refresh(out, r);
			}
			return EXIT_OK;
		}

		if (refresh->parsed()) {
			auto cat = open_catalog(catalog_dir);
			auto report = cat->refresh_view(view_name);
			cat->save(catalog_dir);
			print_refresh(out, report);
			return EXIT_OK;
		}

		if (query->parsed()) {
			auto cat = open_catalog(catalog_dir);
			bool lazy = cat->config().refresh == RefreshPolicy::LAZY;
			auto state = cat->query_view(view_name, lazy);
			if (lazy) {
				cat->save(catalog_dir);
			}
			std::vector<Tuple> rows;
			for (const auto &e : state.entries()) {
				rows.push_back(e.tuple);
			}
			print_rows(out, state.schema(), rows, format);
			return EXIT_OK;
		}

		if (verify->parsed()) {
			std::string schema_sql = read_text(schema_file);
			std::string views_sql = read_text(views_file);
			parse_file(schema_file, schema_sql);
			parse_file(views_file, views_sql);
			vopts.config = verify_flags.config();
			if (all_dialects) {
				for (auto d : {Dialect::GENERIC, Dialect::DUCK_STYLE, Dialect::POSTGRES_STYLE}) {
					if (d != vopts.config.compile.dialect) {
						vopts.compare_dialects.push_back(d);
					}
				}
			}
			for (const auto &o : overrides) {
				auto eq = o.find('=');
				if (eq == std::string::npos || eq == 0) {
					throw Error(ErrorKind::UNSUPPORTED, "--override expects VIEW=FILE, got " + o);
				}
				vopts.propagation_overrides[o.substr(0, eq)] = read_text(o.substr(eq + 1));
			}
			auto start = std::chrono::steady_clock::now();
			auto report = verify_views(schema_sql, views_sql, vopts);
			double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
			out << report.workloads << " workloads, " << report.refreshes << " refreshes, " << report.comparisons
			    << " comparisons";
			char buf[32];
			std::snprintf(buf, sizeof buf, " in %.2f s", secs);
			out << buf << "\n";
			if (report.failure) {
				out << "MISMATCH " << report.failure->to_string() << "\n";
				err << "error: mismatch: " << report.failure->check << " (seed " << report.failure->seed << ")\n";
				return EXIT_FAILURE_STATUS;
			}
			out << "no mismatches\n";
			return EXIT_OK;
		}

		if (bench->parsed()) {
			std::unique_ptr<Catalog> cat;
			if (!catalog_dir.empty()) {
				cat = open_catalog(catalog_dir);
			}
			CatalogConfig config = cat ? cat->config() : bench_flags.config();
			auto report = run_bench(cat.get(), config, bopts);
			if (!bench_json.empty()) {
				write_text(bench_json, report.to_json());
			}
			out << (bench_format == "json" ? report.to_json() : report.to_text());
			return EXIT_OK;
		}
	} catch (const std::bad_alloc &) {
		err << "error: resource: out of memory\n";
		return EXIT_IO;
	} catch (const Error &e) {
		std::string msg = e.what();
		for (auto &c : msg) {
			if (c == '\n') {
				c = ' ';
			}
		}
		err << "error: " << error_kind_name(e.kind()) << ": " << msg << "\n";
		return exit_code(e.kind(), cmd);
	} catch (const std::filesystem::filesystem_error &e) {
		err << "error: io: " << e.what() << "\n";
		return EXIT_IO;
	}
	return EXIT_OK;
}

} // namespace ivmc
