#include "ivmc/catalog/verify.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/sql/parser.hpp"

#include <random>
#include <set>

namespace ivmc {

std::string Counterexample::to_string() const {
	std::string out = "seed " + std::to_string(seed) + ", view " + view + ", ";
	out += batch == 0 ? std::string("initial load") : "after batch " + std::to_string(batch);
	out += " (" + std::to_string(records) + " change records applied): " + check;
	for (const auto &r : expected_only) {
		out += "\n  expected only: " + r;
	}
	for (const auto &r : actual_only) {
		out += "\n  actual only:   " + r;
	}
	return out;
}

namespace {

using Weights = std::map<Tuple, std::int64_t>;

struct Mismatch {
	Counterexample example;
};

Weights weights_of(const ZSetRelation &r) {
	return signed_weights(r);
}

void diff(const Weights &expected, const Weights &actual, Counterexample &ce) {
	std::set<Tuple> keys;
	for (const auto &[t, _] : expected) {
		keys.insert(t);
	}
	for (const auto &[t, _] : actual) {
		keys.insert(t);
	}
	for (const auto &t : keys) {
		auto e = expected.count(t) ? expected.at(t) : 0;
		auto a = actual.count(t) ? actual.at(t) : 0;
		if (e > a) {
			ce.expected_only.push_back(tuple_to_string(t) + " x" + std::to_string(e - a));
		} else if (a > e) {
			ce.actual_only.push_back(tuple_to_string(t) + " x" + std::to_string(a - e));
		}
	}
}

class Workload {
public:
	Workload(std::uint64_t seed, const std::string &schema_sql, const std::string &views_sql,
	         const VerifyOptions &options, const CatalogConfig &config, VerifyReport &report)
	    : seed_(seed), rng_(seed), options_(options), catalog_(config), report_(report), views_sql_(views_sql) {
		catalog_.execute_sql(schema_sql);
		for (const auto &name : catalog_.database().table_names()) {
			if (catalog_.table_role(name) == TableRole::BASE) {
				tables_.push_back(name);
				const Table &t = catalog_.database().table(name);
				stored_[name] = Weights(t.rows.begin(), t.rows.end());
			}
		}
	}

	/// Runs the workload and returns the final visible state of every view.
	std::map<std::string, Weights> run() {
		std::vector<ChangeRecord> initial;
		for (const auto &t : tables_) {
			auto n = pick(options_.max_base_rows + 1);
			for (std::size_t i = 0; i < n; ++i) {
				initial.push_back({t, ChangeAction::INSERT, random_row(t)});
			}
		}
		apply(initial);

		for (const auto &s : parse_script(views_sql_)) {
			if (std::holds_alternative<CreateView>(s.statement)) {
				const auto &reg = catalog_.register_view(s.text);
				views_.push_back(reg.definition.name);
			}
		}
		for (const auto &[view, sql] : options_.propagation_overrides) {
			catalog_.override_propagation(view, sql);
		}
		for (const auto &v : views_) {
			direct_[v] = initial_direct(catalog_.view(v).definition);
		}
		for (const auto &v : views_) {
			check(v);
		}

		std::size_t batches = pick(options_.max_batches + 1);
		bool eager = catalog_.config().refresh == RefreshPolicy::EAGER;
		for (batch_ = 1; batch_ <= batches; ++batch_) {
			auto batch = random_batch();
			std::set<std::string> touched;
			for (const auto &c : batch) {
				touched.insert(c.table);
			}
			apply(batch);
			if (eager) {
				std::set<std::string> done;
				for (const auto &v : views_) {
					if (done.count(v) || !reads_any(v, touched)) {
						continue;
					}
					auto group = group_of(v);
					mirror_refresh(group);
					for (const auto &g : group) {
						done.insert(g);
						check(g);
					}
				}
			} else if (!views_.empty() && pick(2) == 0) {
				const auto &v = views_[pick(views_.size())];
				bool explicit_refresh = pick(2) == 0;
				if (explicit_refresh) {
					catalog_.refresh_view(v);
				} else {
					catalog_.query_view(v, true);
				}
				auto group = group_of(v);
				mirror_refresh(group);
				for (const auto &g : group) {
					check(g);
				}
			}
		}
		batch_ = batches;

		std::map<std::string, Weights> final_state;
		for (const auto &v : views_) {
			auto state = catalog_.query_view(v, true);
			mirror_refresh(group_of(v));
			check(v);
			final_state[v] = weights_of(state);
		}
		return final_state;
	}

private:
	std::size_t pick(std::size_t n) {
		return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n);
	}

	Value random_value(ScalarType type) {
		switch (type) {
		case ScalarType::TEXT: {
			if (static_cast<double>(rng_() % 1000) < options_.null_rate * 1000) {
				return Value();
			}
			static const char *domain[] = {"a", "b", "c", "d", "e"};
			return Value(domain[pick(5)]);
		}
		case ScalarType::INTEGER:
			return Value(static_cast<std::int64_t>(1 + pick(6)));
		case ScalarType::DECIMAL:
			return Value(Decimal {static_cast<__int128>(1 + pick(12)) * (Decimal::ONE / 4)});
		case ScalarType::BOOLEAN:
			return Value(pick(2) == 0);
		case ScalarType::NULL_TYPE:
			break;
		}
		return Value();
	}

	Tuple random_row(const std::string &table) {
		Tuple row;
		for (const auto &c : catalog_.database().table(table).schema.columns) {
			row.push_back(random_value(c.type));
		}
		return row;
	}

	Weights logical(const std::string &table) const {
		Weights w = stored_.at(table);
		if (auto it = pending_.find(table); it != pending_.end()) {
			for (const auto &[row, insert] : it->second) {
				w[row] += insert ? 1 : -1;
			}
		}
		std::erase_if(w, [](const auto &kv) { return kv.second == 0; });
		return w;
	}

	std::vector<ChangeRecord> random_batch() {
		std::vector<ChangeRecord> batch;
		std::size_t size = 1 + pick(options_.max_batch_size);
		std::map<std::string, Weights> state;
		for (const auto &t : tables_) {
			state[t] = logical(t);
		}
		while (batch.size() < size) {
			const auto &t = tables_[pick(tables_.size())];
			auto &w = state[t];
			auto roll = pick(100);
			std::optional<Tuple> victim;
			if (roll >= 50 && !w.empty()) {
				std::int64_t total = 0;
				for (const auto &[_, n] : w) {
					total += n;
				}
				auto k = static_cast<std::int64_t>(pick(static_cast<std::size_t>(total)));
				for (const auto &[row, n] : w) {
					if (k < n) {
						victim = row;
						break;
					}
					k -= n;
				}
			}
			if (victim) {
				batch.push_back({t, ChangeAction::DELETE, *victim});
				if (--w[*victim] == 0) {
					w.erase(*victim);
				}
				// An update arrives as a delete followed by an insert.
				if (roll < 65 || batch.size() >= size) {
					continue;
				}
			}
			Tuple row = random_row(t);
			batch.push_back({t, ChangeAction::INSERT, row});
			++w[row];
		}
		return batch;
	}

	void apply(const std::vector<ChangeRecord> &batch) {
		catalog_.apply_base_changes(batch);
		for (const auto &c : batch) {
			bool insert = c.action == ChangeAction::INSERT;
			if (catalog_.dependents(c.table).empty()) {
				stored_[c.table][c.row] += insert ? 1 : -1;
				if (stored_[c.table][c.row] == 0) {
					stored_[c.table].erase(c.row);
				}
			} else {
				pending_[c.table].emplace_back(c.row, insert);
			}
		}
		records_ += batch.size();
	}

	bool reads_any(const std::string &view, const std::set<std::string> &tables) const {
		for (const auto &t : catalog_.view(view).definition.base_tables) {
			if (tables.count(t)) {
				return true;
			}
		}
		return false;
	}

	std::vector<std::string> group_of(const std::string &view) const {
		std::set<std::string> tables;
		std::set<std::string> members = {view};
		for (bool grew = true; grew;) {
			grew = false;
			for (const auto &m : members) {
				for (const auto &t : catalog_.view(m).definition.base_tables) {
					tables.insert(t);
				}
			}
			for (const auto &v : views_) {
				if (!members.count(v) && reads_any(v, tables)) {
					members.insert(v);
					grew = true;
				}
			}
		}
		std::vector<std::string> out;
		for (const auto &v : views_) {
			if (members.count(v)) {
				out.push_back(v);
			}
		}
		return out;
	}

	ZSetRelation base_relation(const std::string &table, const Weights &w) const {
		return from_weights(catalog_.database().table(table).schema, w);
	}

	/// Delta-table relation: rows carry the multiplicity column, every entry is an insertion.
	ZSetRelation delta_relation(const std::string &table, const std::vector<std::pair<Tuple, bool>> &rows) const {
		const auto &mult = catalog_.config().compile.mult_column;
		ZSetRelation out(delta_table_schema(catalog_.database().table(table).schema, mult));
		for (const auto &[row, insert] : rows) {
			Tuple t = row;
			t.emplace_back(insert);
			out.add(std::move(t));
		}
		return out;
	}

	ZSetRelation eval_delta(const ViewDefinition &def, const std::map<std::string, ZSetRelation> &bases,
	                        const std::map<std::string, ZSetRelation> &deltas) const {
		TableSource source = [&](const std::string &name) -> ZSetRelation {
			if (auto it = deltas.find(name); it != deltas.end()) {
				return it->second;
			}
			return bases.at(name);
		};
		return evaluate_plan(def.incremental.plan, source, def.incremental.mult_column);
	}

	ZSetRelation initial_direct(const ViewDefinition &def) const {
		std::map<std::string, ZSetRelation> bases;
		std::map<std::string, ZSetRelation> deltas;
		for (const auto &t : def.base_tables) {
			bases.emplace(t, base_relation(t, {}));
			std::vector<std::pair<Tuple, bool>> rows;
			for (const auto &[row, n] : stored_.at(t)) {
				for (std::int64_t i = 0; i < n; ++i) {
					rows.emplace_back(row, true);
				}
			}
			deltas.emplace(delta_table_name(t), delta_relation(t, rows));
		}
		// Against empty bases every delta row is an insertion, so the delta is the initial state itself
		// (no emptiness filtering, matching the initial load).
		return eval_delta(def, bases, deltas);
	}

	void mirror_refresh(const std::vector<std::string> &group) {
		++report_.refreshes;
		std::set<std::string> tables;
		for (const auto &v : group) {
			for (const auto &t : catalog_.view(v).definition.base_tables) {
				tables.insert(t);
			}
		}
		std::map<std::string, ZSetRelation> bases;
		std::map<std::string, ZSetRelation> deltas;
		for (const auto &t : tables) {
			bases.emplace(t, base_relation(t, stored_.at(t)));
			deltas.emplace(delta_table_name(t), delta_relation(t, pending_[t]));
		}
		for (const auto &v : group) {
			const auto &def = catalog_.view(v).definition;
			ZSetRelation dv = eval_delta(def, bases, deltas);
			try {
				direct_[v] = combine_view(direct_[v], dv, def.incremental.combine);
			} catch (const Error &e) {
				fail(v, std::string("direct incremental evaluation failed: ") + e.what());
			}
		}
		for (const auto &t : tables) {
			stored_[t] = logical(t);
			pending_[t].clear();
		}
	}

	[[noreturn]] void fail(const std::string &view, const std::string &check, const Weights *expected = nullptr,
	                       const Weights *actual = nullptr) {
		Counterexample ce;
		ce.seed = seed_;
		ce.view = view;
		ce.batch = batch_;
		ce.records = records_;
		ce.check = check;
		if (expected && actual) {
			diff(*expected, *actual, ce);
		}
		throw Mismatch {std::move(ce)};
	}

	void check(const std::string &view) {
		++report_.comparisons;
		const RegisteredView &reg = catalog_.view(view);
		const auto &def = reg.definition;

		Weights engine = weights_of(catalog_.query_view(view, false));

		TableSource source = [&](const std::string &t) { return base_relation(t, logical(t)); };
		Weights full = weights_of(evaluate_plan(def.plan, source));
		if (engine != full) {
			fail(view, "incremental view state differs from full recompute", &full, &engine);
		}

		ZSetRelation direct = direct_.at(view);
		Weights direct_visible;
		for (const auto &e : direct.entries()) {
			Tuple t(e.tuple.begin(), e.tuple.begin() + static_cast<std::ptrdiff_t>(def.visible_columns));
			direct_visible[t] += mult_weight(e.mult);
		}
		if (direct_visible != full) {
			fail(view, "direct incremental-plan evaluation differs from full recompute", &full, &direct_visible);
		}

		const Database &db = catalog_.database();
		for (const auto &t : def.base_tables) {
			if (db.table(delta_table_name(t)).row_count != 0 && pending_[t].empty()) {
				fail(view, "delta table " + delta_table_name(t) + " not drained after refresh");
			}
		}
		if (def.has_delta_view_table() && db.table(def.delta_view_table()).row_count != 0) {
			fail(view, "delta view table " + def.delta_view_table() + " not drained after refresh");
		}
		const Schema &stored = db.table(view).schema;
		if (stored.find({"", def.options.mult_column})) {
			fail(view, "multiplicity column appears in the view table");
		}
		bool aggregate = def.incremental.combine.kind == CombineSpec::Kind::AGGREGATE_MERGE;
		if (aggregate && def.options.emptiness == EmptinessMode::PAPER) {
			for (const auto &[row, _] : db.table(view).rows) {
				for (std::size_t i = def.key_columns.size(); i < def.visible_columns; ++i) {
					if (row[i] == Value(std::int64_t {0})) {
						fail(view, "view row " + tuple_to_string(row) + " keeps a zero aggregate");
					}
				}
			}
		}
	}

	std::uint64_t seed_;
	std::mt19937_64 rng_;
	const VerifyOptions &options_;
	Catalog catalog_;
	VerifyReport &report_;
	std::string views_sql_;
	std::vector<std::string> tables_;
	std::vector<std::string> views_;
	std::map<std::string, Weights> stored_;
	std::map<std::string, std::vector<std::pair<Tuple, bool>>> pending_;
	std::map<std::string, ZSetRelation> direct_;
	std::size_t batch_ = 0;
	std::size_t records_ = 0;
};

} // namespace

VerifyReport verify_views(const std::string &schema_sql, const std::string &views_sql, const VerifyOptions &options) {
	VerifyReport report;
	for (std::int64_t i = 0; i < options.seeds; ++i) {
		std::uint64_t seed = options.first_seed + static_cast<std::uint64_t>(i);
		std::map<std::string, Weights> reference;
		std::vector<CatalogConfig> configs = {options.config};
		for (auto d : options.compare_dialects) {
			CatalogConfig c = options.config;
			c.compile.dialect = d;
			configs.push_back(c);
		}
		for (std::size_t k = 0; k < configs.size(); ++k) {
			std::map<std::string, Weights> final_state;
			try {
				Workload w(seed, schema_sql, views_sql, options, configs[k], report);
				final_state = w.run();
			} catch (Mismatch &m) {
				m.example.check += std::string(" [dialect ") + dialect_name(configs[k].compile.dialect) + "]";
				report.failure = std::move(m.example);
				return report;
			} catch (const Error &e) {
				Counterexample ce;
				ce.seed = seed;
				ce.check = std::string("engine error [dialect ") + dialect_name(configs[k].compile.dialect) +
				           "]: " + error_kind_name(e.kind()) + ": " + e.what();
				report.failure = std::move(ce);
				return report;
			}
			++report.workloads;
			if (k == 0) {
				reference = std::move(final_state);
				continue;
			}
			for (const auto &[view, state] : reference) {
				if (final_state[view] != state) {
					Counterexample ce;
					ce.seed = seed;
					ce.view = view;
					ce.check = std::string("final state under dialect ") + dialect_name(configs[k].compile.dialect) +
					           " differs from dialect " + dialect_name(configs[0].compile.dialect);
					diff(state, final_state[view], ce);
					report.failure = std::move(ce);
					return report;
				}
			}
		}
	}
	return report;
}

} // namespace ivmc
