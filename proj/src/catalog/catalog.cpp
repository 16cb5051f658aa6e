#include "ivmc/catalog/catalog.hpp"

#include "ivmc/catalog/codec.hpp"
#include "ivmc/core/error.hpp"
#include "ivmc/core/evaluator.hpp"
#include "ivmc/sql/parser.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

namespace ivmc {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
	return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const char *role_name(TableRole r) {
	switch (r) {
	case TableRole::BASE:
		return "base";
	case TableRole::DELTA:
		return "delta";
	case TableRole::VIEW:
		return "view";
	case TableRole::DELTA_VIEW:
		return "delta_view";
	}
	return "base";
}

TableRole parse_role(const std::string &s) {
	if (s == "delta") {
		return TableRole::DELTA;
	}
	if (s == "view") {
		return TableRole::VIEW;
	}
	if (s == "delta_view") {
		return TableRole::DELTA_VIEW;
	}
	return TableRole::BASE;
}

const char *statement_kind(const Statement &s) {
	return std::visit(
	    [](const auto &st) -> const char * {
		    using T = std::decay_t<decltype(st)>;
		    if constexpr (std::is_same_v<T, InsertSelect>) {
			    return st.conflict == ConflictAction::NONE ? "insert" : "upsert";
		    } else if constexpr (std::is_same_v<T, DeleteStatement>) {
			    return "delete";
		    } else if constexpr (std::is_same_v<T, InsertValues>) {
			    return "insert";
		    } else if constexpr (std::is_same_v<T, SelectStatement>) {
			    return "select";
		    } else {
			    return "ddl";
		    }
	    },
	    s);
}

std::string read_file(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) {
		throw Error(ErrorKind::IO, "cannot read " + path.string());
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

void write_file(const std::filesystem::path &path, const std::string &content) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out) {
		throw Error(ErrorKind::IO, "cannot write " + path.string());
	}
	out << content;
	if (!out) {
		throw Error(ErrorKind::IO, "write failed for " + path.string());
	}
}

std::vector<Statement> statements_of(const std::string &sql) {
	std::vector<Statement> out;
	for (auto &s : parse_script(sql)) {
		out.push_back(std::move(s.statement));
	}
	return out;
}

/// Splits one CSV line; `quoted[i]` tells whether field i was quoted.
std::vector<std::string> split_csv(const std::string &line, std::vector<bool> &quoted) {
	std::vector<std::string> fields(1);
	quoted.assign(1, false);
	bool in_quotes = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		char c = line[i];
		if (in_quotes) {
			if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
				fields.back() += '"';
				++i;
			} else if (c == '"') {
				in_quotes = false;
			} else {
				fields.back() += c;
			}
		} else if (c == '"') {
			in_quotes = true;
			quoted.back() = true;
		} else if (c == ',') {
			fields.emplace_back();
			quoted.push_back(false);
		} else {
			fields.back() += c;
		}
	}
	if (in_quotes) {
		throw Error(ErrorKind::CHANGELOG, "unterminated quoted field");
	}
	return fields;
}

void collect_sources(const SelectQuery &q, std::set<std::string> &out) {
	for (const auto &c : q.ctes) {
		collect_sources(c.query, out);
	}
	for (const auto &core : q.cores) {
		out.insert(core.from.name);
		if (core.join) {
			out.insert(core.join->table.name);
		}
	}
}

} // namespace

const char *refresh_policy_name(RefreshPolicy p) {
	return p == RefreshPolicy::EAGER ? "eager" : "lazy";
}

RefreshPolicy parse_refresh_policy(std::string_view name) {
	if (name == "eager") {
		return RefreshPolicy::EAGER;
	}
	if (name == "lazy") {
		return RefreshPolicy::LAZY;
	}
	throw Error(ErrorKind::UNSUPPORTED, "unknown refresh policy '" + std::string(name) + "'");
}

Catalog::Catalog(CatalogConfig config) : config_(std::move(config)) {
}

std::optional<Schema> Catalog::table_schema(const std::string &name) const {
	return db_.table_schema(name);
}

std::optional<TableRole> Catalog::table_role(const std::string &name) const {
	auto it = roles_.find(name);
	if (it == roles_.end()) {
		return std::nullopt;
	}
	return it->second;
}

void Catalog::create_base_table(const Schema &schema) {
	std::lock_guard lock(mutex_);
	for (const auto &c : schema.columns) {
		if (c.name == config_.compile.mult_column || c.name == HIDDEN_COUNT_COLUMN) {
			throw Error(ErrorKind::COLLISION, "column name " + c.name + " is reserved for view maintenance");
		}
	}
	db_.create_table(schema);
	roles_[schema.name] = TableRole::BASE;
}

const RegisteredView &Catalog::view(const std::string &name) const {
	auto it = views_.find(name);
	if (it == views_.end()) {
		throw Error(ErrorKind::CATALOG, "unknown view " + name);
	}
	return it->second;
}

std::vector<std::string> Catalog::dependents(const std::string &table) const {
	std::vector<std::string> out;
	for (const auto &name : view_order_) {
		const auto &bases = views_.at(name).definition.base_tables;
		if (std::find(bases.begin(), bases.end(), table) != bases.end()) {
			out.push_back(name);
		}
	}
	return out;
}

std::vector<Statement> Catalog::parse_propagation(const std::string &sql) const {
	return statements_of(sql);
}

const RegisteredView &Catalog::register_view(const std::string &ddl_text) {
	std::lock_guard lock(mutex_);
	auto script = parse_script(ddl_text);
	if (script.size() != 1) {
		throw Error(ErrorKind::UNSUPPORTED, "expected exactly one CREATE MATERIALIZED VIEW statement");
	}
	const auto *cv = std::get_if<CreateView>(&script[0].statement);
	if (!cv) {
		throw Error(ErrorKind::UNSUPPORTED, "expected a CREATE MATERIALIZED VIEW statement");
	}
	if (!cv->materialized) {
		throw Error(ErrorKind::UNSUPPORTED, "only materialized views are maintained");
	}
	if (views_.count(cv->name) || db_.has_table(cv->name)) {
		throw Error(ErrorKind::COLLISION, "object " + cv->name + " already exists");
	}

	RegisteredView reg;
	reg.definition = define_view(cv->name, script[0].text, cv->query, *this, config_.compile);
	for (const auto &t : reg.definition.base_tables) {
		if (table_role(t) != TableRole::BASE) {
			throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: view over maintained table " + t);
		}
	}
	ScriptBundle bundle = build_bundle(reg.definition, *this);
	reg.ddl_sql = bundle.ddl_sql;
	reg.propagate_sql = bundle.propagate_sql;
	reg.metadata_json = bundle.metadata_json;
	reg.propagation = parse_propagation(bundle.propagate_sql);
	for (const auto &d : bundle.drain) {
		reg.drain.push_back(statements_of(render_statement(d, config_.compile.dialect)).at(0));
	}

	std::vector<std::string> new_deltas;
	for (const auto &t : reg.definition.base_tables) {
		std::string d = delta_table_name(t);
		if (!db_.has_table(d)) {
			new_deltas.push_back(d);
		} else if (table_role(d) != TableRole::DELTA) {
			throw Error(ErrorKind::COLLISION, "table " + d + " exists and is not a delta table");
		}
	}
	{
		Transaction txn(db_);
		Executor ex(db_);
		for (const auto &stmt : statements_of(bundle.ddl_sql)) {
			ex.execute(stmt);
		}
		txn.commit();
	}
	for (const auto &d : new_deltas) {
		roles_[d] = TableRole::DELTA;
	}
	roles_[reg.definition.name] = TableRole::VIEW;
	if (reg.definition.has_delta_view_table()) {
		roles_[reg.definition.delta_view_table()] = TableRole::DELTA_VIEW;
	}
	std::string name = reg.definition.name;
	view_order_.push_back(name);
	return views_.emplace(name, std::move(reg)).first->second;
}

void Catalog::override_propagation(const std::string &view, const std::string &propagate_sql) {
	std::lock_guard lock(mutex_);
	auto it = views_.find(view);
	if (it == views_.end()) {
		throw Error(ErrorKind::CATALOG, "unknown view " + view);
	}
	it->second.propagation = parse_propagation(propagate_sql);
	it->second.propagate_sql = propagate_sql;
}

void Catalog::check_base_table(const std::string &table) const {
	auto role = table_role(table);
	if (!role) {
		throw Error(ErrorKind::BINDER, "unknown table " + table);
	}
	if (*role != TableRole::BASE) {
		throw Error(ErrorKind::CATALOG, "table " + table + " is maintained by the view engine and cannot be changed");
	}
}

ChangeRecord Catalog::make_change(const std::string &table, ChangeAction action,
                                  const std::map<std::string, Value> &values) const {
	check_base_table(table);
	const Schema &schema = db_.table(table).schema;
	ChangeRecord rec;
	rec.table = table;
	rec.action = action;
	for (const auto &c : schema.columns) {
		auto it = values.find(c.name);
		if (it == values.end()) {
			throw Error(ErrorKind::BINDER, "missing value for column " + c.name + " of " + table);
		}
		rec.row.push_back(coerce(it->second, c.type));
	}
	for (const auto &[name, _] : values) {
		if (!schema.find({"", name})) {
			throw Error(ErrorKind::BINDER, "unknown column " + name + " in " + table);
		}
	}
	return rec;
}

IngestReport Catalog::apply_base_changes(const std::vector<ChangeRecord> &changes) {
	std::lock_guard lock(mutex_);
	return apply_unlocked(changes);
}

IngestReport Catalog::apply_unlocked(const std::vector<ChangeRecord> &changes) {
	IngestReport report;
	std::set<std::string> touched;
	{
		Transaction txn(db_);
		for (const auto &c : changes) {
			check_base_table(c.table);
			check_tuple(db_.table(c.table).schema, c.row);
			bool insert = c.action == ChangeAction::INSERT;
			if (dependents(c.table).empty()) {
				if (insert) {
					db_.insert_row(c.table, c.row);
				} else {
					db_.erase_row(c.table, c.row);
				}
			} else {
				Tuple flagged = c.row;
				flagged.emplace_back(insert);
				db_.insert_row(delta_table_name(c.table), flagged);
				touched.insert(c.table);
			}
			++report.records;
			++(insert ? report.inserts : report.deletes)[c.table];
		}
		txn.commit();
	}
	if (config_.refresh == RefreshPolicy::EAGER) {
		std::set<std::string> done;
		for (const auto &name : view_order_) {
			if (done.count(name)) {
				continue;
			}
			const auto &bases = views_.at(name).definition.base_tables;
			bool affected = std::any_of(bases.begin(), bases.end(), [&](const auto &t) { return touched.count(t); });
			if (!affected) {
				continue;
			}
			auto group = group_of(name);
			done.insert(group.begin(), group.end());
			report.refreshes.push_back(refresh_group(group));
		}
	}
	return report;
}

IngestReport Catalog::ingest_changelog(std::istream &in, ChangelogFormat format) {
	std::lock_guard lock(mutex_);
	std::vector<ChangeRecord> records;
	std::string line;
	std::size_t line_no = 0;
	std::vector<std::string> header;

	auto fail = [&](const std::string &detail) {
		std::string message = "line " + std::to_string(line_no) + ": " + detail;
		apply_unlocked(records);
		throw Error(ErrorKind::CHANGELOG, message);
	};
	auto parse_action = [&](const std::string &a) {
		if (a == "insert") {
			return ChangeAction::INSERT;
		}
		if (a == "delete") {
			return ChangeAction::DELETE;
		}
		fail("action must be \"insert\" or \"delete\", got \"" + a + "\"");
		return ChangeAction::INSERT;
	};
	auto known_table = [&](const std::string &t) -> const Schema & {
		if (table_role(t) != TableRole::BASE) {
			fail(db_.has_table(t) ? "table " + t + " is maintained by the view engine" : "unknown table " + t);
		}
		return db_.table(t).schema;
	};

	while (std::getline(in, line)) {
		++line_no;
		if (!line.empty() && line.back() == '\r') {
			line.pop_back();
		}
		if (line.find_first_not_of(" \t") == std::string::npos) {
			continue;
		}
		ChangeRecord rec;
		if (format == ChangelogFormat::JSONL) {
			json j;
			try {
				j = json::parse(line);
			} catch (const json::parse_error &e) {
				fail("malformed JSON record");
			}
			if (!j.is_object()) {
				fail("record must be a JSON object");
			}
			if (!j.contains("table") || !j["table"].is_string()) {
				fail("record has no \"table\" field");
			}
			if (!j.contains("action") || !j["action"].is_string()) {
				fail("record has no \"action\" field");
			}
			if (!j.contains("values") || !j["values"].is_object()) {
				fail("record has no \"values\" object");
			}
			rec.table = j["table"].get<std::string>();
			rec.action = parse_action(j["action"].get<std::string>());
			const Schema &schema = known_table(rec.table);
			const json &values = j["values"];
			for (const auto &c : schema.columns) {
				if (!values.contains(c.name)) {
					fail("record is missing column \"" + c.name + "\" of " + rec.table);
				}
				try {
					rec.row.push_back(value_from_json(values[c.name], c.type));
				} catch (const Error &e) {
					fail("column \"" + c.name + "\": " + e.what());
				}
			}
			for (const auto &[key, _] : values.items()) {
				if (!schema.find({"", key})) {
					fail("unknown column \"" + key + "\" in " + rec.table);
				}
			}
		} else {
			std::vector<bool> quoted;
			std::vector<std::string> fields;
			try {
				fields = split_csv(line, quoted);
			} catch (const Error &e) {
				fail(e.what());
			}
			if (header.empty()) {
				if (fields.size() < 2 || fields[0] != "__table" || fields[1] != "__action") {
					fail("CSV header must start with __table,__action");
				}
				header = fields;
				continue;
			}
			if (fields.size() != header.size()) {
				fail("expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
			}
			rec.table = fields[0];
			rec.action = parse_action(fields[1]);
			const Schema &schema = known_table(rec.table);
			for (const auto &c : schema.columns) {
				auto pos = std::find(header.begin() + 2, header.end(), c.name);
				if (pos == header.end()) {
					fail("header has no column \"" + c.name + "\" of " + rec.table);
				}
				std::size_t i = static_cast<std::size_t>(pos - header.begin());
				try {
					rec.row.push_back(value_from_text(fields[i], quoted[i], c.type));
				} catch (const Error &e) {
					fail("column \"" + c.name + "\": " + e.what());
				}
			}
			for (std::size_t i = 2; i < header.size(); ++i) {
				if (!schema.find({"", header[i]}) && (!fields[i].empty() || quoted[i])) {
					fail("column \"" + header[i] + "\" does not belong to " + rec.table);
				}
			}
		}
		records.push_back(std::move(rec));
	}
	return apply_unlocked(records);
}

std::vector<std::string> Catalog::group_of(const std::string &view) const {
	std::set<std::string> tables;
	std::set<std::string> members = {view};
	bool grew = true;
	while (grew) {
		grew = false;
		for (const auto &m : members) {
			for (const auto &t : views_.at(m).definition.base_tables) {
				tables.insert(t);
			}
		}
		for (const auto &name : view_order_) {
			if (members.count(name)) {
				continue;
			}
			for (const auto &t : views_.at(name).definition.base_tables) {
				if (tables.count(t)) {
					members.insert(name);
					grew = true;
					break;
				}
			}
		}
	}
	std::vector<std::string> out;
	for (const auto &name : view_order_) {
		if (members.count(name)) {
			out.push_back(name);
		}
	}
	return out;
}

RefreshReport Catalog::refresh_view(const std::string &view) {
	std::lock_guard lock(mutex_);
	this->view(view);
	return refresh_group(group_of(view));
}

RefreshReport Catalog::refresh_group(const std::vector<std::string> &group) {
	auto start = Clock::now();
	RefreshReport report;
	report.views = group;
	std::set<std::string> tables;
	for (const auto &v : group) {
		for (const auto &t : views_.at(v).definition.base_tables) {
			tables.insert(t);
		}
	}

	Transaction txn(db_);
	// Net weight per tuple of every base delta, captured before propagation reads the deltas.
	std::map<std::string, std::map<Tuple, std::int64_t>> net;
	for (const auto &t : tables) {
		const Table &delta = db_.table(delta_table_name(t));
		report.delta_rows[t] = delta.row_count;
		report.rows_propagated += delta.row_count;
		auto &weights = net[t];
		for (const auto &[row, count] : delta.rows) {
			Tuple base_row(row.begin(), row.end() - 1);
			weights[base_row] += row.back().as_boolean() ? count : -count;
		}
	}
	if (report.rows_propagated == 0) {
		txn.commit();
		report.total_millis = millis_since(start);
		return report;
	}

	Executor ex(db_);
	for (const auto &name : group) {
		const RegisteredView &v = views_.at(name);
		for (std::size_t i = 0; i < v.propagation.size(); ++i) {
			auto step_start = Clock::now();
			auto r = ex.execute(v.propagation[i]);
			report.steps.push_back({name, i + 1, statement_kind(v.propagation[i]), r.affected, millis_since(step_start)});
		}
		const Schema &vs = v.definition.view_schema;
		if (vs.columns.size() > v.definition.visible_columns) {
			std::size_t count_idx = vs.index_of(HIDDEN_COUNT_COLUMN);
			for (const auto &[row, _] : db_.table(name).rows) {
				if (!row[count_idx].is_null() && row[count_idx].as_integer() < 0) {
					throw Error(ErrorKind::NEGATIVE_STATE,
					            "view " + name + " would hold a negative count for " + tuple_to_string(row));
				}
			}
		}
	}

	auto integrate_start = Clock::now();
	for (const auto &[t, weights] : net) {
		for (const auto &[row, w] : weights) {
			if (w > 0) {
				db_.insert_row(t, row, w);
			} else if (w < 0) {
				db_.erase_row(t, row, -w);
			}
		}
	}
	for (const auto &name : group) {
		for (const auto &stmt : views_.at(name).drain) {
			ex.execute(stmt);
		}
	}
	report.integrate_millis = millis_since(integrate_start);
	txn.commit();
	report.total_millis = millis_since(start);
	return report;
}

ResultSet Catalog::view_result(const RegisteredView &v) const {
	const auto &def = v.definition;
	const Table &t = db_.table(def.name);
	ResultSet out;
	out.schema.name = def.name;
	out.schema.columns.assign(def.view_schema.columns.begin(), def.view_schema.columns.begin() + def.visible_columns);
	bool bag = def.incremental.combine.kind == CombineSpec::Kind::BAG;
	std::size_t count_idx = bag ? def.view_schema.index_of(HIDDEN_COUNT_COLUMN) : 0;
	for (const auto &[row, count] : t.rows) {
		std::int64_t copies = count * (bag ? row[count_idx].as_integer() : 1);
		if (copies <= 0) {
			continue;
		}
		out.rows.emplace_back(Tuple(row.begin(), row.begin() + def.visible_columns), copies);
	}
	return out;
}

ZSetRelation Catalog::view_state(const RegisteredView &v) const {
	ResultSet rs = view_result(v);
	std::map<Tuple, std::int64_t> weights;
	for (const auto &[row, count] : rs.rows) {
		weights[row] += count;
	}
	return from_weights(rs.schema, weights);
}

ZSetRelation Catalog::query_view(const std::string &view, bool lazy) {
	std::lock_guard lock(mutex_);
	const RegisteredView &v = this->view(view);
	if (lazy) {
		refresh_group(group_of(view));
	}
	return view_state(v);
}

ZSetRelation Catalog::base_state(const std::string &table) const {
	std::lock_guard lock(mutex_);
	const Table &t = db_.table(table);
	std::map<Tuple, std::int64_t> weights(t.rows.begin(), t.rows.end());
	if (!dependents(table).empty()) {
		for (const auto &[row, count] : db_.table(delta_table_name(table)).rows) {
			Tuple base_row(row.begin(), row.end() - 1);
			weights[base_row] += row.back().as_boolean() ? count : -count;
		}
	}
	std::erase_if(weights, [](const auto &kv) { return kv.second == 0; });
	return from_weights(t.schema, weights);
}

ResultSet Catalog::read_query(const SelectQuery &query) {
	std::set<std::string> sources;
	collect_sources(query, sources);
	std::set<std::string> fresh;
	for (const auto &name : sources) {
		if (views_.count(name) && config_.refresh == RefreshPolicy::LAZY && !fresh.count(name)) {
			auto group = group_of(name);
			refresh_group(group);
			fresh.insert(group.begin(), group.end());
		}
	}
	Executor ex(db_);
	for (const auto &name : sources) {
		if (views_.count(name)) {
			ex.set_read_override(name, view_result(views_.at(name)));
		} else if (table_role(name) == TableRole::BASE && !dependents(name).empty()) {
			ResultSet logical;
			ZSetRelation state = base_state(name);
			logical.schema = state.schema();
			for (const auto &e : state.entries()) {
				logical.rows.emplace_back(e.tuple, 1);
			}
			ex.set_read_override(name, std::move(logical));
		}
	}
	return ex.query(query);
}

std::vector<ResultSet> Catalog::execute_sql(const std::string &sql) {
	std::lock_guard lock(mutex_);
	std::vector<ResultSet> results;
	for (const auto &item : parse_script(sql)) {
		const Statement &stmt = item.statement;
		if (const auto *ct = std::get_if<CreateTable>(&stmt)) {
			Schema schema;
			schema.name = ct->name;
			for (const auto &c : ct->columns) {
				schema.columns.push_back({c.name, c.type, ""});
			}
			if (ct->if_not_exists && db_.has_table(ct->name)) {
				continue;
			}
			create_base_table(schema);
		} else if (std::holds_alternative<CreateView>(stmt)) {
			register_view(item.text);
		} else if (const auto *ci = std::get_if<CreateIndex>(&stmt)) {
			check_base_table(ci->table);
			Executor(db_).execute(stmt);
		} else if (const auto *iv = std::get_if<InsertValues>(&stmt)) {
			check_base_table(iv->table);
			const Schema &schema = db_.table(iv->table).schema;
			std::vector<ChangeRecord> changes;
			Schema empty;
			ExpressionBinder binder(empty);
			for (const auto &r : iv->rows) {
				std::map<std::string, Value> values;
				std::vector<std::string> cols = iv->columns;
				if (cols.empty()) {
					for (const auto &c : schema.columns) {
						cols.push_back(c.name);
					}
				}
				if (cols.size() != r.size()) {
					throw Error(ErrorKind::BINDER, "INSERT into " + iv->table + " supplies " +
					                                   std::to_string(r.size()) + " values for " +
					                                   std::to_string(cols.size()) + " columns");
				}
				for (std::size_t i = 0; i < cols.size(); ++i) {
					values[cols[i]] = evaluate(binder.bind(r[i]), {});
				}
				for (const auto &c : schema.columns) {
					values.emplace(c.name, Value());
				}
				changes.push_back(make_change(iv->table, ChangeAction::INSERT, values));
			}
			apply_unlocked(changes);
		} else if (const auto *is = std::get_if<InsertSelect>(&stmt)) {
			check_base_table(is->table);
			if (is->conflict != ConflictAction::NONE) {
				throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: upsert into a base table");
			}
			ResultSet rows = read_query(is->query);
			const Schema &schema = db_.table(is->table).schema;
			std::vector<std::string> cols = is->columns;
			if (cols.empty()) {
				for (const auto &c : schema.columns) {
					cols.push_back(c.name);
				}
			}
			if (cols.size() != rows.schema.columns.size()) {
				throw Error(ErrorKind::BINDER, "INSERT into " + is->table + " supplies " +
				                                   std::to_string(rows.schema.columns.size()) + " values for " +
				                                   std::to_string(cols.size()) + " columns");
			}
			std::vector<ChangeRecord> changes;
			for (const auto &[row, count] : rows.rows) {
				std::map<std::string, Value> values;
				for (std::size_t i = 0; i < cols.size(); ++i) {
					values[cols[i]] = row[i];
				}
				for (const auto &c : schema.columns) {
					values.emplace(c.name, Value());
				}
				ChangeRecord rec = make_change(is->table, ChangeAction::INSERT, values);
				for (std::int64_t k = 0; k < count; ++k) {
					changes.push_back(rec);
				}
			}
			apply_unlocked(changes);
		} else if (const auto *del = std::get_if<DeleteStatement>(&stmt)) {
			check_base_table(del->table);
			ZSetRelation state = base_state(del->table);
			Schema scope = state.schema().qualified(del->table);
			std::optional<BoundExpr> pred;
			if (del->where) {
				pred = ExpressionBinder(scope).bind(*del->where);
			}
			std::vector<ChangeRecord> changes;
			for (const auto &e : state.entries()) {
				if (!pred || is_true(evaluate(*pred, e.tuple))) {
					changes.push_back({del->table, ChangeAction::DELETE, e.tuple});
				}
			}
			apply_unlocked(changes);
		} else if (const auto *sel = std::get_if<SelectStatement>(&stmt)) {
			results.push_back(read_query(sel->query));
		}
	}
	return results;
}

void Catalog::save(const std::filesystem::path &dir) const {
	std::lock_guard lock(mutex_);
	std::error_code ec;
	std::filesystem::create_directories(dir / "tables", ec);
	if (!ec) {
		std::filesystem::create_directories(dir / "views", ec);
	}
	if (ec) {
		throw Error(ErrorKind::IO, "cannot create catalog directory " + dir.string() + ": " + ec.message());
	}
	json tables = json::array();
	for (const auto &name : db_.table_names()) {
		const Table &t = db_.table(name);
		json cols = json::array();
		for (const auto &c : t.schema.columns) {
			cols.push_back({{"name", c.name}, {"type", scalar_type_name(c.type)}});
		}
		json indexes = json::array();
		for (const auto &idx : t.indexes) {
			json names = json::array();
			for (auto c : idx.columns) {
				names.push_back(t.schema.columns[c].name);
			}
			indexes.push_back({{"name", idx.name}, {"columns", names}, {"unique", idx.unique}});
		}
		auto role = table_role(name).value_or(TableRole::BASE);
		tables.push_back({{"name", name}, {"role", role_name(role)}, {"columns", cols}, {"indexes", indexes}});

		std::string rows;
		for (const auto &[row, count] : t.rows) {
			json values = json::array();
			for (const auto &v : row) {
				values.push_back(value_to_json(v));
			}
			rows += json {{"row", values}, {"count", count}}.dump() + "\n";
		}
		write_file(dir / "tables" / (name + ".jsonl"), rows);
	}
	json views = json::array();
	for (const auto &name : view_order_) {
		const auto &v = views_.at(name);
		ScriptBundle bundle;
		bundle.ddl_sql = v.ddl_sql;
		bundle.propagate_sql = v.propagate_sql;
		bundle.metadata_json = v.metadata_json;
		write_bundle(v.definition, bundle, dir / "views");
		views.push_back(name);
	}
	const auto &o = config_.compile;
	json root = {
	    {"format", 1},
	    {"config",
	     {{"dialect", dialect_name(o.dialect)},
	      {"mult_column", o.mult_column},
	      {"materialize", materialization_name(o.materialize)},
	      {"emptiness", emptiness_name(o.emptiness)},
	      {"refresh", refresh_policy_name(config_.refresh)}}},
	    {"tables", tables},
	    {"views", views},
	};
	write_file(dir / "catalog.json", root.dump(2) + "\n");
}

std::unique_ptr<Catalog> Catalog::load(const std::filesystem::path &dir) {
	if (!std::filesystem::exists(dir / "catalog.json")) {
		throw Error(ErrorKind::IO, "no catalog at " + dir.string());
	}
	json root;
	try {
		root = json::parse(read_file(dir / "catalog.json"));
		const json &cfg = root.at("config");
		CatalogConfig config;
		config.compile.dialect = parse_dialect(cfg.at("dialect").get<std::string>());
		config.compile.mult_column = cfg.at("mult_column").get<std::string>();
		config.compile.materialize = parse_materialization(cfg.at("materialize").get<std::string>());
		config.compile.emptiness = parse_emptiness(cfg.at("emptiness").get<std::string>());
		config.refresh = parse_refresh_policy(cfg.at("refresh").get<std::string>());
		auto cat = std::make_unique<Catalog>(config);

		for (const auto &t : root.at("tables")) {
			Schema schema;
			schema.name = t.at("name").get<std::string>();
			for (const auto &c : t.at("columns")) {
				schema.columns.push_back(
				    {c.at("name").get<std::string>(), parse_type_name(c.at("type").get<std::string>()), ""});
			}
			cat->db_.create_table(schema);
			cat->roles_[schema.name] = parse_role(t.at("role").get<std::string>());
			std::istringstream rows(read_file(dir / "tables" / (schema.name + ".jsonl")));
			std::string line;
			while (std::getline(rows, line)) {
				if (line.empty()) {
					continue;
				}
				json r = json::parse(line);
				const json &values = r.at("row");
				if (values.size() != schema.columns.size()) {
					throw Error(ErrorKind::CATALOG, "row of " + schema.name + " has the wrong arity");
				}
				Tuple row;
				for (std::size_t i = 0; i < values.size(); ++i) {
					row.push_back(value_from_json(values[i], schema.columns[i].type));
				}
				cat->db_.insert_row(schema.name, row, r.at("count").get<std::int64_t>());
			}
			for (const auto &idx : t.at("indexes")) {
				cat->db_.create_index(idx.at("name").get<std::string>(), schema.name,
				                      idx.at("columns").get<std::vector<std::string>>(), idx.at("unique").get<bool>());
			}
		}

		for (const auto &v : root.at("views")) {
			std::string name = v.get<std::string>();
			std::filesystem::path vdir = dir / "views" / name;
			RegisteredView reg;
			reg.ddl_sql = read_file(vdir / "ddl.sql");
			reg.propagate_sql = read_file(vdir / "propagate.sql");
			reg.metadata_json = read_file(vdir / "metadata.json");
			json meta = json::parse(reg.metadata_json);
			CompileOptions options;
			options.dialect = parse_dialect(meta.at("dialect").get<std::string>());
			options.mult_column = meta.at("mult_column").get<std::string>();
			options.materialize = parse_materialization(meta.at("materialize").get<std::string>());
			options.emptiness = parse_emptiness(meta.at("emptiness").get<std::string>());
			std::string source = meta.at("source_sql").get<std::string>();
			auto script = parse_script(source);
			const auto *cv = script.size() == 1 ? std::get_if<CreateView>(&script[0].statement) : nullptr;
			if (!cv) {
				throw Error(ErrorKind::CATALOG, "metadata of view " + name + " has no view definition");
			}
			reg.definition = define_view(name, source, cv->query, *cat, options);
			reg.propagation = statements_of(reg.propagate_sql);
			for (const auto &d : meta.at("drain")) {
				reg.drain.push_back(statements_of(d.get<std::string>()).at(0));
			}
			cat->view_order_.push_back(name);
			cat->views_.emplace(name, std::move(reg));
		}
		return cat;
	} catch (const json::exception &e) {
		throw Error(ErrorKind::CATALOG, "corrupt catalog at " + dir.string() + ": " + e.what());
	}
}

} // namespace ivmc
