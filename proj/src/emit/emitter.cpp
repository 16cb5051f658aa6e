#include "ivmc/emit/emitter.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/sql/parser.hpp"

#include <fstream>
#include <json.hpp>

namespace ivmc {

namespace {

using json = nlohmann::ordered_json;

const char *IVM_CTE = "ivm_cte";
const char *IVM_DELTA_CTE = "ivm_delta";

struct Lowering {
	bool single_table = true;
	std::string mult;
	Expr mult_expr;

	Expr lower(const Expr &e) const {
		if (e.kind == ExprKind::COLUMN) {
			if (single_table) {
				return Expr::column("", e.name);
			}
			if (e.qualifier.empty() && e.name == mult) {
				return mult_expr;
			}
			return e;
		}
		Expr out = e;
		for (auto &a : out.args) {
			a = lower(a);
		}
		return out;
	}
};

std::string alias_for(const Expr &lowered, const std::string &name) {
	return lowered.is_column() && lowered.name == name ? "" : name;
}

TableRef table_ref(const PlanNode &scan, bool single_table) {
	if (single_table || scan.alias == scan.table) {
		return {scan.table, ""};
	}
	return {scan.table, scan.alias};
}

SelectCore lower_pipeline(const PlanNode &root, const std::string &mult) {
	if (root.kind != PlanKind::PROJECT && root.kind != PlanKind::AGGREGATE) {
		throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: no SQL lowering for this plan root");
	}
	SelectCore core;
	const PlanNode *node = &root.child();
	const PlanNode *filter = nullptr;
	if (node->kind == PlanKind::FILTER) {
		filter = node;
		node = &node->child();
	}
	Lowering lw;
	lw.mult = mult;
	if (node->kind == PlanKind::JOIN) {
		lw.single_table = false;
		const auto &l = node->children[0];
		const auto &r = node->children[1];
		switch (node->join_mult) {
		case JoinMultiplicity::LEFT:
			lw.mult_expr = Expr::column(l.alias, mult);
			break;
		case JoinMultiplicity::RIGHT:
			lw.mult_expr = Expr::column(r.alias, mult);
			break;
		case JoinMultiplicity::PRODUCT:
			lw.mult_expr = Expr::binary(ExprOp::EQ, Expr::column(l.alias, mult), Expr::column(r.alias, mult));
			break;
		case JoinMultiplicity::NONE:
			throw Error(ErrorKind::INTERNAL, "join in an incremental plan without a multiplicity source");
		}
		core.from = table_ref(l, false);
		JoinClause join;
		join.table = table_ref(r, false);
		std::vector<Expr> terms;
		for (const auto &k : node->join_keys) {
			terms.push_back(Expr::binary(ExprOp::EQ, Expr::column(k.left), Expr::column(k.right)));
		}
		join.condition = conjunction(std::move(terms));
		core.join = std::move(join);
	} else if (node->kind == PlanKind::SCAN) {
		core.from = table_ref(*node, true);
	} else {
		throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: no SQL lowering for this plan shape");
	}
	if (filter) {
		core.where = lw.lower(filter->predicate);
	}
	if (root.kind == PlanKind::PROJECT) {
		for (const auto &item : root.items) {
			Expr e = lw.lower(item.expr);
			std::string alias = alias_for(e, item.name);
			core.items.push_back({std::move(e), std::move(alias)});
		}
		return core;
	}
	std::optional<SelectItem> mult_item;
	for (std::size_t i = 0; i < root.group_keys.size(); ++i) {
		Expr e = lw.lower(Expr::column(root.group_keys[i]));
		core.group_by.push_back(e);
		std::string alias = alias_for(e, root.key_names[i]);
		if (root.key_names[i] == mult) {
			mult_item = SelectItem {std::move(e), std::move(alias)};
		} else {
			core.items.push_back({std::move(e), std::move(alias)});
		}
	}
	for (const auto &a : root.aggregates) {
		Expr arg = a.input ? lw.lower(Expr::column(*a.input)) : Expr::star();
		core.items.push_back({Expr::function(a.kind == AggregateKind::SUM ? "sum" : "count", {arg}), a.output});
	}
	if (mult_item) {
		core.items.push_back(std::move(*mult_item));
	}
	return core;
}

SelectQuery delta_query(const ViewDefinition &view) {
	SelectQuery q;
	const auto &plan = view.incremental.plan;
	if (plan.kind == PlanKind::UNION_ALL) {
		for (const auto &c : plan.children) {
			q.cores.push_back(lower_pipeline(c, view.incremental.mult_column));
		}
	} else {
		q.cores.push_back(lower_pipeline(plan, view.incremental.mult_column));
	}
	return q;
}

/// Maintained value columns merged by the upsert.
std::vector<std::string> value_columns(const ViewDefinition &view) {
	std::vector<std::string> out;
	for (std::size_t i = view.key_columns.size(); i < view.view_schema.columns.size(); ++i) {
		out.push_back(view.view_schema.columns[i].name);
	}
	return out;
}

bool is_bag(const ViewDefinition &view) {
	return view.incremental.combine.kind == CombineSpec::Kind::BAG;
}

/// Step 2: CTE with CASE-negated per-group sums, LEFT JOIN against the view, upsert.
Statement merge_statement(const ViewDefinition &view) {
	const std::string &mult = view.options.mult_column;
	const std::string dv = view.delta_view_table();
	const auto values = value_columns(view);

	SelectQuery query;
	std::string source = dv;
	if (view.options.materialize == Materialization::NONE) {
		query.ctes.push_back({IVM_DELTA_CTE, delta_query(view)});
		source = IVM_DELTA_CTE;
	}

	SelectCore cte;
	for (const auto &k : view.key_columns) {
		cte.items.push_back({Expr::column("", k), ""});
		cte.group_by.push_back(Expr::column("", k));
	}
	Expr is_deletion = Expr::binary(ExprOp::EQ, Expr::column("", mult), Expr::literal(Value(false)));
	for (const auto &v : values) {
		Expr positive = is_bag(view) ? Expr::literal(Value(std::int64_t {1})) : Expr::column("", v);
		Expr negative = is_bag(view) ? Expr::literal(Value(std::int64_t {-1})) : Expr::unary(ExprOp::NEG, positive);
		Expr signed_value = Expr::case_when({{is_deletion, negative}}, &positive);
		cte.items.push_back({Expr::function("sum", {signed_value}), v});
	}
	cte.from = {source, ""};
	SelectQuery cte_query;
	cte_query.cores.push_back(std::move(cte));
	query.ctes.push_back({IVM_CTE, std::move(cte_query)});

	SelectCore outer;
	std::vector<Expr> on;
	for (const auto &k : view.key_columns) {
		outer.items.push_back({Expr::column(dv, k), ""});
		outer.group_by.push_back(Expr::column(dv, k));
		on.push_back(Expr::binary(ExprOp::EQ, Expr::column(view.name, k), Expr::column(dv, k)));
	}
	for (const auto &v : values) {
		Expr existing = Expr::function("coalesce", {Expr::column(view.name, v), Expr::literal(Value(std::int64_t {0}))});
		outer.items.push_back(
		    {Expr::function("sum", {Expr::binary(ExprOp::ADD, existing, Expr::column(dv, v))}), ""});
	}
	outer.from = {IVM_CTE, dv};
	outer.join = JoinClause {JoinType::LEFT, {view.name, ""}, conjunction(std::move(on))};
	query.cores.push_back(std::move(outer));

	InsertSelect upsert;
	upsert.table = view.name;
	upsert.query = std::move(query);
	if (view.options.dialect == Dialect::POSTGRES_STYLE) {
		upsert.conflict = ConflictAction::UPDATE;
		upsert.conflict_keys = view.key_columns;
		for (const auto &v : values) {
			upsert.updates.push_back({v, Expr::column("excluded", v)});
		}
	} else {
		upsert.conflict = ConflictAction::REPLACE;
	}
	return upsert;
}

/// Step 3: drop rows that no longer exist.
Statement cleanup_statement(const ViewDefinition &view) {
	DeleteStatement del;
	del.table = view.name;
	const Expr zero = Expr::literal(Value(std::int64_t {0}));
	if (is_bag(view) || view.options.emptiness == EmptinessMode::SOUND) {
		del.where = Expr::binary(ExprOp::EQ, Expr::column("", HIDDEN_COUNT_COLUMN), zero);
		return del;
	}
	std::optional<Expr> cond;
	for (std::size_t i = view.key_columns.size(); i < view.visible_columns; ++i) {
		Expr term = Expr::binary(ExprOp::EQ, Expr::column("", view.view_schema.columns[i].name), zero);
		cond = cond ? Expr::binary(ExprOp::OR, std::move(*cond), std::move(term)) : std::move(term);
	}
	del.where = std::move(cond);
	return del;
}

SelectQuery initial_load_query(const ViewDefinition &view) {
	SelectQuery q = plan_to_query(view.plan);
	auto &core = q.cores[0];
	bool hidden_count = view.view_schema.columns.size() > view.visible_columns;
	if (is_bag(view)) {
		for (const auto &item : core.items) {
			core.group_by.push_back(item.expr);
		}
	}
	if (hidden_count) {
		core.items.push_back({Expr::function("count", {Expr::star()}), HIDDEN_COUNT_COLUMN});
	}
	return q;
}

CreateTable create_table(const std::string &name, const Schema &schema, bool if_not_exists) {
	CreateTable t;
	t.name = name;
	t.if_not_exists = if_not_exists;
	for (const auto &c : schema.columns) {
		t.columns.push_back({c.name, c.type});
	}
	return t;
}

json columns_json(const Schema &schema, std::size_t visible) {
	json cols = json::array();
	for (std::size_t i = 0; i < schema.columns.size(); ++i) {
		cols.push_back({{"name", schema.columns[i].name},
		                {"type", scalar_type_name(schema.columns[i].type)},
		                {"hidden", i >= visible}});
	}
	return cols;
}

std::string script_text(const std::vector<Statement> &stmts, Dialect dialect) {
	return render_script(stmts, dialect);
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

class OverlayProvider : public SchemaProvider {
public:
	explicit OverlayProvider(const SchemaProvider &inner) : inner_(inner) {
	}
	void add(Schema s) {
		extra_.add(std::move(s));
	}
	std::optional<Schema> table_schema(const std::string &name) const override {
		if (auto s = extra_.table_schema(name)) {
			return s;
		}
		return inner_.table_schema(name);
	}

private:
	const SchemaProvider &inner_;
	MapSchemaProvider extra_;
};

} // namespace

const char *materialization_name(Materialization m) {
	return m == Materialization::NONE ? "none" : "eager";
}

Materialization parse_materialization(std::string_view name) {
	if (name == "none") {
		return Materialization::NONE;
	}
	if (name == "eager") {
		return Materialization::EAGER;
	}
	throw Error(ErrorKind::UNSUPPORTED, "unknown materialization '" + std::string(name) + "'");
}

const char *emptiness_name(EmptinessMode m) {
	return m == EmptinessMode::PAPER ? "paper" : "sound";
}

EmptinessMode parse_emptiness(std::string_view name) {
	if (name == "paper") {
		return EmptinessMode::PAPER;
	}
	if (name == "sound") {
		return EmptinessMode::SOUND;
	}
	throw Error(ErrorKind::UNSUPPORTED, "unknown emptiness mode '" + std::string(name) + "'");
}

ViewDefinition define_view(const std::string &name, const std::string &source_sql, const SelectQuery &query,
                           const SchemaProvider &catalog, const CompileOptions &options) {
	ViewDefinition view;
	view.name = name;
	view.source_sql = source_sql;
	view.query = query;
	view.options = options;
	view.plan = plan_select(query, catalog);
	view.query_class = classify(view.plan);
	view.base_tables = scanned_tables(view.plan);
	for (const auto &c : view.plan.output.columns) {
		if (c.name == options.mult_column || c.name == HIDDEN_COUNT_COLUMN) {
			throw Error(ErrorKind::COLLISION, "view column name " + c.name + " is reserved for view maintenance");
		}
	}

	WithDeltaTables with_deltas(catalog, options.mult_column);
	PlanNode bound = bind_deltas(view.plan, with_deltas, options.mult_column);
	view.incremental = rewrite_incremental(bound, options.emptiness);

	view.view_schema.name = name;
	for (const auto &c : view.plan.output.columns) {
		view.view_schema.columns.push_back({c.name, c.type, ""});
	}
	view.visible_columns = view.view_schema.columns.size();
	bool bag = view.incremental.combine.kind == CombineSpec::Kind::BAG;
	if (bag || options.emptiness == EmptinessMode::SOUND) {
		view.view_schema.columns.push_back({HIDDEN_COUNT_COLUMN, ScalarType::INTEGER, ""});
	}
	if (bag) {
		for (const auto &c : view.plan.output.columns) {
			view.key_columns.push_back(c.name);
		}
	} else {
		view.key_columns = view.plan.key_names;
	}
	return view;
}

std::vector<Statement> lower_to_ast(const ViewDefinition &view) {
	std::vector<Statement> out;
	if (view.has_delta_view_table()) {
		InsertSelect fill;
		fill.table = view.delta_view_table();
		fill.query = delta_query(view);
		out.push_back(std::move(fill));
	}
	out.push_back(merge_statement(view));
	out.push_back(cleanup_statement(view));
	return out;
}

std::vector<Statement> emit_ddl(const ViewDefinition &view, const SchemaProvider &existing) {
	for (const auto &name : {view.name, view.delta_view_table()}) {
		if (existing.table_schema(name)) {
			throw Error(ErrorKind::COLLISION, "object " + name + " already exists");
		}
	}
	std::vector<Statement> out;
	for (const auto &t : view.base_tables) {
		auto base = existing.table_schema(t);
		if (!base) {
			throw Error(ErrorKind::BINDER, "unknown table " + t);
		}
		base->name = t;
		auto delta = delta_table_schema(*base, view.options.mult_column);
		out.push_back(create_table(delta.name, delta, true));
	}
	out.push_back(create_table(view.name, view.view_schema, false));
	if (view.has_delta_view_table()) {
		Schema dv;
		for (const auto &c : view.incremental.plan.output.columns) {
			dv.columns.push_back({c.name, c.type, ""});
		}
		out.push_back(create_table(view.delta_view_table(), dv, false));
	}
	InsertSelect load;
	load.table = view.name;
	load.query = initial_load_query(view);
	out.push_back(std::move(load));
	CreateIndex index;
	index.name = view.name + "_ivm_key";
	index.table = view.name;
	index.columns = view.key_columns;
	index.unique = true;
	out.push_back(std::move(index));
	return out;
}

std::vector<Statement> emit_propagation(const ViewDefinition &view) {
	auto out = lower_to_ast(view);
	if (view.has_delta_view_table()) {
		out.push_back(DeleteStatement {view.delta_view_table(), std::nullopt});
	}
	return out;
}

std::vector<Statement> emit_drain(const ViewDefinition &view) {
	std::vector<Statement> out;
	for (const auto &t : view.base_tables) {
		out.push_back(DeleteStatement {delta_table_name(t), std::nullopt});
	}
	return out;
}

ScriptBundle build_bundle(const ViewDefinition &view, const SchemaProvider &existing) {
	ScriptBundle b;
	b.ddl = emit_ddl(view, existing);
	b.propagation = emit_propagation(view);
	b.drain = emit_drain(view);
	Dialect d = view.options.dialect;

	b.ddl_sql = "-- maintenance objects for view " + view.name + " (dialect " + dialect_name(d) + ")\n" +
	            script_text(b.ddl, d);
	b.propagate_sql = "-- propagation script for view " + view.name + " (dialect " + dialect_name(d) +
	                  ")\n-- run as one transaction:\n-- BEGIN;\n" + script_text(b.propagation, d) + "-- COMMIT;\n";

	json drain = json::array();
	for (const auto &s : b.drain) {
		drain.push_back(render_statement(s, d));
	}
	json deltas = json::array();
	for (const auto &t : view.base_tables) {
		deltas.push_back(delta_table_name(t));
	}
	json meta = {
	    {"view", view.name},
	    {"source_sql", view.source_sql},
	    {"query_class", query_class_name(view.query_class)},
	    {"dialect", dialect_name(d)},
	    {"mult_column", view.options.mult_column},
	    {"materialize", materialization_name(view.options.materialize)},
	    {"emptiness", emptiness_name(view.options.emptiness)},
	    {"base_tables", view.base_tables},
	    {"delta_tables", deltas},
	    {"delta_view_table", view.has_delta_view_table() ? json(view.delta_view_table()) : json(nullptr)},
	    {"view_columns", columns_json(view.view_schema, view.visible_columns)},
	    {"key_columns", view.key_columns},
	    {"plan", serialize_plan(view.plan)},
	    {"incremental_plan", serialize_plan(view.incremental.plan)},
	    {"drain", drain},
	    {"files", {{"ddl", "ddl.sql"}, {"propagate", "propagate.sql"}}},
	};
	b.metadata_json = meta.dump(2) + "\n";
	return b;
}

std::vector<std::filesystem::path> write_bundle(const ViewDefinition &view, const ScriptBundle &bundle,
                                                const std::filesystem::path &dir) {
	std::filesystem::path target = dir / view.name;
	std::error_code ec;
	std::filesystem::create_directories(target, ec);
	if (ec) {
		throw Error(ErrorKind::IO, "cannot create " + target.string() + ": " + ec.message());
	}
	std::vector<std::filesystem::path> paths = {target / "ddl.sql", target / "propagate.sql",
	                                            target / "metadata.json"};
	write_file(paths[0], bundle.ddl_sql);
	write_file(paths[1], bundle.propagate_sql);
	write_file(paths[2], bundle.metadata_json);
	return paths;
}

std::vector<CompiledView> compile_views(const std::string &schema_sql, const std::string &views_sql,
                                        const CompileOptions &options) {
	auto schema_script = parse_script(schema_sql);
	auto view_script = parse_script(views_sql);
	std::vector<Statement> all;
	for (const auto *script : {&schema_script, &view_script}) {
		for (const auto &s : *script) {
			all.push_back(s.statement);
		}
	}
	MapSchemaProvider tables = schemas_from_statements(all);
	OverlayProvider known(tables);

	std::vector<CompiledView> out;
	for (const auto *script : {&schema_script, &view_script}) {
		for (const auto &s : *script) {
			const auto *cv = std::get_if<CreateView>(&s.statement);
			if (!cv) {
				continue;
			}
			CompiledView compiled {define_view(cv->name, s.text, cv->query, known, options), {}};
			compiled.bundle = build_bundle(compiled.view, known);
			known.add(compiled.view.view_schema);
			Schema dv;
			dv.name = compiled.view.delta_view_table();
			known.add(dv);
			out.push_back(std::move(compiled));
		}
	}
	return out;
}

} // namespace ivmc
