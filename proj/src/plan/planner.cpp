#include "ivmc/plan/plan.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/core/evaluator.hpp"
#include "ivmc/emit/render.hpp"

#include <algorithm>
#include <set>

namespace ivmc {

namespace {

[[noreturn]] void unsupported(const std::string &what) {
	throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: " + what);
}

/// Rewrites every column reference to its fully qualified form.
Expr canonicalize(const Expr &e, const Schema &scope) {
	if (e.kind == ExprKind::COLUMN) {
		const auto &col = scope.columns[scope.resolve(e.column_ref())];
		return Expr::column(col.qualifier, col.name);
	}
	Expr out = e;
	for (auto &a : out.args) {
		a = canonicalize(a, scope);
	}
	return out;
}

void collect_columns(const Expr &e, std::vector<ColumnRef> &out) {
	if (e.kind == ExprKind::COLUMN) {
		out.push_back(e.column_ref());
	}
	for (const auto &a : e.args) {
		collect_columns(a, out);
	}
}

PlanNode plan_scan(const TableRef &ref, const SchemaProvider &catalog) {
	auto schema = catalog.table_schema(ref.name);
	if (!schema) {
		throw Error(ErrorKind::BINDER, "unknown table " + ref.name);
	}
	return PlanNode::scan(ref.name, ref.alias.empty() ? ref.name : ref.alias, *schema);
}

PlanNode plan_join(PlanNode left, PlanNode right, const JoinClause &join) {
	if (join.type == JoinType::LEFT) {
		unsupported("LEFT JOIN in a view definition (only inner equi-joins are maintained)");
	}
	if (left.alias == right.alias) {
		throw Error(ErrorKind::BINDER, "table name or alias " + left.alias + " used twice; give each side an alias");
	}
	PlanNode node;
	node.kind = PlanKind::JOIN;
	node.output.columns = left.output.columns;
	node.output.columns.insert(node.output.columns.end(), right.output.columns.begin(), right.output.columns.end());

	for (const auto &conj : split_conjunction(join.condition)) {
		if (conj.kind != ExprKind::BINARY || conj.op != ExprOp::EQ || !conj.args[0].is_column() ||
		    !conj.args[1].is_column()) {
			unsupported("join condition other than column = column equalities joined by AND");
		}
		const auto &a = node.output.columns[node.output.resolve(conj.args[0].column_ref())];
		const auto &b = node.output.columns[node.output.resolve(conj.args[1].column_ref())];
		JoinKey key;
		if (a.qualifier == left.alias && b.qualifier == right.alias) {
			key = {{a.qualifier, a.name}, {b.qualifier, b.name}};
		} else if (a.qualifier == right.alias && b.qualifier == left.alias) {
			key = {{b.qualifier, b.name}, {a.qualifier, a.name}};
		} else {
			unsupported("join equality whose columns come from the same table");
		}
		auto lt = left.output.columns[left.output.resolve(key.left)].type;
		auto rt = right.output.columns[right.output.resolve(key.right)].type;
		if (lt != rt && !(is_numeric(lt) && is_numeric(rt))) {
			throw Error(ErrorKind::TYPE, "join key " + key.left.to_string() + " = " + key.right.to_string() +
			                                 " compares " + scalar_type_name(lt) + " with " + scalar_type_name(rt));
		}
		node.join_keys.push_back(std::move(key));
	}
	node.children.push_back(std::move(left));
	node.children.push_back(std::move(right));
	return node;
}

std::string default_aggregate_name(const Expr &call) {
	const Expr &arg = call.args[0];
	if (arg.kind == ExprKind::STAR) {
		return call.name + "_star";
	}
	return call.name + "_" + arg.name;
}

void check_unique_output(const Schema &schema) {
	std::set<std::string> seen;
	for (const auto &c : schema.columns) {
		if (!seen.insert(c.name).second) {
			throw Error(ErrorKind::BINDER, "duplicate output column " + c.name + "; add an alias");
		}
	}
}

PlanNode plan_project(PlanNode input, const SelectCore &core) {
	PlanNode node;
	node.kind = PlanKind::PROJECT;
	ExpressionBinder binder(input.output);
	for (std::size_t i = 0; i < core.items.size(); ++i) {
		const auto &item = core.items[i];
		if (item.expr.kind == ExprKind::STAR) {
			for (const auto &col : input.output.columns) {
				node.items.push_back({Expr::column(col.qualifier, col.name), col.name});
				node.output.columns.push_back({col.name, col.type, ""});
			}
			continue;
		}
		Expr expr = canonicalize(item.expr, input.output);
		auto bound = binder.bind(expr);
		std::string name = item.alias;
		if (name.empty()) {
			name = expr.is_column() ? expr.name : "expr_" + std::to_string(i + 1);
		}
		if (bound.type == ScalarType::NULL_TYPE) {
			throw Error(ErrorKind::TYPE, "cannot infer the type of output column " + name);
		}
		node.items.push_back({std::move(expr), name});
		node.output.columns.push_back({name, bound.type, ""});
	}
	check_unique_output(node.output);
	node.children.push_back(std::move(input));
	return node;
}

PlanNode plan_aggregate(PlanNode input, const SelectCore &core) {
	PlanNode node;
	node.kind = PlanKind::AGGREGATE;
	const Schema &in = input.output;

	std::vector<ColumnRef> grouped;
	for (const auto &g : core.group_by) {
		if (!g.is_column()) {
			unsupported("GROUP BY on an expression (group by plain columns)");
		}
		Expr c = canonicalize(g, in);
		if (std::find(grouped.begin(), grouped.end(), c.column_ref()) != grouped.end()) {
			throw Error(ErrorKind::BINDER, "column " + c.column_ref().to_string() + " listed twice in GROUP BY");
		}
		grouped.push_back(c.column_ref());
	}

	bool seen_aggregate = false;
	std::vector<Column> key_columns;
	std::vector<Column> agg_columns;
	for (const auto &item : core.items) {
		if (item.expr.kind == ExprKind::STAR) {
			throw Error(ErrorKind::BINDER, "aggregate misuse: * in an aggregate select list");
		}
		Expr expr = canonicalize(item.expr, in);
		if (expr.is_column()) {
			auto ref = expr.column_ref();
			if (std::find(grouped.begin(), grouped.end(), ref) == grouped.end()) {
				throw Error(ErrorKind::BINDER, "aggregate misuse: column " + ref.to_string() +
				                                   " must appear in GROUP BY or inside an aggregate function");
			}
			if (seen_aggregate) {
				unsupported("group key " + ref.to_string() + " listed after an aggregate (list group keys first)");
			}
			if (std::find(node.group_keys.begin(), node.group_keys.end(), ref) != node.group_keys.end()) {
				unsupported("group key " + ref.to_string() + " selected twice");
			}
			std::string name = item.alias.empty() ? ref.name : item.alias;
			node.group_keys.push_back(ref);
			node.key_names.push_back(name);
			key_columns.push_back({name, in.columns[in.resolve(ref)].type, ""});
			continue;
		}
		if (is_aggregate_call(expr)) {
			const Expr &arg = expr.args[0];
			AggregateSpec spec;
			spec.kind = expr.name == "sum" ? AggregateKind::SUM : AggregateKind::COUNT;
			ScalarType type = ScalarType::INTEGER;
			if (arg.kind == ExprKind::STAR) {
				if (spec.kind == AggregateKind::SUM) {
					throw Error(ErrorKind::BINDER, "SUM(*) is not valid");
				}
			} else if (arg.is_column()) {
				spec.input = arg.column_ref();
				auto t = in.columns[in.resolve(*spec.input)].type;
				if (spec.kind == AggregateKind::SUM) {
					if (!is_numeric(t)) {
						throw Error(ErrorKind::TYPE, "SUM over non-numeric column " + spec.input->to_string());
					}
					type = t;
				}
			} else if (contains_aggregate(arg)) {
				throw Error(ErrorKind::BINDER, "aggregate misuse: nested aggregate");
			} else {
				unsupported("aggregate over an expression (aggregate a plain column)");
			}
			spec.output = item.alias.empty() ? default_aggregate_name(expr) : item.alias;
			agg_columns.push_back({spec.output, type, ""});
			node.aggregates.push_back(std::move(spec));
			seen_aggregate = true;
			continue;
		}
		if (contains_aggregate(expr)) {
			unsupported("expression over an aggregate result");
		}
		std::vector<ColumnRef> refs;
		collect_columns(expr, refs);
		for (const auto &ref : refs) {
			if (std::find(grouped.begin(), grouped.end(), ref) == grouped.end()) {
				throw Error(ErrorKind::BINDER, "aggregate misuse: column " + ref.to_string() +
				                                   " must appear in GROUP BY or inside an aggregate function");
			}
		}
		unsupported("computed expression in an aggregate select list");
	}
	for (const auto &g : grouped) {
		if (std::find(node.group_keys.begin(), node.group_keys.end(), g) == node.group_keys.end()) {
			unsupported("GROUP BY column " + g.to_string() + " missing from the select list");
		}
	}
	node.output.columns = key_columns;
	node.output.columns.insert(node.output.columns.end(), agg_columns.begin(), agg_columns.end());
	check_unique_output(node.output);
	node.children.push_back(std::move(input));
	return node;
}

std::string schema_text(const Schema &schema) {
	std::string out = "(";
	for (std::size_t i = 0; i < schema.columns.size(); ++i) {
		const auto &c = schema.columns[i];
		out += (i ? ", " : "") + (c.qualifier.empty() ? c.name : c.qualifier + "." + c.name) + " " +
		       scalar_type_name(c.type);
	}
	return out + ")";
}

const char *join_mult_name(JoinMultiplicity m) {
	switch (m) {
	case JoinMultiplicity::NONE:
		return "none";
	case JoinMultiplicity::LEFT:
		return "left";
	case JoinMultiplicity::RIGHT:
		return "right";
	case JoinMultiplicity::PRODUCT:
		return "product";
	}
	return "?";
}

void serialize_node(const PlanNode &node, int depth, std::string &out) {
	out.append(static_cast<std::size_t>(depth) * 2, ' ');
	switch (node.kind) {
	case PlanKind::SCAN:
		out += "Scan " + node.table + " AS " + node.alias;
		if (node.delta) {
			out += " delta_of=" + node.base_table;
		}
		break;
	case PlanKind::FILTER:
		out += "Filter " + render_expr(node.predicate);
		break;
	case PlanKind::PROJECT: {
		out += "Project [";
		for (std::size_t i = 0; i < node.items.size(); ++i) {
			out += (i ? ", " : "") + render_expr(node.items[i].expr) + " AS " + node.items[i].name;
		}
		out += "]";
		break;
	}
	case PlanKind::AGGREGATE: {
		out += "Aggregate keys=[";
		for (std::size_t i = 0; i < node.group_keys.size(); ++i) {
			out += (i ? ", " : "") + node.group_keys[i].to_string() + " AS " + node.key_names[i];
		}
		out += "] aggs=[";
		for (std::size_t i = 0; i < node.aggregates.size(); ++i) {
			const auto &a = node.aggregates[i];
			out += (i ? ", " : "") + std::string(aggregate_kind_name(a.kind)) + "(" +
			       (a.input ? a.input->to_string() : "*") + ") AS " + a.output;
		}
		out += "]";
		break;
	}
	case PlanKind::JOIN: {
		out += "Join [";
		for (std::size_t i = 0; i < node.join_keys.size(); ++i) {
			out += (i ? " AND " : "") + node.join_keys[i].left.to_string() + " = " +
			       node.join_keys[i].right.to_string();
		}
		out += "]";
		if (node.join_mult != JoinMultiplicity::NONE) {
			out += std::string(" mult=") + join_mult_name(node.join_mult);
		}
		break;
	}
	case PlanKind::UNION_ALL:
		out += "UnionAll";
		break;
	}
	out += " -> " + schema_text(node.output) + "\n";
	for (const auto &c : node.children) {
		serialize_node(c, depth + 1, out);
	}
}

QueryClass classify_pipeline(const PlanNode &root) {
	if (root.kind != PlanKind::PROJECT && root.kind != PlanKind::AGGREGATE) {
		unsupported("plan root must be a projection or an aggregation");
	}
	const PlanNode *node = &root.child();
	if (node->kind == PlanKind::FILTER) {
		node = &node->child();
	}
	bool join = false;
	if (node->kind == PlanKind::JOIN) {
		for (const auto &c : node->children) {
			if (c.kind != PlanKind::SCAN) {
				unsupported("join input other than a table scan");
			}
		}
		join = true;
	} else if (node->kind != PlanKind::SCAN) {
		unsupported("plan shape outside Scan|Join -> [Filter] -> Project|Aggregate");
	}
	if (root.kind == PlanKind::PROJECT) {
		return join ? QueryClass::JOIN : QueryClass::PROJECTION_FILTER;
	}
	if (root.group_keys.empty()) {
		unsupported("aggregate without GROUP BY (maintained aggregates need at least one group key)");
	}
	if (root.aggregates.empty()) {
		unsupported("GROUP BY without SUM or COUNT");
	}
	return join ? QueryClass::JOIN_AGGREGATE : QueryClass::GROUP_AGGREGATE;
}

void collect_scans(const PlanNode &node, std::vector<std::string> &out) {
	if (node.kind == PlanKind::SCAN) {
		if (std::find(out.begin(), out.end(), node.base_table) == out.end()) {
			out.push_back(node.base_table);
		}
	}
	for (const auto &c : node.children) {
		collect_scans(c, out);
	}
}

TableRef table_ref_of(const PlanNode &scan) {
	return {scan.table, scan.alias == scan.table ? "" : scan.alias};
}

SelectCore core_of(const PlanNode &root) {
	SelectCore core;
	const PlanNode *node = &root.child();
	if (node->kind == PlanKind::FILTER) {
		core.where = node->predicate;
		node = &node->child();
	}
	if (node->kind == PlanKind::JOIN) {
		core.from = table_ref_of(node->children[0]);
		JoinClause join;
		join.table = table_ref_of(node->children[1]);
		std::vector<Expr> terms;
		for (const auto &k : node->join_keys) {
			terms.push_back(Expr::binary(ExprOp::EQ, Expr::column(k.left), Expr::column(k.right)));
		}
		join.condition = conjunction(std::move(terms));
		core.join = std::move(join);
	} else {
		core.from = table_ref_of(*node);
	}
	if (root.kind == PlanKind::PROJECT) {
		for (const auto &item : root.items) {
			core.items.push_back({item.expr, item.name});
		}
		return core;
	}
	for (std::size_t i = 0; i < root.group_keys.size(); ++i) {
		const auto &k = root.group_keys[i];
		core.items.push_back({Expr::column(k), root.key_names[i] == k.name ? "" : root.key_names[i]});
		core.group_by.push_back(Expr::column(k));
	}
	for (const auto &a : root.aggregates) {
		Expr arg = a.input ? Expr::column(*a.input) : Expr::star();
		core.items.push_back({Expr::function(a.kind == AggregateKind::SUM ? "sum" : "count", {arg}), a.output});
	}
	return core;
}

} // namespace

PlanNode PlanNode::scan(std::string table, std::string alias, Schema table_schema) {
	PlanNode node;
	node.kind = PlanKind::SCAN;
	node.base_table = table;
	node.table = std::move(table);
	node.alias = std::move(alias);
	node.output = table_schema.qualified(node.alias);
	node.output.name.clear();
	node.output.key.clear();
	return node;
}

const char *query_class_name(QueryClass c) {
	switch (c) {
	case QueryClass::PROJECTION_FILTER:
		return "PROJECTION_FILTER";
	case QueryClass::GROUP_AGGREGATE:
		return "GROUP_AGGREGATE";
	case QueryClass::JOIN:
		return "JOIN";
	case QueryClass::JOIN_AGGREGATE:
		return "JOIN_AGGREGATE";
	}
	return "?";
}

QueryClass parse_query_class(const std::string &name) {
	for (auto c : {QueryClass::PROJECTION_FILTER, QueryClass::GROUP_AGGREGATE, QueryClass::JOIN,
	               QueryClass::JOIN_AGGREGATE}) {
		if (name == query_class_name(c)) {
			return c;
		}
	}
	throw Error(ErrorKind::CATALOG, "unknown query class " + name);
}

std::optional<Schema> MapSchemaProvider::table_schema(const std::string &name) const {
	auto it = tables_.find(name);
	if (it == tables_.end()) {
		return std::nullopt;
	}
	return it->second;
}

MapSchemaProvider schemas_from_statements(const std::vector<Statement> &stmts) {
	MapSchemaProvider provider;
	for (const auto &s : stmts) {
		if (const auto *t = std::get_if<CreateTable>(&s)) {
			Schema schema;
			schema.name = t->name;
			for (const auto &c : t->columns) {
				schema.columns.push_back({c.name, c.type, ""});
			}
			schema.check_unique_names();
			provider.add(std::move(schema));
		}
	}
	return provider;
}

PlanNode plan_select(const SelectQuery &query, const SchemaProvider &catalog) {
	if (!query.ctes.empty()) {
		unsupported("WITH in a view definition");
	}
	if (query.cores.size() != 1) {
		unsupported("UNION ALL in a view definition");
	}
	const SelectCore &core = query.cores[0];
	PlanNode input = plan_scan(core.from, catalog);
	if (core.join) {
		input = plan_join(std::move(input), plan_scan(core.join->table, catalog), *core.join);
	}
	if (core.where) {
		Expr predicate = canonicalize(*core.where, input.output);
		if (contains_aggregate(predicate)) {
			throw Error(ErrorKind::BINDER, "aggregate misuse: aggregate function in WHERE");
		}
		auto bound = ExpressionBinder(input.output).bind(predicate);
		if (bound.type != ScalarType::BOOLEAN && bound.type != ScalarType::NULL_TYPE) {
			throw Error(ErrorKind::TYPE, "WHERE predicate must be BOOLEAN");
		}
		PlanNode filter;
		filter.kind = PlanKind::FILTER;
		filter.output = input.output;
		filter.predicate = std::move(predicate);
		filter.children.push_back(std::move(input));
		input = std::move(filter);
	}
	bool aggregate = !core.group_by.empty();
	for (const auto &item : core.items) {
		aggregate = aggregate || contains_aggregate(item.expr);
	}
	return aggregate ? plan_aggregate(std::move(input), core) : plan_project(std::move(input), core);
}

QueryClass classify(const PlanNode &plan) {
	if (plan.kind != PlanKind::UNION_ALL) {
		return classify_pipeline(plan);
	}
	if (plan.children.empty()) {
		unsupported("empty union");
	}
	QueryClass first = classify_pipeline(plan.children[0]);
	for (const auto &c : plan.children) {
		if (classify_pipeline(c) != first) {
			unsupported("union of differently shaped plans");
		}
	}
	return first;
}

std::vector<std::string> scanned_tables(const PlanNode &plan) {
	std::vector<std::string> out;
	collect_scans(plan, out);
	return out;
}

std::string serialize_plan(const PlanNode &plan) {
	std::string out;
	serialize_node(plan, 0, out);
	return out;
}

SelectQuery plan_to_query(const PlanNode &plan) {
	SelectQuery q;
	if (plan.kind == PlanKind::UNION_ALL) {
		for (const auto &c : plan.children) {
			q.cores.push_back(core_of(c));
		}
	} else {
		classify_pipeline(plan);
		q.cores.push_back(core_of(plan));
	}
	return q;
}

} // namespace ivmc
