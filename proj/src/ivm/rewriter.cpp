#include "ivmc/ivm/rewriter.hpp"

#include "ivmc/core/error.hpp"

#include <algorithm>

namespace ivmc {

namespace {

const Column *mult_column_of(const Schema &schema, const std::string &mult) {
	for (const auto &c : schema.columns) {
		if (c.name == mult) {
			return &c;
		}
	}
	return nullptr;
}

Schema strip(const Schema &schema, const std::string &mult) {
	Schema out = schema;
	std::erase_if(out.columns, [&](const Column &c) { return c.name == mult; });
	return out;
}

/// Aggregate output with the multiplicity key moved behind the aggregates.
Schema aggregate_output(const PlanNode &node, const Schema &input, const std::string &mult) {
	Schema out;
	for (std::size_t i = 0; i < node.group_keys.size(); ++i) {
		if (node.group_keys[i].name == mult) {
			continue;
		}
		out.columns.push_back({node.key_names[i], input.columns[input.resolve(node.group_keys[i])].type, ""});
	}
	for (const auto &a : node.aggregates) {
		ScalarType type = ScalarType::INTEGER;
		if (a.kind == AggregateKind::SUM) {
			type = input.columns[input.resolve(*a.input)].type;
		}
		out.columns.push_back({a.output, type, ""});
	}
	out.columns.push_back({mult, ScalarType::BOOLEAN, ""});
	return out;
}

void check_reserved(const Schema &schema, const std::string &mult) {
	for (const auto &c : schema.columns) {
		if (c.name == mult || c.name == HIDDEN_COUNT_COLUMN) {
			throw Error(ErrorKind::COLLISION, "column name " + c.name + " is reserved for view maintenance");
		}
	}
}

PlanNode bind(const PlanNode &node, const SchemaProvider &catalog, const std::string &mult) {
	switch (node.kind) {
	case PlanKind::SCAN: {
		if (node.delta) {
			throw Error(ErrorKind::INTERNAL, "scan of " + node.table + " is already delta-bound");
		}
		check_reserved(node.output, mult);
		std::string name = delta_table_name(node.table);
		auto schema = catalog.table_schema(name);
		if (!schema) {
			throw Error(ErrorKind::CATALOG, "missing delta table " + name + " for base table " + node.table);
		}
		Schema expected = strip(node.output, "");
		expected.columns.push_back({mult, ScalarType::BOOLEAN, node.alias});
		if (schema->columns.size() != expected.columns.size() || schema->columns.back().name != mult) {
			throw Error(ErrorKind::SCHEMA_MISMATCH,
			            "delta table " + name + " must have the columns of " + node.table + " plus " + mult);
		}
		PlanNode out = node;
		out.table = name;
		out.delta = true;
		out.output = std::move(expected);
		schema->check_compatible(Schema("", out.output.columns));
		return out;
	}
	case PlanKind::FILTER: {
		PlanNode out = node;
		out.children[0] = bind(node.child(), catalog, mult);
		out.output = out.children[0].output;
		return out;
	}
	case PlanKind::PROJECT: {
		PlanNode out = node;
		out.children[0] = bind(node.child(), catalog, mult);
		const Column *m = mult_column_of(out.children[0].output, mult);
		out.items.push_back({Expr::column(m->qualifier, mult), mult});
		out.output.columns.push_back({mult, ScalarType::BOOLEAN, ""});
		return out;
	}
	case PlanKind::AGGREGATE: {
		PlanNode out = node;
		out.children[0] = bind(node.child(), catalog, mult);
		const Column *m = mult_column_of(out.children[0].output, mult);
		out.group_keys.push_back({m->qualifier, mult});
		out.key_names.push_back(mult);
		out.output = aggregate_output(out, out.children[0].output, mult);
		return out;
	}
	case PlanKind::JOIN: {
		PlanNode out = node;
		out.children[0] = bind(node.children[0], catalog, mult);
		out.children[1] = bind(node.children[1], catalog, mult);
		out.output.columns.clear();
		for (const auto &c : out.children) {
			for (const auto &col : c.output.columns) {
				if (col.name != mult) {
					out.output.columns.push_back(col);
				}
			}
		}
		out.output.columns.push_back({mult, ScalarType::BOOLEAN, ""});
		out.join_mult = JoinMultiplicity::PRODUCT;
		return out;
	}
	case PlanKind::UNION_ALL:
		break;
	}
	throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: operator without a delta binding");
}

std::string find_mult(const PlanNode &node) {
	if (node.kind == PlanKind::SCAN) {
		if (!node.delta) {
			return "";
		}
		return node.output.columns.back().name;
	}
	for (const auto &c : node.children) {
		auto m = find_mult(c);
		if (!m.empty()) {
			return m;
		}
	}
	return "";
}

bool all_scans_delta(const PlanNode &node) {
	if (node.kind == PlanKind::SCAN) {
		return node.delta;
	}
	return std::all_of(node.children.begin(), node.children.end(), all_scans_delta);
}

PlanNode unbind_scan(const PlanNode &scan, const std::string &mult) {
	PlanNode out = scan;
	out.table = scan.base_table;
	out.delta = false;
	out.output = strip(scan.output, mult);
	return out;
}

/// Copy of the pipeline with its join replaced by one of the three incremental terms.
PlanNode with_join_term(const PlanNode &node, JoinMultiplicity term, const std::string &mult) {
	PlanNode out = node;
	if (node.kind == PlanKind::JOIN) {
		out.join_mult = term;
		if (term == JoinMultiplicity::LEFT) {
			out.children[1] = unbind_scan(node.children[1], mult);
		} else if (term == JoinMultiplicity::RIGHT) {
			out.children[0] = unbind_scan(node.children[0], mult);
		}
		return out;
	}
	for (auto &c : out.children) {
		c = with_join_term(c, term, mult);
	}
	return out;
}

bool contains_join(const PlanNode &node) {
	if (node.kind == PlanKind::JOIN) {
		return true;
	}
	return std::any_of(node.children.begin(), node.children.end(), contains_join);
}

} // namespace

std::string delta_table_name(const std::string &table) {
	return "delta_" + table;
}

Schema delta_table_schema(const Schema &base, const std::string &mult_column) {
	Schema out;
	out.name = delta_table_name(base.name);
	for (const auto &c : base.columns) {
		if (c.name == mult_column) {
			throw Error(ErrorKind::COLLISION, "table " + base.name + " already has a column named " + mult_column);
		}
		out.columns.push_back({c.name, c.type, ""});
	}
	out.columns.push_back({mult_column, ScalarType::BOOLEAN, ""});
	return out;
}

std::optional<Schema> WithDeltaTables::table_schema(const std::string &name) const {
	if (auto direct = inner_.table_schema(name)) {
		return direct;
	}
	if (name.rfind("delta_", 0) == 0) {
		if (auto base = inner_.table_schema(name.substr(6))) {
			return delta_table_schema(*base, mult_column_);
		}
	}
	return std::nullopt;
}

PlanNode bind_deltas(const PlanNode &plan, const SchemaProvider &catalog, const std::string &mult_column) {
	if (mult_column.empty()) {
		throw Error(ErrorKind::UNSUPPORTED, "multiplicity column name must not be empty");
	}
	return bind(plan, catalog, mult_column);
}

IncrementalPlan rewrite_incremental(const PlanNode &bound, EmptinessMode emptiness) {
	if (!all_scans_delta(bound)) {
		throw Error(ErrorKind::INTERNAL, "rewrite_incremental expects a delta-bound plan");
	}
	IncrementalPlan out;
	out.mult_column = find_mult(bound);
	out.query_class = classify(bound);
	const std::string &mult = out.mult_column;

	PlanNode pipeline = bound;
	if (pipeline.kind == PlanKind::AGGREGATE) {
		if (std::none_of(pipeline.group_keys.begin(), pipeline.group_keys.end(),
		                 [&](const ColumnRef &k) { return k.name == mult; })) {
			throw Error(ErrorKind::INTERNAL, "aggregate is not grouped by the multiplicity column");
		}
		auto &combine = out.combine;
		combine.kind = CombineSpec::Kind::AGGREGATE_MERGE;
		combine.key_count = pipeline.group_keys.size() - 1;
		if (combine.key_count == 0) {
			throw Error(ErrorKind::UNSUPPORTED, "unsupported construct: aggregate without GROUP BY");
		}
		combine.emptiness = emptiness;
		if (emptiness == EmptinessMode::SOUND) {
			pipeline.aggregates.push_back({AggregateKind::COUNT, std::nullopt, HIDDEN_COUNT_COLUMN});
			pipeline.output = aggregate_output(pipeline, pipeline.child().output, mult);
		}
		for (const auto &a : pipeline.aggregates) {
			combine.aggregates.push_back(a.kind);
		}
		if (emptiness == EmptinessMode::SOUND) {
			combine.liveness = combine.aggregates.size() - 1;
		}
	} else {
		out.combine.kind = CombineSpec::Kind::BAG;
	}

	if (contains_join(pipeline)) {
		PlanNode u;
		u.kind = PlanKind::UNION_ALL;
		u.output = pipeline.output;
		for (auto term : {JoinMultiplicity::LEFT, JoinMultiplicity::RIGHT, JoinMultiplicity::PRODUCT}) {
			u.children.push_back(with_join_term(pipeline, term, mult));
		}
		out.plan = std::move(u);
	} else {
		out.plan = std::move(pipeline);
	}
	return out;
}

} // namespace ivmc
