#include "ivmc/core/error.hpp"
#include "ivmc/plan/plan.hpp"

namespace ivmc {

namespace {

Schema without_column(const Schema &schema, const std::string &name) {
	Schema out = schema;
	if (name.empty()) {
		return out;
	}
	std::erase_if(out.columns, [&](const Column &c) { return c.name == name; });
	return out;
}

bool is_mult_ref(const Expr &e, const std::string &mult) {
	return !mult.empty() && e.is_column() && e.name == mult;
}

ZSetRelation with_schema(const ZSetRelation &r, const Schema &schema) {
	ZSetRelation out(schema);
	out.reserve(r.size());
	for (const auto &e : r.entries()) {
		out.add(e.tuple, e.mult);
	}
	return out;
}

ZSetRelation scan(const PlanNode &node, const TableSource &source, const std::string &mult) {
	ZSetRelation stored = source(node.table);
	if (!node.delta || mult.empty()) {
		return with_schema(stored, node.output);
	}
	std::size_t flag_idx = stored.schema().index_of(mult);
	ZSetRelation out(without_column(node.output, mult));
	out.reserve(stored.size());
	for (const auto &e : stored.entries()) {
		const Value &flag = e.tuple[flag_idx];
		if (flag.is_null()) {
			throw Error(ErrorKind::TYPE, "NULL multiplicity in " + node.table);
		}
		Tuple t;
		t.reserve(e.tuple.size() - 1);
		for (std::size_t i = 0; i < e.tuple.size(); ++i) {
			if (i != flag_idx) {
				t.push_back(e.tuple[i]);
			}
		}
		out.add(std::move(t), Multiplicity {e.mult.flag == flag.as_boolean()});
	}
	return out;
}

} // namespace

ZSetRelation evaluate_plan(const PlanNode &plan, const TableSource &source, const std::string &mult) {
	switch (plan.kind) {
	case PlanKind::SCAN:
		return scan(plan, source, mult);
	case PlanKind::FILTER:
		return eval_select(plan.predicate, evaluate_plan(plan.child(), source, mult));
	case PlanKind::PROJECT: {
		std::vector<ProjectItem> items;
		for (const auto &item : plan.items) {
			if (!is_mult_ref(item.expr, mult)) {
				items.push_back(item);
			}
		}
		return eval_project(items, evaluate_plan(plan.child(), source, mult));
	}
	case PlanKind::AGGREGATE: {
		std::vector<ColumnRef> keys;
		for (const auto &k : plan.group_keys) {
			if (mult.empty() || k.name != mult) {
				keys.push_back(k);
			}
		}
		auto grouped = eval_aggregate(keys, plan.aggregates, evaluate_plan(plan.child(), source, mult));
		return with_schema(grouped, without_column(plan.output, mult));
	}
	case PlanKind::JOIN: {
		auto left = evaluate_plan(plan.children[0], source, mult);
		auto right = evaluate_plan(plan.children[1], source, mult);
		auto joined = eval_join(left, right, plan.join_keys);
		return with_schema(joined, without_column(plan.output, mult));
	}
	case PlanKind::UNION_ALL: {
		ZSetRelation out(without_column(plan.output, mult));
		for (const auto &c : plan.children) {
			auto part = evaluate_plan(c, source, mult);
			for (const auto &e : part.entries()) {
				out.add(e.tuple, e.mult);
			}
		}
		return out;
	}
	}
	throw Error(ErrorKind::INTERNAL, "unknown plan node");
}

} // namespace ivmc
