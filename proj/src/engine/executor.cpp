#include "ivmc/engine/executor.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/core/evaluator.hpp"

#include <functional>
#include <unordered_map>

namespace ivmc {

std::int64_t ResultSet::row_count() const {
	std::int64_t n = 0;
	for (const auto &[_, count] : rows) {
		n += count;
	}
	return n;
}

ZSetRelation ResultSet::to_relation() const {
	ZSetRelation out(schema);
	for (const auto &[row, count] : rows) {
		out.add_copies(row, Multiplicity::insertion(), count);
	}
	return out;
}

/// Common table expressions visible to a query, innermost last.
struct Executor::Scope {
	const Scope *outer = nullptr;
	std::vector<std::pair<std::string, ResultSet>> ctes;

	const ResultSet *find(const std::string &name) const {
		for (auto it = ctes.rbegin(); it != ctes.rend(); ++it) {
			if (it->first == name) {
				return &it->second;
			}
		}
		return outer ? outer->find(name) : nullptr;
	}
};

namespace {

using RowVisitor = std::function<void(const Tuple &, std::int64_t)>;

/// A readable relation: either a stored table or a materialized result.
struct Source {
	Schema schema;
	const Table *table = nullptr;
	const ResultSet *result = nullptr;

	void for_each(const RowVisitor &visit) const {
		if (table) {
			for (const auto &[row, count] : table->rows) {
				visit(row, count);
			}
		} else {
			for (const auto &[row, count] : result->rows) {
				visit(row, count);
			}
		}
	}
};

std::string default_column_name(const Expr &e, std::size_t position) {
	if (e.is_column()) {
		return e.name;
	}
	if (e.kind == ExprKind::FUNCTION) {
		return e.name;
	}
	return "expr_" + std::to_string(position + 1);
}

/// Which side of a join an expression reads from, if exactly one.
enum class Side { NONE, LEFT, RIGHT, BOTH };

Side side_of(const Expr &e, const Schema &left, const Schema &right) {
	if (e.is_column()) {
		bool l = left.find(e.column_ref()).has_value();
		bool r = right.find(e.column_ref()).has_value();
		if (l && r) {
			throw Error(ErrorKind::BINDER, "ambiguous column reference " + e.column_ref().to_string());
		}
		return l ? Side::LEFT : (r ? Side::RIGHT : Side::NONE);
	}
	Side acc = Side::NONE;
	for (const auto &a : e.args) {
		Side s = side_of(a, left, right);
		if (s == Side::NONE) {
			continue;
		}
		acc = (acc == Side::NONE || acc == s) ? s : Side::BOTH;
	}
	return acc;
}

Tuple eval_key(const std::vector<BoundExpr> &exprs, const Tuple &row) {
	Tuple key;
	key.reserve(exprs.size());
	for (const auto &e : exprs) {
		key.push_back(evaluate(e, row));
	}
	return key;
}

} // namespace

void Executor::set_read_override(const std::string &name, ResultSet rows) {
	overrides_[name] = std::move(rows);
}

ResultSet Executor::query(const SelectQuery &query) {
	return eval_query(query, nullptr);
}

ResultSet Executor::eval_query(const SelectQuery &query, const Scope *outer) {
	Scope scope;
	scope.outer = outer;
	for (const auto &cte : query.ctes) {
		ResultSet rs = eval_query(cte.query, &scope);
		scope.ctes.emplace_back(cte.name, std::move(rs));
	}
	ResultSet out;
	for (std::size_t i = 0; i < query.cores.size(); ++i) {
		ResultSet part = eval_core(query.cores[i], scope);
		if (i == 0) {
			out = std::move(part);
			continue;
		}
		if (part.schema.columns.size() != out.schema.columns.size()) {
			throw Error(ErrorKind::BINDER, "UNION ALL branches have " + std::to_string(out.schema.columns.size()) +
			                                   " and " + std::to_string(part.schema.columns.size()) + " columns");
		}
		for (std::size_t c = 0; c < out.schema.columns.size(); ++c) {
			auto &col = out.schema.columns[c];
			col.type = unify_types(col.type, part.schema.columns[c].type);
		}
		for (auto &r : part.rows) {
			out.rows.push_back(std::move(r));
		}
	}
	return out;
}

ResultSet Executor::eval_core(const SelectCore &core, const Scope &scope) {
	auto open = [&](const TableRef &ref) {
		Source s;
		if (const ResultSet *cte = scope.find(ref.name)) {
			s.result = cte;
			s.schema = cte->schema;
		} else if (auto it = overrides_.find(ref.name); it != overrides_.end()) {
			s.result = &it->second;
			s.schema = it->second.schema;
		} else {
			s.table = &db_.table(ref.name);
			s.schema = s.table->schema;
		}
		s.schema = s.schema.qualified(ref.qualifier());
		return s;
	};

	Source left = open(core.from);
	Schema input = left.schema;
	std::optional<Source> right;
	if (core.join) {
		right = open(core.join->table);
		if (core.join->table.qualifier() == core.from.qualifier()) {
			throw Error(ErrorKind::BINDER, "duplicate table name or alias " + core.from.qualifier());
		}
		for (const auto &c : right->schema.columns) {
			input.columns.push_back(c);
		}
	}

	ExpressionBinder binder(input);
	std::optional<BoundExpr> where;
	if (core.where) {
		where = binder.bind(*core.where);
		if (where->type != ScalarType::BOOLEAN && where->type != ScalarType::NULL_TYPE) {
			throw Error(ErrorKind::TYPE, "WHERE clause must be boolean");
		}
	}

	// Output items, with * expanded.
	std::vector<Expr> item_exprs;
	std::vector<std::string> item_names;
	for (const auto &item : core.items) {
		if (item.expr.kind == ExprKind::STAR) {
			for (const auto &c : input.columns) {
				item_exprs.push_back(Expr::column(c.qualifier, c.name));
				item_names.push_back(c.name);
			}
			continue;
		}
		item_names.push_back(item.alias.empty() ? default_column_name(item.expr, item_exprs.size()) : item.alias);
		item_exprs.push_back(item.expr);
	}

	bool aggregating = !core.group_by.empty();
	for (const auto &e : item_exprs) {
		aggregating = aggregating || contains_aggregate(e);
	}

	std::vector<AggregateCall> calls;
	std::vector<BoundExpr> items;
	for (const auto &e : item_exprs) {
		items.push_back(aggregating ? binder.bind_with_aggregates(e, calls) : binder.bind(e));
	}
	std::vector<BoundExpr> group_keys;
	for (const auto &g : core.group_by) {
		group_keys.push_back(binder.bind(g));
	}

	ResultSet out;
	for (std::size_t i = 0; i < items.size(); ++i) {
		out.schema.columns.push_back({item_names[i], items[i].type, ""});
	}

	struct Group {
		Tuple representative;
		std::vector<AggregateAccumulator> accumulators;
	};
	std::vector<Group> groups;
	std::unordered_map<Tuple, std::size_t, TupleHash> group_index;
	auto new_group = [&](const Tuple &row) {
		Group g;
		g.representative = row;
		for (const auto &c : calls) {
			g.accumulators.emplace_back(c.kind, c.star);
		}
		groups.push_back(std::move(g));
		return groups.size() - 1;
	};

	auto emit = [&](const Tuple &row, std::int64_t count) {
		if (where && !is_true(evaluate(*where, row))) {
			return;
		}
		if (!aggregating) {
			out.rows.emplace_back(eval_key(items, row), count);
			return;
		}
		std::size_t g;
		Tuple key = eval_key(group_keys, row);
		auto it = group_index.find(key);
		if (it == group_index.end()) {
			g = new_group(row);
			group_index.emplace(std::move(key), g);
		} else {
			g = it->second;
		}
		auto &accs = groups[g].accumulators;
		for (std::size_t i = 0; i < calls.size(); ++i) {
			accs[i].add(calls[i].star ? Value() : evaluate(calls[i].argument, row), count);
		}
	};

	if (!right) {
		left.for_each(emit);
	} else {
		// Split ON into equi-key pairs (one side per input) and a residual predicate.
		Schema ls = left.schema;
		Schema rs = right->schema;
		ExpressionBinder lb(ls);
		ExpressionBinder rb(rs);
		std::vector<BoundExpr> lkeys;
		std::vector<BoundExpr> rkeys;
		std::vector<Expr> residual_terms;
		for (const auto &term : split_conjunction(core.join->condition)) {
			if (term.kind == ExprKind::BINARY && term.op == ExprOp::EQ) {
				Side a = side_of(term.args[0], ls, rs);
				Side b = side_of(term.args[1], ls, rs);
				if (a == Side::LEFT && b == Side::RIGHT) {
					lkeys.push_back(lb.bind(term.args[0]));
					rkeys.push_back(rb.bind(term.args[1]));
					continue;
				}
				if (a == Side::RIGHT && b == Side::LEFT) {
					lkeys.push_back(lb.bind(term.args[1]));
					rkeys.push_back(rb.bind(term.args[0]));
					continue;
				}
			}
			residual_terms.push_back(term);
		}
		std::optional<BoundExpr> residual;
		if (!residual_terms.empty()) {
			residual = binder.bind(conjunction(residual_terms));
		}

		std::unordered_map<Tuple, std::vector<std::pair<const Tuple *, std::int64_t>>, TupleHash> hash;
		right->for_each([&](const Tuple &row, std::int64_t count) {
			// Keys compare null-safely, so NULL group keys find their view row.
			hash[eval_key(rkeys, row)].emplace_back(&row, count);
		});
		const std::size_t right_width = rs.columns.size();
		const bool left_join = core.join->type == JoinType::LEFT;
		left.for_each([&](const Tuple &lrow, std::int64_t lcount) {
			bool matched = false;
			Tuple key = eval_key(lkeys, lrow);
			auto it = hash.find(key);
			if (it != hash.end()) {
				for (const auto &[rrow, rcount] : it->second) {
					Tuple combined = lrow;
					combined.insert(combined.end(), rrow->begin(), rrow->end());
					if (residual && !is_true(evaluate(*residual, combined))) {
						continue;
					}
					matched = true;
					emit(combined, lcount * rcount);
				}
			}
			if (left_join && !matched) {
				Tuple combined = lrow;
				combined.resize(combined.size() + right_width);
				emit(combined, lcount);
			}
		});
	}

	if (aggregating) {
		if (groups.empty() && core.group_by.empty()) {
			new_group(Tuple(input.columns.size()));
		}
		for (const auto &g : groups) {
			std::vector<Value> results;
			results.reserve(g.accumulators.size());
			for (const auto &acc : g.accumulators) {
				results.push_back(acc.result());
			}
			Tuple row;
			row.reserve(items.size());
			for (const auto &item : items) {
				row.push_back(evaluate(item, g.representative, results));
			}
			out.rows.emplace_back(std::move(row), 1);
		}
	}
	return out;
}

std::int64_t Executor::insert_rows(const std::string &table, const std::vector<std::string> &columns,
                                   const ResultSet &rows, const InsertSelect *conflict) {
	const Schema schema = db_.table(table).schema;
	std::vector<std::size_t> positions;
	if (columns.empty()) {
		for (std::size_t i = 0; i < schema.columns.size(); ++i) {
			positions.push_back(i);
		}
	} else {
		for (const auto &c : columns) {
			positions.push_back(schema.index_of(c));
		}
	}
	if (rows.schema.columns.size() != positions.size()) {
		throw Error(ErrorKind::BINDER, "INSERT into " + table + " supplies " +
		                                   std::to_string(rows.schema.columns.size()) + " values for " +
		                                   std::to_string(positions.size()) + " columns");
	}

	ConflictAction action = conflict ? conflict->conflict : ConflictAction::NONE;
	const TableIndex *conflict_index = nullptr;
	std::vector<std::pair<std::size_t, BoundExpr>> updates;
	Schema update_scope = schema.qualified(table);
	if (action == ConflictAction::UPDATE) {
		std::vector<std::size_t> key_positions;
		for (const auto &k : conflict->conflict_keys) {
			key_positions.push_back(schema.index_of(k));
		}
		conflict_index = db_.table(table).unique_index_on(key_positions);
		if (!conflict_index) {
			throw Error(ErrorKind::BINDER, "ON CONFLICT columns of " + table + " do not match a unique index");
		}
		for (const auto &c : schema.qualified("excluded").columns) {
			update_scope.columns.push_back(c);
		}
		ExpressionBinder binder(update_scope);
		for (const auto &a : conflict->updates) {
			updates.emplace_back(schema.index_of(a.column), binder.bind(a.value));
		}
	}

	std::int64_t affected = 0;
	for (const auto &[values, count] : rows.rows) {
		Tuple row(schema.columns.size());
		for (std::size_t i = 0; i < positions.size(); ++i) {
			row[positions[i]] = coerce(values[i], schema.columns[positions[i]].type);
		}
		if (action == ConflictAction::REPLACE) {
			const Table &t = db_.table(table);
			std::vector<Tuple> clashing;
			for (const auto &idx : t.indexes) {
				if (!idx.unique) {
					continue;
				}
				auto it = idx.entries.find(idx.key_of(row));
				if (it != idx.entries.end()) {
					clashing.push_back(it->second);
				}
			}
			for (const auto &old : clashing) {
				db_.erase_all(table, old);
			}
		} else if (action == ConflictAction::UPDATE) {
			auto it = conflict_index->entries.find(conflict_index->key_of(row));
			if (it != conflict_index->entries.end()) {
				Tuple old = it->second;
				Tuple scope_row = old;
				scope_row.insert(scope_row.end(), row.begin(), row.end());
				Tuple updated = old;
				for (const auto &[pos, expr] : updates) {
					updated[pos] = coerce(evaluate(expr, scope_row), schema.columns[pos].type);
				}
				db_.erase_all(table, old);
				db_.insert_row(table, updated, 1);
				affected += 1;
				continue;
			}
		}
		db_.insert_row(table, row, count);
		affected += count;
	}
	return affected;
}

std::int64_t Executor::delete_rows(const DeleteStatement &del) {
	const Table &t = db_.table(del.table);
	if (!del.where) {
		std::int64_t n = t.row_count;
		db_.clear_table(del.table);
		return n;
	}
	Schema scope = t.schema.qualified(del.table);
	ExpressionBinder binder(scope);
	BoundExpr pred = binder.bind(*del.where);
	if (pred.type != ScalarType::BOOLEAN && pred.type != ScalarType::NULL_TYPE) {
		throw Error(ErrorKind::TYPE, "WHERE clause must be boolean");
	}
	std::vector<std::pair<Tuple, std::int64_t>> doomed;
	for (const auto &[row, count] : t.rows) {
		if (is_true(evaluate(pred, row))) {
			doomed.emplace_back(row, count);
		}
	}
	std::int64_t n = 0;
	for (const auto &[row, count] : doomed) {
		db_.erase_row(del.table, row, count);
		n += count;
	}
	return n;
}

ExecResult Executor::run(const Statement &stmt) {
	db_.check_fault("statement");
	ExecResult out;
	std::visit(
	    [&](const auto &s) {
		    using T = std::decay_t<decltype(s)>;
		    if constexpr (std::is_same_v<T, CreateTable>) {
			    Schema schema;
			    schema.name = s.name;
			    for (const auto &c : s.columns) {
				    schema.columns.push_back({c.name, c.type, ""});
			    }
			    db_.create_table(schema, s.if_not_exists);
		    } else if constexpr (std::is_same_v<T, CreateIndex>) {
			    db_.create_index(s.name, s.table, s.columns, s.unique);
		    } else if constexpr (std::is_same_v<T, CreateView>) {
			    throw Error(ErrorKind::UNSUPPORTED, "views are registered through the catalog, not executed directly");
		    } else if constexpr (std::is_same_v<T, SelectStatement>) {
			    out.result = query(s.query);
		    } else if constexpr (std::is_same_v<T, InsertValues>) {
			    ResultSet rows;
			    Schema empty;
			    ExpressionBinder binder(empty);
			    for (const auto &r : s.rows) {
				    Tuple t;
				    for (const auto &e : r) {
					    t.push_back(evaluate(binder.bind(e), {}));
				    }
				    if (rows.rows.empty()) {
					    for (std::size_t i = 0; i < t.size(); ++i) {
						    rows.schema.columns.push_back({"column" + std::to_string(i + 1), t[i].type(), ""});
					    }
				    } else if (t.size() != rows.schema.columns.size()) {
					    throw Error(ErrorKind::BINDER, "VALUES rows have different lengths");
				    }
				    rows.rows.emplace_back(std::move(t), 1);
			    }
			    out.affected = insert_rows(s.table, s.columns, rows, nullptr);
		    } else if constexpr (std::is_same_v<T, InsertSelect>) {
			    ResultSet rows = query(s.query);
			    out.affected = insert_rows(s.table, s.columns, rows, &s);
		    } else if constexpr (std::is_same_v<T, DeleteStatement>) {
			    out.affected = delete_rows(s);
		    }
	    },
	    stmt);
	return out;
}

ExecResult Executor::execute(const Statement &stmt) {
	if (!db_.in_transaction()) {
		Transaction txn(db_);
		ExecResult r = run(stmt);
		txn.commit();
		return r;
	}
	std::size_t mark = db_.savepoint();
	try {
		return run(stmt);
	} catch (...) {
		db_.rollback_to(mark);
		throw;
	}
}

} // namespace ivmc
