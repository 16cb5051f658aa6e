#include "ivmc/core/evaluator.hpp"

#include "ivmc/core/error.hpp"

namespace ivmc {

const char *aggregate_kind_name(AggregateKind kind) {
	return kind == AggregateKind::SUM ? "SUM" : "COUNT";
}

ScalarType unify_types(ScalarType a, ScalarType b) {
	if (a == ScalarType::NULL_TYPE) {
		return b;
	}
	if (b == ScalarType::NULL_TYPE || a == b) {
		return a;
	}
	if (is_numeric(a) && is_numeric(b)) {
		return ScalarType::DECIMAL;
	}
	throw Error(ErrorKind::TYPE,
	            std::string("incompatible types ") + scalar_type_name(a) + " and " + scalar_type_name(b));
}

namespace {

bool comparable(ScalarType a, ScalarType b) {
	if (a == ScalarType::NULL_TYPE || b == ScalarType::NULL_TYPE || a == b) {
		return true;
	}
	return is_numeric(a) && is_numeric(b);
}

void require_boolean(const BoundExpr &e, const char *context) {
	if (e.type != ScalarType::BOOLEAN && e.type != ScalarType::NULL_TYPE) {
		throw Error(ErrorKind::TYPE,
		            std::string(context) + " expects BOOLEAN, got " + scalar_type_name(e.type));
	}
}

void require_numeric(const BoundExpr &e, const char *context) {
	if (!is_numeric(e.type) && e.type != ScalarType::NULL_TYPE) {
		throw Error(ErrorKind::TYPE,
		            std::string(context) + " expects a numeric operand, got " + scalar_type_name(e.type));
	}
}

} // namespace

BoundExpr ExpressionBinder::bind(const Expr &expr) const {
	return bind_node(expr, nullptr, false);
}

BoundExpr ExpressionBinder::bind_with_aggregates(const Expr &expr, std::vector<AggregateCall> &calls) const {
	return bind_node(expr, &calls, false);
}

BoundExpr ExpressionBinder::bind_node(const Expr &expr, std::vector<AggregateCall> *calls,
                                      bool inside_aggregate) const {
	BoundExpr out;
	switch (expr.kind) {
	case ExprKind::LITERAL:
		out.kind = BoundKind::CONSTANT;
		out.value = expr.value;
		out.type = expr.value.type();
		return out;
	case ExprKind::COLUMN: {
		out.kind = BoundKind::COLUMN;
		out.index = scope_.resolve(expr.column_ref());
		out.type = scope_.columns[out.index].type;
		return out;
	}
	case ExprKind::STAR:
		throw Error(ErrorKind::UNSUPPORTED, "* is only supported inside COUNT(*)");
	case ExprKind::UNARY: {
		out.kind = BoundKind::UNARY;
		out.op = expr.op;
		out.args.push_back(bind_node(expr.args[0], calls, inside_aggregate));
		if (expr.op == ExprOp::NOT) {
			require_boolean(out.args[0], "NOT");
			out.type = ScalarType::BOOLEAN;
		} else {
			require_numeric(out.args[0], "unary -");
			out.type = out.args[0].type;
		}
		return out;
	}
	case ExprKind::BINARY: {
		out.kind = BoundKind::BINARY;
		out.op = expr.op;
		out.args.push_back(bind_node(expr.args[0], calls, inside_aggregate));
		out.args.push_back(bind_node(expr.args[1], calls, inside_aggregate));
		const auto &l = out.args[0];
		const auto &r = out.args[1];
		switch (expr.op) {
		case ExprOp::ADD:
		case ExprOp::SUB:
		case ExprOp::MUL:
		case ExprOp::DIV:
			require_numeric(l, expr_op_symbol(expr.op));
			require_numeric(r, expr_op_symbol(expr.op));
			out.type = unify_types(l.type, r.type);
			if (out.type == ScalarType::NULL_TYPE) {
				out.type = ScalarType::INTEGER;
			}
			break;
		case ExprOp::AND:
		case ExprOp::OR:
			require_boolean(l, expr_op_symbol(expr.op));
			require_boolean(r, expr_op_symbol(expr.op));
			out.type = ScalarType::BOOLEAN;
			break;
		default:
			if (!comparable(l.type, r.type)) {
				throw Error(ErrorKind::TYPE, std::string("cannot compare ") + scalar_type_name(l.type) + " with " +
				                                 scalar_type_name(r.type));
			}
			out.type = ScalarType::BOOLEAN;
			break;
		}
		return out;
	}
	case ExprKind::IS_NULL:
		out.kind = BoundKind::IS_NULL;
		out.flag = expr.flag;
		out.args.push_back(bind_node(expr.args[0], calls, inside_aggregate));
		out.type = ScalarType::BOOLEAN;
		return out;
	case ExprKind::CASE: {
		out.kind = BoundKind::CASE;
		out.flag = expr.flag;
		ScalarType result = ScalarType::NULL_TYPE;
		for (std::size_t i = 0; i < expr.args.size(); ++i) {
			out.args.push_back(bind_node(expr.args[i], calls, inside_aggregate));
			bool is_condition = (i % 2 == 0) && !(expr.flag && i + 1 == expr.args.size());
			if (is_condition) {
				require_boolean(out.args.back(), "CASE WHEN");
			} else {
				result = unify_types(result, out.args.back().type);
			}
		}
		out.type = result;
		return out;
	}
	case ExprKind::FUNCTION: {
		if (expr.name == "coalesce") {
			if (expr.args.empty()) {
				throw Error(ErrorKind::BINDER, "COALESCE requires at least one argument");
			}
			out.kind = BoundKind::COALESCE;
			ScalarType result = ScalarType::NULL_TYPE;
			for (const auto &arg : expr.args) {
				out.args.push_back(bind_node(arg, calls, inside_aggregate));
				result = unify_types(result, out.args.back().type);
			}
			out.type = result;
			return out;
		}
		if (is_aggregate_call(expr)) {
			if (!calls) {
				throw Error(ErrorKind::BINDER, "aggregate " + expr.name + " is not allowed here");
			}
			if (inside_aggregate) {
				throw Error(ErrorKind::BINDER, "nested aggregate " + expr.name);
			}
			if (expr.args.size() != 1) {
				throw Error(ErrorKind::BINDER, expr.name + " takes exactly one argument");
			}
			AggregateCall call;
			call.kind = expr.name == "sum" ? AggregateKind::SUM : AggregateKind::COUNT;
			if (expr.args[0].kind == ExprKind::STAR) {
				if (call.kind == AggregateKind::SUM) {
					throw Error(ErrorKind::BINDER, "SUM(*) is not valid");
				}
				call.star = true;
			} else {
				call.argument = bind_node(expr.args[0], calls, true);
			}
			if (call.kind == AggregateKind::SUM) {
				if (!is_numeric(call.argument.type) && call.argument.type != ScalarType::NULL_TYPE) {
					throw Error(ErrorKind::TYPE,
					            std::string("SUM over non-numeric type ") + scalar_type_name(call.argument.type));
				}
				call.type = call.argument.type == ScalarType::DECIMAL ? ScalarType::DECIMAL : ScalarType::INTEGER;
			} else {
				call.type = ScalarType::INTEGER;
			}
			out.kind = BoundKind::AGGREGATE;
			out.index = calls->size();
			out.type = call.type;
			calls->push_back(std::move(call));
			return out;
		}
		throw Error(ErrorKind::UNSUPPORTED, "unsupported function " + expr.name);
	}
	}
	throw Error(ErrorKind::INTERNAL, "unhandled expression kind");
}

namespace {

Value compare(ExprOp op, const Value &a, const Value &b) {
	if (a.is_null() || b.is_null()) {
		return Value::null();
	}
	auto c = a <=> b;
	switch (op) {
	case ExprOp::EQ:
		return Value(c == 0);
	case ExprOp::NE:
		return Value(c != 0);
	case ExprOp::LT:
		return Value(c < 0);
	case ExprOp::LE:
		return Value(c <= 0);
	case ExprOp::GT:
		return Value(c > 0);
	case ExprOp::GE:
		return Value(c >= 0);
	default:
		throw Error(ErrorKind::INTERNAL, "not a comparison operator");
	}
}

} // namespace

Value evaluate(const BoundExpr &expr, std::span<const Value> row, std::span<const Value> aggregates) {
	switch (expr.kind) {
	case BoundKind::CONSTANT:
		return expr.value;
	case BoundKind::COLUMN:
		return row[expr.index];
	case BoundKind::AGGREGATE:
		return aggregates[expr.index];
	case BoundKind::UNARY: {
		auto v = evaluate(expr.args[0], row, aggregates);
		if (expr.op == ExprOp::NOT) {
			return v.is_null() ? v : Value(!v.as_boolean());
		}
		return negate(v);
	}
	case BoundKind::BINARY: {
		if (expr.op == ExprOp::AND || expr.op == ExprOp::OR) {
			auto l = evaluate(expr.args[0], row, aggregates);
			bool short_value = expr.op == ExprOp::OR;
			if (!l.is_null() && l.as_boolean() == short_value) {
				return l;
			}
			auto r = evaluate(expr.args[1], row, aggregates);
			if (!r.is_null() && r.as_boolean() == short_value) {
				return r;
			}
			if (l.is_null() || r.is_null()) {
				return Value::null();
			}
			return Value(!short_value);
		}
		auto l = evaluate(expr.args[0], row, aggregates);
		auto r = evaluate(expr.args[1], row, aggregates);
		switch (expr.op) {
		case ExprOp::ADD:
			return add(l, r);
		case ExprOp::SUB:
			return subtract(l, r);
		case ExprOp::MUL:
			return multiply(l, r);
		case ExprOp::DIV:
			return divide(l, r);
		default:
			return compare(expr.op, l, r);
		}
	}
	case BoundKind::IS_NULL: {
		bool null = evaluate(expr.args[0], row, aggregates).is_null();
		return Value(expr.flag ? !null : null);
	}
	case BoundKind::CASE: {
		std::size_t pairs = expr.flag ? (expr.args.size() - 1) / 2 : expr.args.size() / 2;
		for (std::size_t i = 0; i < pairs; ++i) {
			if (is_true(evaluate(expr.args[2 * i], row, aggregates))) {
				return coerce(evaluate(expr.args[2 * i + 1], row, aggregates), expr.type);
			}
		}
		if (expr.flag) {
			return coerce(evaluate(expr.args.back(), row, aggregates), expr.type);
		}
		return Value::null();
	}
	case BoundKind::COALESCE:
		for (const auto &arg : expr.args) {
			auto v = evaluate(arg, row, aggregates);
			if (!v.is_null()) {
				return coerce(v, expr.type);
			}
		}
		return Value::null();
	}
	throw Error(ErrorKind::INTERNAL, "unhandled bound expression");
}

void AggregateAccumulator::add(const Value &v, std::int64_t copies) {
	if (kind_ == AggregateKind::COUNT) {
		if (star_ || !v.is_null()) {
			count_ += copies;
		}
		return;
	}
	if (v.is_null()) {
		return;
	}
	Value contribution = copies == 1 ? v : multiply(v, Value(copies));
	sum_ = sum_.is_null() ? contribution : ivmc::add(sum_, contribution);
}

Value AggregateAccumulator::result() const {
	if (kind_ == AggregateKind::COUNT) {
		return Value(count_);
	}
	return sum_;
}

} // namespace ivmc
