#include "ivmc/core/expression.hpp"

namespace ivmc {

const char *expr_op_symbol(ExprOp op) {
	switch (op) {
	case ExprOp::ADD:
		return "+";
	case ExprOp::SUB:
	case ExprOp::NEG:
		return "-";
	case ExprOp::MUL:
		return "*";
	case ExprOp::DIV:
		return "/";
	case ExprOp::EQ:
		return "=";
	case ExprOp::NE:
		return "<>";
	case ExprOp::LT:
		return "<";
	case ExprOp::LE:
		return "<=";
	case ExprOp::GT:
		return ">";
	case ExprOp::GE:
		return ">=";
	case ExprOp::AND:
		return "AND";
	case ExprOp::OR:
		return "OR";
	case ExprOp::NOT:
		return "NOT";
	case ExprOp::NONE:
		break;
	}
	return "?";
}

Expr Expr::literal(Value v) {
	Expr e;
	e.kind = ExprKind::LITERAL;
	e.value = std::move(v);
	return e;
}

Expr Expr::column(std::string qualifier, std::string name) {
	Expr e;
	e.kind = ExprKind::COLUMN;
	e.qualifier = std::move(qualifier);
	e.name = std::move(name);
	return e;
}

Expr Expr::star() {
	Expr e;
	e.kind = ExprKind::STAR;
	return e;
}

Expr Expr::unary(ExprOp op, Expr operand) {
	Expr e;
	e.kind = ExprKind::UNARY;
	e.op = op;
	e.args.push_back(std::move(operand));
	return e;
}

Expr Expr::binary(ExprOp op, Expr left, Expr right) {
	Expr e;
	e.kind = ExprKind::BINARY;
	e.op = op;
	e.args.push_back(std::move(left));
	e.args.push_back(std::move(right));
	return e;
}

Expr Expr::is_null(Expr operand, bool negated) {
	Expr e;
	e.kind = ExprKind::IS_NULL;
	e.flag = negated;
	e.args.push_back(std::move(operand));
	return e;
}

Expr Expr::function(std::string name, std::vector<Expr> args) {
	Expr e;
	e.kind = ExprKind::FUNCTION;
	e.name = std::move(name);
	e.args = std::move(args);
	return e;
}

Expr Expr::case_when(std::vector<std::pair<Expr, Expr>> branches, const Expr *otherwise) {
	Expr e;
	e.kind = ExprKind::CASE;
	for (auto &[when, then] : branches) {
		e.args.push_back(std::move(when));
		e.args.push_back(std::move(then));
	}
	if (otherwise) {
		e.args.push_back(*otherwise);
		e.flag = true;
	}
	return e;
}

bool is_aggregate_call(const Expr &e) {
	return e.kind == ExprKind::FUNCTION && (e.name == "sum" || e.name == "count");
}

bool contains_aggregate(const Expr &e) {
	if (is_aggregate_call(e)) {
		return true;
	}
	for (const auto &arg : e.args) {
		if (contains_aggregate(arg)) {
			return true;
		}
	}
	return false;
}

Expr conjunction(std::vector<Expr> terms) {
	if (terms.empty()) {
		return Expr::literal(Value(true));
	}
	Expr out = std::move(terms[0]);
	for (std::size_t i = 1; i < terms.size(); ++i) {
		out = Expr::binary(ExprOp::AND, std::move(out), std::move(terms[i]));
	}
	return out;
}

std::vector<Expr> split_conjunction(const Expr &e) {
	if (e.kind == ExprKind::BINARY && e.op == ExprOp::AND) {
		auto left = split_conjunction(e.args[0]);
		auto right = split_conjunction(e.args[1]);
		left.insert(left.end(), right.begin(), right.end());
		return left;
	}
	return {e};
}

} // namespace ivmc
