#pragma once

#include "ivmc/core/value.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ivmc {

enum class ExprKind : std::uint8_t { LITERAL, COLUMN, STAR, UNARY, BINARY, IS_NULL, CASE, FUNCTION };

enum class ExprOp : std::uint8_t { NONE, ADD, SUB, MUL, DIV, EQ, NE, LT, LE, GT, GE, AND, OR, NEG, NOT };

const char *expr_op_symbol(ExprOp op);

/// Column reference, optionally qualified by a table name or alias.
struct ColumnRef {
	std::string qualifier;
	std::string name;

	std::string to_string() const {
		return qualifier.empty() ? name : qualifier + "." + name;
	}
	friend bool operator==(const ColumnRef &, const ColumnRef &) = default;
};

/// Scalar expression tree shared by the parser, planner, evaluator and emitter.
///
/// CASE keeps its branches flattened in `args` as [when0, then0, when1, then1, ..., else?] with
/// `flag` set when an ELSE branch is present. IS_NULL uses `flag` for IS NOT NULL. FUNCTION stores
/// the lower-case function name in `name`; COUNT(*) has a single STAR argument.
struct Expr {
	ExprKind kind = ExprKind::LITERAL;
	ExprOp op = ExprOp::NONE;
	Value value;
	std::string qualifier;
	std::string name;
	bool flag = false;
	std::vector<Expr> args;

	bool operator==(const Expr &other) const = default;

	static Expr literal(Value v);
	static Expr column(std::string qualifier, std::string name);
	static Expr column(const ColumnRef &ref) {
		return column(ref.qualifier, ref.name);
	}
	static Expr star();
	static Expr unary(ExprOp op, Expr operand);
	static Expr binary(ExprOp op, Expr left, Expr right);
	static Expr is_null(Expr operand, bool negated);
	static Expr function(std::string name, std::vector<Expr> args);
	static Expr case_when(std::vector<std::pair<Expr, Expr>> branches, const Expr *otherwise);

	bool is_column() const {
		return kind == ExprKind::COLUMN;
	}
	ColumnRef column_ref() const {
		return {qualifier, name};
	}
};

/// SUM(...) or COUNT(...).
bool is_aggregate_call(const Expr &e);
bool contains_aggregate(const Expr &e);

/// Conjunction of all terms; an empty list yields TRUE.
Expr conjunction(std::vector<Expr> terms);
/// Splits nested ANDs into their conjuncts.
std::vector<Expr> split_conjunction(const Expr &e);

} // namespace ivmc
