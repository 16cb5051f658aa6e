#pragma once

#include "ivmc/core/expression.hpp"
#include "ivmc/core/schema.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ivmc {

enum class AggregateKind : std::uint8_t { SUM, COUNT };

const char *aggregate_kind_name(AggregateKind kind);

enum class BoundKind : std::uint8_t { CONSTANT, COLUMN, AGGREGATE, UNARY, BINARY, IS_NULL, CASE, COALESCE };

/// Expression resolved against a scope: column references are positions, aggregates are slots.
struct BoundExpr {
	BoundKind kind = BoundKind::CONSTANT;
	ExprOp op = ExprOp::NONE;
	ScalarType type = ScalarType::NULL_TYPE;
	Value value;
	std::size_t index = 0;
	bool flag = false;
	std::vector<BoundExpr> args;
};

struct AggregateCall {
	AggregateKind kind = AggregateKind::SUM;
	bool star = false;
	BoundExpr argument;
	ScalarType type = ScalarType::INTEGER;
};

/// Result type of combining two operand types (NULL adopts the other; INTEGER widens to DECIMAL).
ScalarType unify_types(ScalarType a, ScalarType b);

/// Binds expressions against the columns of one scope, type-checking as it goes.
class ExpressionBinder {
public:
	explicit ExpressionBinder(const Schema &scope) : scope_(scope) {
	}
	ExpressionBinder(Schema &&) = delete;

	/// Aggregates are rejected.
	BoundExpr bind(const Expr &expr) const;
	/// Aggregate calls become AGGREGATE slots appended to `calls`; their arguments bind in this scope.
	BoundExpr bind_with_aggregates(const Expr &expr, std::vector<AggregateCall> &calls) const;

private:
	BoundExpr bind_node(const Expr &expr, std::vector<AggregateCall> *calls, bool inside_aggregate) const;

	const Schema &scope_;
};

Value evaluate(const BoundExpr &expr, std::span<const Value> row, std::span<const Value> aggregates = {});

/// SQL truthiness: only a non-null TRUE passes a filter.
inline bool is_true(const Value &v) {
	return v.type() == ScalarType::BOOLEAN && v.as_boolean();
}

/// Running SUM/COUNT. SUM skips NULLs and is NULL over no non-null input.
class AggregateAccumulator {
public:
	explicit AggregateAccumulator(AggregateKind kind, bool star = false) : kind_(kind), star_(star) {
	}

	void add(const Value &v, std::int64_t copies = 1);
	Value result() const;

private:
	AggregateKind kind_;
	bool star_;
	std::int64_t count_ = 0;
	Value sum_;
};

} // namespace ivmc
