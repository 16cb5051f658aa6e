#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ivmc {

enum class ScalarType : std::uint8_t { NULL_TYPE, INTEGER, DECIMAL, TEXT, BOOLEAN };

const char *scalar_type_name(ScalarType type);

inline bool is_numeric(ScalarType type) {
	return type == ScalarType::INTEGER || type == ScalarType::DECIMAL;
}

/// Fixed-point decimal with 9 fractional digits, decimal(38,9).
struct Decimal {
	static constexpr int SCALE = 9;
	static constexpr __int128 ONE = 1000000000;

	__int128 scaled = 0;

	static Decimal from_integer(std::int64_t v) {
		return Decimal {static_cast<__int128>(v) * ONE};
	}
	/// Parses "[-]digits[.digits]"; more than 9 fractional digits is a type error.
	static Decimal parse(std::string_view text);

	bool is_integral() const {
		return scaled % ONE == 0;
	}
	std::string to_string() const;

	friend bool operator==(const Decimal &, const Decimal &) = default;
	friend auto operator<=>(const Decimal &a, const Decimal &b) {
		return a.scaled <=> b.scaled;
	}
};

/// A nullable SQL scalar. Equality is null-safe (NULL == NULL) and numeric across INTEGER/DECIMAL;
/// ordering is total: NULL < BOOLEAN < numeric < TEXT.
class Value {
public:
	Value() = default;
	Value(std::int64_t v) : data_(v) {
	}
	Value(int v) : data_(static_cast<std::int64_t>(v)) {
	}
	Value(Decimal v) : data_(v) {
	}
	Value(std::string v) : data_(std::move(v)) {
	}
	Value(const char *v) : data_(std::string(v)) {
	}
	Value(bool v) : data_(v) {
	}

	static Value null() {
		return Value();
	}

	ScalarType type() const;
	bool is_null() const {
		return std::holds_alternative<std::monostate>(data_);
	}

	std::int64_t as_integer() const;
	Decimal as_decimal() const;
	const std::string &as_text() const;
	bool as_boolean() const;

	/// Display form: text unquoted, NULL as "NULL".
	std::string to_string() const;
	/// Literal form that re-parses to an equal value.
	std::string to_sql_literal() const;

	std::size_t hash() const;

	friend bool operator==(const Value &a, const Value &b);
	friend std::strong_ordering operator<=>(const Value &a, const Value &b);

private:
	std::variant<std::monostate, std::int64_t, Decimal, std::string, bool> data_;
};

using Tuple = std::vector<Value>;

struct ValueHash {
	std::size_t operator()(const Value &v) const {
		return v.hash();
	}
};

struct TupleHash {
	std::size_t operator()(const Tuple &t) const;
};

std::string tuple_to_string(const Tuple &t);

// SQL arithmetic; NULL in, NULL out. INTEGER overflow raises ErrorKind::OVERFLOW.
Value add(const Value &a, const Value &b);
Value subtract(const Value &a, const Value &b);
Value multiply(const Value &a, const Value &b);
Value divide(const Value &a, const Value &b);
Value negate(const Value &a);

/// Converts for storage in a column of the given type; raises ErrorKind::TYPE when lossy or incompatible.
Value coerce(const Value &v, ScalarType target);

/// Parses a type name as written in DDL (INTEGER, BIGINT, DECIMAL(p,s), VARCHAR, TEXT, BOOLEAN, ...).
ScalarType parse_type_name(std::string_view name);

} // namespace ivmc
