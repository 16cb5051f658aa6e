#include "ivmc/core/value.hpp"

#include "ivmc/core/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace ivmc {

namespace {

constexpr __int128 INT64_MAX_128 = static_cast<__int128>(INT64_MAX);
constexpr __int128 INT64_MIN_128 = static_cast<__int128>(INT64_MIN);
// decimal(38,9): 29 integral digits.
constexpr __int128 DECIMAL_LIMIT = static_cast<__int128>(10000000000000000000ULL) *
                                   static_cast<__int128>(10000000000000000000ULL);

std::string int128_to_string(__int128 v) {
	if (v == 0) {
		return "0";
	}
	bool negative = v < 0;
	unsigned __int128 u = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
	std::string out;
	while (u > 0) {
		out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
		u /= 10;
	}
	if (negative) {
		out.push_back('-');
	}
	std::reverse(out.begin(), out.end());
	return out;
}

Decimal checked_decimal(__int128 scaled) {
	if (scaled >= DECIMAL_LIMIT || scaled <= -DECIMAL_LIMIT) {
		throw Error(ErrorKind::OVERFLOW, "decimal out of range");
	}
	return Decimal {scaled};
}

int type_rank(ScalarType t) {
	switch (t) {
	case ScalarType::NULL_TYPE:
		return 0;
	case ScalarType::BOOLEAN:
		return 1;
	case ScalarType::INTEGER:
	case ScalarType::DECIMAL:
		return 2;
	case ScalarType::TEXT:
		return 3;
	}
	return 4;
}

bool numeric_operands(const Value &a, const Value &b, const char *op) {
	if (a.is_null() || b.is_null()) {
		return false;
	}
	if (!is_numeric(a.type()) || !is_numeric(b.type())) {
		throw Error(ErrorKind::TYPE, std::string("operator ") + op + " expects numeric operands, got " +
		                                 scalar_type_name(a.type()) + " and " + scalar_type_name(b.type()));
	}
	return true;
}

} // namespace

const char *scalar_type_name(ScalarType type) {
	switch (type) {
	case ScalarType::NULL_TYPE:
		return "NULL";
	case ScalarType::INTEGER:
		return "BIGINT";
	case ScalarType::DECIMAL:
		return "DECIMAL(38,9)";
	case ScalarType::TEXT:
		return "VARCHAR";
	case ScalarType::BOOLEAN:
		return "BOOLEAN";
	}
	return "?";
}

Decimal Decimal::parse(std::string_view text) {
	std::size_t i = 0;
	bool negative = false;
	if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
		negative = text[i] == '-';
		++i;
	}
	__int128 integral = 0;
	__int128 fraction = 0;
	int fraction_digits = 0;
	bool any_digit = false;
	for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
		integral = integral * 10 + (text[i] - '0');
		any_digit = true;
		if (integral >= DECIMAL_LIMIT / ONE) {
			throw Error(ErrorKind::OVERFLOW, "decimal literal out of range: " + std::string(text));
		}
	}
	if (i < text.size() && text[i] == '.') {
		++i;
		for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
			if (fraction_digits == SCALE) {
				throw Error(ErrorKind::TYPE, "decimal literal has more than 9 fractional digits: " + std::string(text));
			}
			fraction = fraction * 10 + (text[i] - '0');
			++fraction_digits;
			any_digit = true;
		}
	}
	if (!any_digit || i != text.size()) {
		throw Error(ErrorKind::TYPE, "invalid decimal literal: " + std::string(text));
	}
	for (int d = fraction_digits; d < SCALE; ++d) {
		fraction *= 10;
	}
	__int128 scaled = integral * ONE + fraction;
	return Decimal {negative ? -scaled : scaled};
}

std::string Decimal::to_string() const {
	bool negative = scaled < 0;
	__int128 magnitude = negative ? -scaled : scaled;
	std::string integral = int128_to_string(magnitude / ONE);
	std::string fraction = int128_to_string(magnitude % ONE);
	fraction.insert(0, static_cast<std::size_t>(SCALE) - fraction.size(), '0');
	while (fraction.size() > 1 && fraction.back() == '0') {
		fraction.pop_back();
	}
	return (negative ? "-" : "") + integral + "." + fraction;
}

ScalarType Value::type() const {
	switch (data_.index()) {
	case 0:
		return ScalarType::NULL_TYPE;
	case 1:
		return ScalarType::INTEGER;
	case 2:
		return ScalarType::DECIMAL;
	case 3:
		return ScalarType::TEXT;
	default:
		return ScalarType::BOOLEAN;
	}
}

std::int64_t Value::as_integer() const {
	if (auto p = std::get_if<std::int64_t>(&data_)) {
		return *p;
	}
	throw Error(ErrorKind::TYPE, std::string("expected BIGINT, got ") + scalar_type_name(type()));
}

Decimal Value::as_decimal() const {
	if (auto p = std::get_if<Decimal>(&data_)) {
		return *p;
	}
	if (auto p = std::get_if<std::int64_t>(&data_)) {
		return Decimal::from_integer(*p);
	}
	throw Error(ErrorKind::TYPE, std::string("expected DECIMAL, got ") + scalar_type_name(type()));
}

const std::string &Value::as_text() const {
	if (auto p = std::get_if<std::string>(&data_)) {
		return *p;
	}
	throw Error(ErrorKind::TYPE, std::string("expected VARCHAR, got ") + scalar_type_name(type()));
}

bool Value::as_boolean() const {
	if (auto p = std::get_if<bool>(&data_)) {
		return *p;
	}
	throw Error(ErrorKind::TYPE, std::string("expected BOOLEAN, got ") + scalar_type_name(type()));
}

std::string Value::to_string() const {
	switch (type()) {
	case ScalarType::NULL_TYPE:
		return "NULL";
	case ScalarType::INTEGER:
		return std::to_string(std::get<std::int64_t>(data_));
	case ScalarType::DECIMAL:
		return std::get<Decimal>(data_).to_string();
	case ScalarType::TEXT:
		return std::get<std::string>(data_);
	case ScalarType::BOOLEAN:
		return std::get<bool>(data_) ? "true" : "false";
	}
	return "";
}

std::string Value::to_sql_literal() const {
	switch (type()) {
	case ScalarType::TEXT: {
		std::string out = "'";
		for (char c : std::get<std::string>(data_)) {
			if (c == '\'') {
				out += "''";
			} else {
				out.push_back(c);
			}
		}
		out.push_back('\'');
		return out;
	}
	case ScalarType::BOOLEAN:
		return std::get<bool>(data_) ? "TRUE" : "FALSE";
	default:
		return to_string();
	}
}

std::size_t Value::hash() const {
	switch (type()) {
	case ScalarType::NULL_TYPE:
		return 0x9e3779b97f4a7c15ULL;
	case ScalarType::INTEGER:
		return std::hash<std::int64_t> {}(std::get<std::int64_t>(data_));
	case ScalarType::DECIMAL: {
		auto d = std::get<Decimal>(data_);
		__int128 whole = d.scaled / Decimal::ONE;
		if (d.is_integral() && whole <= INT64_MAX_128 && whole >= INT64_MIN_128) {
			return std::hash<std::int64_t> {}(static_cast<std::int64_t>(whole));
		}
		auto lo = static_cast<std::uint64_t>(d.scaled);
		auto hi = static_cast<std::uint64_t>(static_cast<unsigned __int128>(d.scaled) >> 64);
		return std::hash<std::uint64_t> {}(lo) ^ (std::hash<std::uint64_t> {}(hi) << 1);
	}
	case ScalarType::TEXT:
		return std::hash<std::string> {}(std::get<std::string>(data_));
	case ScalarType::BOOLEAN:
		return std::get<bool>(data_) ? 0x51ed27 : 0x2545f4;
	}
	return 0;
}

bool operator==(const Value &a, const Value &b) {
	return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Value &a, const Value &b) {
	auto ta = a.type();
	auto tb = b.type();
	int ra = type_rank(ta);
	int rb = type_rank(tb);
	if (ra != rb) {
		return ra <=> rb;
	}
	switch (ta) {
	case ScalarType::NULL_TYPE:
		return std::strong_ordering::equal;
	case ScalarType::BOOLEAN:
		return a.as_boolean() <=> b.as_boolean();
	case ScalarType::TEXT:
		return a.as_text().compare(b.as_text()) <=> 0;
	case ScalarType::INTEGER:
		if (tb == ScalarType::INTEGER) {
			return a.as_integer() <=> b.as_integer();
		}
		[[fallthrough]];
	case ScalarType::DECIMAL:
		return a.as_decimal().scaled <=> b.as_decimal().scaled;
	}
	return std::strong_ordering::equal;
}

std::size_t TupleHash::operator()(const Tuple &t) const {
	std::size_t seed = t.size();
	for (const auto &v : t) {
		seed ^= v.hash() + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
	}
	return seed;
}

std::string tuple_to_string(const Tuple &t) {
	std::string out = "(";
	for (std::size_t i = 0; i < t.size(); ++i) {
		if (i > 0) {
			out += ", ";
		}
		out += t[i].type() == ScalarType::TEXT ? t[i].to_sql_literal() : t[i].to_string();
	}
	return out + ")";
}

Value add(const Value &a, const Value &b) {
	if (!numeric_operands(a, b, "+")) {
		return Value::null();
	}
	if (a.type() == ScalarType::INTEGER && b.type() == ScalarType::INTEGER) {
		std::int64_t out;
		if (__builtin_add_overflow(a.as_integer(), b.as_integer(), &out)) {
			throw Error(ErrorKind::OVERFLOW, "BIGINT overflow in addition");
		}
		return Value(out);
	}
	return Value(checked_decimal(a.as_decimal().scaled + b.as_decimal().scaled));
}

Value subtract(const Value &a, const Value &b) {
	if (!numeric_operands(a, b, "-")) {
		return Value::null();
	}
	if (a.type() == ScalarType::INTEGER && b.type() == ScalarType::INTEGER) {
		std::int64_t out;
		if (__builtin_sub_overflow(a.as_integer(), b.as_integer(), &out)) {
			throw Error(ErrorKind::OVERFLOW, "BIGINT overflow in subtraction");
		}
		return Value(out);
	}
	return Value(checked_decimal(a.as_decimal().scaled - b.as_decimal().scaled));
}

Value multiply(const Value &a, const Value &b) {
	if (!numeric_operands(a, b, "*")) {
		return Value::null();
	}
	if (a.type() == ScalarType::INTEGER && b.type() == ScalarType::INTEGER) {
		std::int64_t out;
		if (__builtin_mul_overflow(a.as_integer(), b.as_integer(), &out)) {
			throw Error(ErrorKind::OVERFLOW, "BIGINT overflow in multiplication");
		}
		return Value(out);
	}
	__int128 product;
	if (__builtin_mul_overflow(a.as_decimal().scaled, b.as_decimal().scaled, &product)) {
		throw Error(ErrorKind::OVERFLOW, "decimal overflow in multiplication");
	}
	return Value(checked_decimal(product / Decimal::ONE));
}

Value divide(const Value &a, const Value &b) {
	if (!numeric_operands(a, b, "/")) {
		return Value::null();
	}
	if (a.type() == ScalarType::INTEGER && b.type() == ScalarType::INTEGER) {
		if (b.as_integer() == 0) {
			throw Error(ErrorKind::TYPE, "division by zero");
		}
		if (a.as_integer() == INT64_MIN && b.as_integer() == -1) {
			throw Error(ErrorKind::OVERFLOW, "BIGINT overflow in division");
		}
		return Value(a.as_integer() / b.as_integer());
	}
	auto divisor = b.as_decimal().scaled;
	if (divisor == 0) {
		throw Error(ErrorKind::TYPE, "division by zero");
	}
	__int128 numerator;
	if (__builtin_mul_overflow(a.as_decimal().scaled, Decimal::ONE, &numerator)) {
		throw Error(ErrorKind::OVERFLOW, "decimal overflow in division");
	}
	return Value(checked_decimal(numerator / divisor));
}

Value negate(const Value &a) {
	if (a.is_null()) {
		return a;
	}
	if (a.type() == ScalarType::INTEGER) {
		if (a.as_integer() == INT64_MIN) {
			throw Error(ErrorKind::OVERFLOW, "BIGINT overflow in negation");
		}
		return Value(-a.as_integer());
	}
	if (a.type() == ScalarType::DECIMAL) {
		return Value(Decimal {-a.as_decimal().scaled});
	}
	throw Error(ErrorKind::TYPE, std::string("cannot negate ") + scalar_type_name(a.type()));
}

Value coerce(const Value &v, ScalarType target) {
	if (v.is_null() || v.type() == target || target == ScalarType::NULL_TYPE) {
		return v;
	}
	if (target == ScalarType::DECIMAL && v.type() == ScalarType::INTEGER) {
		return Value(v.as_decimal());
	}
	if (target == ScalarType::INTEGER && v.type() == ScalarType::DECIMAL) {
		auto d = v.as_decimal();
		__int128 whole = d.scaled / Decimal::ONE;
		if (d.is_integral() && whole <= INT64_MAX_128 && whole >= INT64_MIN_128) {
			return Value(static_cast<std::int64_t>(whole));
		}
	}
	throw Error(ErrorKind::TYPE, "cannot store " + std::string(scalar_type_name(v.type())) + " value " +
	                                 v.to_sql_literal() + " in a " + scalar_type_name(target) + " column");
}

ScalarType parse_type_name(std::string_view name) {
	std::string upper(name);
	std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
	auto paren = upper.find('(');
	std::string base = upper.substr(0, paren);
	while (!base.empty() && base.back() == ' ') {
		base.pop_back();
	}
	if (base == "INTEGER" || base == "INT" || base == "BIGINT" || base == "SMALLINT" || base == "INT4" ||
	    base == "INT8" || base == "TINYINT") {
		return ScalarType::INTEGER;
	}
	if (base == "DECIMAL" || base == "NUMERIC") {
		return ScalarType::DECIMAL;
	}
	if (base == "VARCHAR" || base == "TEXT" || base == "STRING" || base == "CHAR") {
		return ScalarType::TEXT;
	}
	if (base == "BOOLEAN" || base == "BOOL") {
		return ScalarType::BOOLEAN;
	}
	throw Error(ErrorKind::UNSUPPORTED, "unsupported column type " + std::string(name));
}

} // namespace ivmc
