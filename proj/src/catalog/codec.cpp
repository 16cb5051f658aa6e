#include "ivmc/catalog/codec.hpp"

#include "ivmc/core/error.hpp"

#include <charconv>

namespace ivmc {

using json = nlohmann::ordered_json;

json value_to_json(const Value &v) {
	switch (v.type()) {
	case ScalarType::NULL_TYPE:
		return nullptr;
	case ScalarType::INTEGER:
		return v.as_integer();
	case ScalarType::DECIMAL:
		return v.as_decimal().to_string();
	case ScalarType::TEXT:
		return v.as_text();
	case ScalarType::BOOLEAN:
		return v.as_boolean();
	}
	return nullptr;
}

namespace {

[[noreturn]] void mismatch(const std::string &shown, ScalarType type) {
	throw Error(ErrorKind::TYPE, "value " + shown + " does not fit a " + scalar_type_name(type) + " column");
}

std::int64_t parse_integer(const std::string &text, ScalarType type) {
	std::int64_t out = 0;
	const char *end = text.data() + text.size();
	auto [ptr, ec] = std::from_chars(text.data(), end, out);
	if (ec != std::errc() || ptr != end || text.empty()) {
		mismatch("'" + text + "'", type);
	}
	return out;
}

} // namespace

Value value_from_json(const json &j, ScalarType type) {
	if (j.is_null()) {
		return Value();
	}
	switch (type) {
	case ScalarType::INTEGER:
		if (j.is_number_integer()) {
			return Value(j.get<std::int64_t>());
		}
		break;
	case ScalarType::DECIMAL:
		if (j.is_number_integer()) {
			return Value(Decimal::from_integer(j.get<std::int64_t>()));
		}
		if (j.is_number_float() || j.is_string()) {
			std::string text = j.is_string() ? j.get<std::string>() : j.dump();
			try {
				return Value(Decimal::parse(text));
			} catch (const Error &) {
				mismatch(j.dump(), type);
			}
		}
		break;
	case ScalarType::TEXT:
		if (j.is_string()) {
			return Value(j.get<std::string>());
		}
		break;
	case ScalarType::BOOLEAN:
		if (j.is_boolean()) {
			return Value(j.get<bool>());
		}
		break;
	case ScalarType::NULL_TYPE:
		break;
	}
	mismatch(j.dump(), type);
}

Value value_from_text(const std::string &text, bool quoted, ScalarType type) {
	if (text.empty() && !quoted) {
		return Value();
	}
	switch (type) {
	case ScalarType::INTEGER:
		return Value(parse_integer(text, type));
	case ScalarType::DECIMAL:
		try {
			return Value(Decimal::parse(text));
		} catch (const Error &) {
			mismatch("'" + text + "'", type);
		}
	case ScalarType::TEXT:
		return Value(text);
	case ScalarType::BOOLEAN:
		if (text == "true" || text == "TRUE" || text == "t" || text == "1") {
			return Value(true);
		}
		if (text == "false" || text == "FALSE" || text == "f" || text == "0") {
			return Value(false);
		}
		break;
	case ScalarType::NULL_TYPE:
		break;
	}
	mismatch("'" + text + "'", type);
}

} // namespace ivmc
