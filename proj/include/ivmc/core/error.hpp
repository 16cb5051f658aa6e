#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ivmc {

enum class ErrorKind : std::uint8_t {
	PARSE,
	UNSUPPORTED,
	BINDER,
	TYPE,
	SCHEMA_MISMATCH,
	NEGATIVE_STATE,
	COLLISION,
	CONSTRAINT,
	OVERFLOW,
	CHANGELOG,
	IO,
	CATALOG,
	INJECTED,
	INTERNAL
};

/// Short lower-case tag used in machine-readable error lines.
const char *error_kind_name(ErrorKind kind);

/// 1-based line/column inside a SQL source text.
struct SourcePosition {
	std::uint32_t line = 1;
	std::uint32_t column = 1;

	friend bool operator==(const SourcePosition &, const SourcePosition &) = default;
	friend auto operator<=>(const SourcePosition &, const SourcePosition &) = default;
};

class Error : public std::runtime_error {
public:
	Error(ErrorKind kind, const std::string &message) : std::runtime_error(message), kind_(kind) {
	}

	ErrorKind kind() const noexcept {
		return kind_;
	}

private:
	ErrorKind kind_;
};

/// Error raised by the tokenizer or parser; always carries a position inside the source text.
class ParseError : public Error {
public:
	ParseError(ErrorKind kind, SourcePosition position, const std::string &message)
	    : Error(kind, format(position, message)), position_(position), detail_(message) {
	}

	SourcePosition position() const noexcept {
		return position_;
	}
	const std::string &detail() const noexcept {
		return detail_;
	}

private:
	static std::string format(SourcePosition pos, const std::string &message) {
		return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
	}

	SourcePosition position_;
	std::string detail_;
};

} // namespace ivmc
