#pragma once

#include "ivmc/core/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ivmc {

enum class TokenKind : std::uint8_t { KEYWORD, IDENTIFIER, NUMBER, STRING, SYMBOL, END };

const char *token_kind_name(TokenKind kind);

struct Token {
	TokenKind kind = TokenKind::END;
	/// Source slice; keywords are additionally upper-cased, strings and quoted identifiers unescaped.
	std::string text;
	SourcePosition position;
	std::size_t offset = 0;
	std::size_t length = 0;
	/// Identifier written with double quotes (case preserved).
	bool quoted = false;

	bool is_keyword(std::string_view kw) const {
		return kind == TokenKind::KEYWORD && text == kw;
	}
	bool is_symbol(std::string_view sym) const {
		return kind == TokenKind::SYMBOL && text == sym;
	}
};

bool is_reserved_keyword(std::string_view upper_word);

/// Splits SQL text into tokens. The returned list always ends with an END token. Keywords are
/// case-insensitive; `--` comments are skipped. Raises ParseError for unterminated strings or
/// quoted identifiers and for illegal characters.
std::vector<Token> tokenize(std::string_view text);

} // namespace ivmc
