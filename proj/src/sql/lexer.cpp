#include "ivmc/sql/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ivmc {

namespace {

constexpr std::array KEYWORDS = {
    "ALL",    "AND",     "AS",       "BY",       "CASE",   "CONFLICT", "CREATE",   "DELETE", "DISTINCT",
    "DO",     "ELSE",    "END",      "EXISTS",   "FALSE",  "FROM",     "FULL",     "GROUP",  "HAVING",
    "IF",     "IN",      "INDEX",    "INNER",    "INSERT", "INTO",     "IS",       "JOIN",   "LEFT",
    "LIMIT",  "MATERIALIZED", "NOT", "NULL",     "ON",     "OR",       "ORDER",    "OUTER",  "REPLACE",
    "RIGHT",  "SELECT",  "SET",      "TABLE",    "THEN",   "TRUE",     "UNION",    "UNIQUE", "UPDATE",
    "VALUES", "VIEW",    "WHEN",     "WHERE",    "WITH",   "CROSS",    "EXCEPT",   "INTERSECT", "OFFSET"};

bool is_identifier_start(char c) {
	return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier_char(char c) {
	return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

} // namespace

const char *token_kind_name(TokenKind kind) {
	switch (kind) {
	case TokenKind::KEYWORD:
		return "keyword";
	case TokenKind::IDENTIFIER:
		return "identifier";
	case TokenKind::NUMBER:
		return "number";
	case TokenKind::STRING:
		return "string";
	case TokenKind::SYMBOL:
		return "symbol";
	case TokenKind::END:
		return "end of input";
	}
	return "?";
}

bool is_reserved_keyword(std::string_view upper_word) {
	return std::find(KEYWORDS.begin(), KEYWORDS.end(), upper_word) != KEYWORDS.end();
}

std::vector<Token> tokenize(std::string_view text) {
	std::vector<Token> tokens;
	std::size_t i = 0;
	std::uint32_t line = 1;
	std::uint32_t column = 1;

	auto advance = [&](std::size_t n) {
		for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
			if (text[i] == '\n') {
				++line;
				column = 1;
			} else {
				++column;
			}
		}
	};

	while (i < text.size()) {
		char c = text[i];
		if (std::isspace(static_cast<unsigned char>(c))) {
			advance(1);
			continue;
		}
		if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
			while (i < text.size() && text[i] != '\n') {
				advance(1);
			}
			continue;
		}
		Token tok;
		tok.position = {line, column};
		tok.offset = i;
		if (is_identifier_start(c)) {
			std::size_t j = i;
			while (j < text.size() && is_identifier_char(text[j])) {
				++j;
			}
			std::string word(text.substr(i, j - i));
			std::string upper = word;
			std::transform(upper.begin(), upper.end(), upper.begin(),
			               [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
			if (is_reserved_keyword(upper)) {
				tok.kind = TokenKind::KEYWORD;
				tok.text = upper;
			} else {
				tok.kind = TokenKind::IDENTIFIER;
				tok.text = word;
			}
			advance(j - i);
		} else if (std::isdigit(static_cast<unsigned char>(c)) ||
		           (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
			std::size_t j = i;
			while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
				++j;
			}
			if (j < text.size() && text[j] == '.') {
				++j;
				while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
					++j;
				}
			}
			tok.kind = TokenKind::NUMBER;
			tok.text = std::string(text.substr(i, j - i));
			advance(j - i);
		} else if (c == '\'' || c == '"') {
			char quote = c;
			std::string value;
			std::size_t j = i + 1;
			bool closed = false;
			while (j < text.size()) {
				if (text[j] == quote) {
					if (j + 1 < text.size() && text[j + 1] == quote) {
						value.push_back(quote);
						j += 2;
						continue;
					}
					closed = true;
					break;
				}
				value.push_back(text[j]);
				++j;
			}
			if (!closed) {
				throw ParseError(ErrorKind::PARSE, tok.position,
				                 quote == '\'' ? "unterminated string literal" : "unterminated quoted identifier");
			}
			tok.kind = quote == '\'' ? TokenKind::STRING : TokenKind::IDENTIFIER;
			tok.quoted = quote == '"';
			tok.text = std::move(value);
			advance(j + 1 - i);
		} else {
			static constexpr std::array TWO_CHAR = {"<=", ">=", "<>", "!="};
			std::string sym;
			if (i + 1 < text.size()) {
				std::string two(text.substr(i, 2));
				if (std::find(TWO_CHAR.begin(), TWO_CHAR.end(), two) != TWO_CHAR.end()) {
					sym = two;
				}
			}
			if (sym.empty()) {
				static constexpr std::string_view SINGLE = "(),;.*+-/=<>";
				if (SINGLE.find(c) == std::string_view::npos) {
					throw ParseError(ErrorKind::PARSE, tok.position,
					                 std::string("illegal character '") + c + "'");
				}
				sym = std::string(1, c);
			}
			tok.kind = TokenKind::SYMBOL;
			tok.text = sym;
			advance(sym.size());
		}
		tok.length = i - tok.offset;
		tokens.push_back(std::move(tok));
	}
	Token end;
	end.kind = TokenKind::END;
	end.offset = text.size();
	end.position = {line, column};
	tokens.push_back(end);
	return tokens;
}

} // namespace ivmc
