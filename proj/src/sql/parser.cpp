#include "ivmc/sql/parser.hpp"

#include "ivmc/sql/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

namespace ivmc {

namespace {

std::string lower(std::string s) {
	std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return s;
}

std::string upper(std::string s) {
	std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
	return s;
}

std::string describe(const Token &tok) {
	switch (tok.kind) {
	case TokenKind::END:
		return "end of input";
	case TokenKind::STRING:
		return "string '" + tok.text + "'";
	case TokenKind::KEYWORD:
		return tok.text;
	default:
		return "'" + tok.text + "'";
	}
}

/// Raised by the core grammar when it meets CREATE MATERIALIZED; parse_script reroutes the statement.
struct MaterializedSignal {
	std::size_t first_token;
};

class Parser {
public:
	Parser(std::vector<Token> tokens, bool allow_materialized)
	    : tokens_(std::move(tokens)), allow_materialized_(allow_materialized) {
	}

	bool at_end() const {
		return peek().kind == TokenKind::END;
	}
	std::size_t index() const {
		return pos_;
	}
	const Token &token(std::size_t i) const {
		return tokens_[std::min(i, tokens_.size() - 1)];
	}

	bool skip_semicolons() {
		bool any = false;
		while (peek().is_symbol(";")) {
			++pos_;
			any = true;
		}
		return any;
	}

	/// Skips to just past the next top-level semicolon (used after a rerouted statement).
	void skip_statement() {
		while (!at_end() && !peek().is_symbol(";")) {
			++pos_;
		}
	}

	Statement parse_statement() {
		const Token &tok = peek();
		if (tok.is_keyword("CREATE")) {
			return parse_create();
		}
		if (tok.is_keyword("SELECT") || tok.is_keyword("WITH")) {
			auto ctes = parse_with();
			if (peek().is_keyword("INSERT")) {
				auto insert = parse_insert();
				auto *select = std::get_if<InsertSelect>(&insert);
				if (!select) {
					unsupported(peek(), "WITH before INSERT ... VALUES");
				}
				select->query.ctes = std::move(ctes);
				return insert;
			}
			SelectStatement stmt;
			stmt.query = parse_query_body(std::move(ctes));
			return stmt;
		}
		if (tok.is_keyword("INSERT")) {
			return parse_insert();
		}
		if (tok.is_keyword("DELETE")) {
			return parse_delete();
		}
		if (tok.is_keyword("UPDATE")) {
			unsupported(tok, "UPDATE statement (express updates as DELETE plus INSERT)");
		}
		fail_expected({"CREATE", "SELECT", "WITH", "INSERT", "DELETE"});
	}

	SelectQuery parse_query() {
		auto ctes = parse_with();
		return parse_query_body(std::move(ctes));
	}

	Expr parse_expr() {
		return parse_or();
	}

	void expect_statement_end() {
		if (!at_end() && !peek().is_symbol(";")) {
			fail_expected({";", "end of input"});
		}
	}

	[[noreturn]] void fail_expected(std::initializer_list<std::string_view> expected) const {
		std::string list;
		for (auto e : expected) {
			if (!list.empty()) {
				list += ", ";
			}
			list += e;
		}
		const Token &tok = peek();
		std::string msg = "syntax error at " + describe(tok) + ": expected ";
		msg += expected.size() > 1 ? "one of " + list : list;
		throw ParseError(ErrorKind::PARSE, position_of(pos_), msg);
	}

	[[noreturn]] void unsupported(const Token &tok, const std::string &what) const {
		auto idx = static_cast<std::size_t>(&tok - tokens_.data());
		throw ParseError(ErrorKind::UNSUPPORTED, position_of(idx), "unsupported construct: " + what);
	}

private:
	const Token &peek(std::size_t ahead = 0) const {
		return token(pos_ + ahead);
	}

	const Token &next() {
		const Token &tok = peek();
		if (tok.kind != TokenKind::END) {
			++pos_;
		}
		return tok;
	}

	/// END carries a position just past the text; report the last real token instead.
	SourcePosition position_of(std::size_t idx) const {
		const Token &tok = token(idx);
		if (tok.kind == TokenKind::END) {
			if (idx > 0 && tokens_.size() > 1) {
				const Token &last = token(std::min(idx, tokens_.size() - 1) - 1);
				return last.position;
			}
			return {1, 1};
		}
		return tok.position;
	}

	bool accept_keyword(std::string_view kw) {
		if (peek().is_keyword(kw)) {
			++pos_;
			return true;
		}
		return false;
	}

	bool accept_symbol(std::string_view sym) {
		if (peek().is_symbol(sym)) {
			++pos_;
			return true;
		}
		return false;
	}

	void expect_keyword(std::string_view kw) {
		if (!accept_keyword(kw)) {
			fail_expected({kw});
		}
	}

	void expect_symbol(std::string_view sym) {
		if (!accept_symbol(sym)) {
			std::string quoted = "'" + std::string(sym) + "'";
			fail_expected({quoted});
		}
	}

	std::string expect_identifier() {
		const Token &tok = peek();
		if (tok.kind != TokenKind::IDENTIFIER) {
			fail_expected({"identifier"});
		}
		++pos_;
		return tok.quoted ? tok.text : lower(tok.text);
	}

	std::vector<std::string> parse_identifier_list() {
		expect_symbol("(");
		std::vector<std::string> names;
		do {
			names.push_back(expect_identifier());
		} while (accept_symbol(","));
		expect_symbol(")");
		return names;
	}

	Statement parse_create() {
		std::size_t start = pos_;
		expect_keyword("CREATE");
		if (peek().is_keyword("TABLE")) {
			return parse_create_table();
		}
		if (peek().is_keyword("UNIQUE") || peek().is_keyword("INDEX")) {
			return parse_create_index();
		}
		if (peek().is_keyword("MATERIALIZED")) {
			if (!allow_materialized_) {
				throw MaterializedSignal {start};
			}
			++pos_;
		}
		if (peek().is_keyword("VIEW")) {
			return parse_create_view();
		}
		fail_expected({"TABLE", "VIEW", "MATERIALIZED", "INDEX", "UNIQUE"});
	}

	Statement parse_create_table() {
		expect_keyword("TABLE");
		CreateTable stmt;
		if (accept_keyword("IF")) {
			expect_keyword("NOT");
			expect_keyword("EXISTS");
			stmt.if_not_exists = true;
		}
		stmt.name = expect_identifier();
		expect_symbol("(");
		do {
			ColumnDef col;
			col.name = expect_identifier();
			const Token &type_tok = peek();
			if (type_tok.kind != TokenKind::IDENTIFIER) {
				fail_expected({"type name"});
			}
			++pos_;
			try {
				col.type = parse_type_name(type_tok.text);
			} catch (const Error &e) {
				unsupported(type_tok, "column type " + upper(type_tok.text));
			}
			if (accept_symbol("(")) {
				do {
					if (peek().kind != TokenKind::NUMBER) {
						fail_expected({"number"});
					}
					++pos_;
				} while (accept_symbol(","));
				expect_symbol(")");
			}
			if (accept_keyword("NOT")) {
				expect_keyword("NULL");
			} else {
				accept_keyword("NULL");
			}
			stmt.columns.push_back(std::move(col));
		} while (accept_symbol(","));
		expect_symbol(")");
		return stmt;
	}

	Statement parse_create_index() {
		CreateIndex stmt;
		stmt.unique = accept_keyword("UNIQUE");
		expect_keyword("INDEX");
		stmt.name = expect_identifier();
		expect_keyword("ON");
		stmt.table = expect_identifier();
		stmt.columns = parse_identifier_list();
		return stmt;
	}

	Statement parse_create_view() {
		expect_keyword("VIEW");
		CreateView stmt;
		stmt.materialized = allow_materialized_;
		stmt.name = expect_identifier();
		expect_keyword("AS");
		stmt.query = parse_query();
		return stmt;
	}

	Statement parse_insert() {
		expect_keyword("INSERT");
		ConflictAction conflict = ConflictAction::NONE;
		if (accept_keyword("OR")) {
			expect_keyword("REPLACE");
			conflict = ConflictAction::REPLACE;
		}
		expect_keyword("INTO");
		std::string table = expect_identifier();
		std::vector<std::string> columns;
		if (peek().is_symbol("(")) {
			columns = parse_identifier_list();
		}
		if (accept_keyword("VALUES")) {
			if (conflict != ConflictAction::NONE) {
				unsupported(token(pos_ - 1), "INSERT OR REPLACE ... VALUES");
			}
			InsertValues stmt;
			stmt.table = std::move(table);
			stmt.columns = std::move(columns);
			do {
				expect_symbol("(");
				std::vector<Expr> row;
				do {
					row.push_back(parse_expr());
				} while (accept_symbol(","));
				expect_symbol(")");
				stmt.rows.push_back(std::move(row));
			} while (accept_symbol(","));
			return stmt;
		}
		if (!peek().is_keyword("SELECT") && !peek().is_keyword("WITH")) {
			fail_expected({"VALUES", "SELECT", "WITH"});
		}
		InsertSelect stmt;
		stmt.table = std::move(table);
		stmt.columns = std::move(columns);
		stmt.query = parse_query();
		stmt.conflict = conflict;
		if (peek().is_keyword("ON")) {
			if (conflict != ConflictAction::NONE) {
				unsupported(peek(), "ON CONFLICT combined with INSERT OR REPLACE");
			}
			++pos_;
			expect_keyword("CONFLICT");
			stmt.conflict_keys = parse_identifier_list();
			expect_keyword("DO");
			if (peek().kind == TokenKind::IDENTIFIER && upper(peek().text) == "NOTHING") {
				unsupported(peek(), "ON CONFLICT DO NOTHING");
			}
			expect_keyword("UPDATE");
			expect_keyword("SET");
			do {
				Assignment a;
				a.column = expect_identifier();
				expect_symbol("=");
				a.value = parse_expr();
				stmt.updates.push_back(std::move(a));
			} while (accept_symbol(","));
			stmt.conflict = ConflictAction::UPDATE;
		}
		return stmt;
	}

	Statement parse_delete() {
		expect_keyword("DELETE");
		expect_keyword("FROM");
		DeleteStatement stmt;
		stmt.table = expect_identifier();
		if (accept_keyword("WHERE")) {
			stmt.where = parse_expr();
		}
		return stmt;
	}

	std::vector<CommonTableExpr> parse_with() {
		std::vector<CommonTableExpr> ctes;
		if (!accept_keyword("WITH")) {
			return ctes;
		}
		do {
			CommonTableExpr cte;
			cte.name = expect_identifier();
			expect_keyword("AS");
			expect_symbol("(");
			cte.query = parse_query();
			expect_symbol(")");
			ctes.push_back(std::move(cte));
		} while (accept_symbol(","));
		return ctes;
	}

	SelectQuery parse_query_body(std::vector<CommonTableExpr> ctes) {
		SelectQuery query;
		query.ctes = std::move(ctes);
		query.cores.push_back(parse_core());
		while (peek().is_keyword("UNION")) {
			++pos_;
			if (!accept_keyword("ALL")) {
				unsupported(token(pos_ - 1), "UNION without ALL");
			}
			query.cores.push_back(parse_core());
		}
		const Token &tok = peek();
		if (tok.is_keyword("EXCEPT") || tok.is_keyword("INTERSECT")) {
			unsupported(tok, tok.text);
		}
		if (tok.is_keyword("ORDER")) {
			unsupported(tok, "ORDER BY");
		}
		if (tok.is_keyword("LIMIT") || tok.is_keyword("OFFSET")) {
			unsupported(tok, tok.text);
		}
		return query;
	}

	SelectCore parse_core() {
		expect_keyword("SELECT");
		SelectCore core;
		if (peek().is_keyword("DISTINCT")) {
			unsupported(peek(), "DISTINCT");
		}
		accept_keyword("ALL");
		do {
			SelectItem item;
			item.expr = parse_expr();
			if (accept_keyword("AS")) {
				item.alias = expect_identifier();
			} else if (peek().kind == TokenKind::IDENTIFIER) {
				item.alias = expect_identifier();
			}
			core.items.push_back(std::move(item));
		} while (accept_symbol(","));
		expect_keyword("FROM");
		core.from = parse_table_ref();
		if (peek().is_symbol(",")) {
			unsupported(peek(), "comma-separated FROM list (use JOIN ... ON)");
		}
		parse_join(core);
		if (accept_keyword("WHERE")) {
			core.where = parse_expr();
		}
		if (accept_keyword("GROUP")) {
			expect_keyword("BY");
			do {
				core.group_by.push_back(parse_expr());
			} while (accept_symbol(","));
		}
		if (peek().is_keyword("HAVING")) {
			unsupported(peek(), "HAVING");
		}
		return core;
	}

	TableRef parse_table_ref() {
		if (peek().is_symbol("(")) {
			unsupported(peek(), "subquery in FROM");
		}
		TableRef ref;
		ref.name = expect_identifier();
		if (accept_keyword("AS")) {
			ref.alias = expect_identifier();
		} else if (peek().kind == TokenKind::IDENTIFIER) {
			ref.alias = expect_identifier();
		}
		return ref;
	}

	void parse_join(SelectCore &core) {
		while (true) {
			const Token &tok = peek();
			JoinType type = JoinType::INNER;
			if (tok.is_keyword("RIGHT") || tok.is_keyword("FULL") || tok.is_keyword("CROSS")) {
				unsupported(tok, tok.text + " JOIN");
			}
			if (tok.is_keyword("LEFT")) {
				++pos_;
				accept_keyword("OUTER");
				type = JoinType::LEFT;
			} else if (tok.is_keyword("INNER")) {
				++pos_;
			} else if (!tok.is_keyword("JOIN")) {
				return;
			}
			const Token &join_tok = peek();
			expect_keyword("JOIN");
			if (core.join) {
				unsupported(join_tok, "more than one JOIN");
			}
			JoinClause join;
			join.type = type;
			join.table = parse_table_ref();
			expect_keyword("ON");
			join.condition = parse_expr();
			core.join = std::move(join);
		}
	}

	Expr parse_or() {
		Expr left = parse_and();
		while (accept_keyword("OR")) {
			left = Expr::binary(ExprOp::OR, std::move(left), parse_and());
		}
		return left;
	}

	Expr parse_and() {
		Expr left = parse_not();
		while (accept_keyword("AND")) {
			left = Expr::binary(ExprOp::AND, std::move(left), parse_not());
		}
		return left;
	}

	Expr parse_not() {
		if (accept_keyword("NOT")) {
			return Expr::unary(ExprOp::NOT, parse_not());
		}
		return parse_comparison();
	}

	Expr parse_comparison() {
		Expr left = parse_additive();
		const Token &tok = peek();
		if (tok.kind == TokenKind::SYMBOL) {
			ExprOp op = ExprOp::NONE;
			if (tok.text == "=") {
				op = ExprOp::EQ;
			} else if (tok.text == "<>" || tok.text == "!=") {
				op = ExprOp::NE;
			} else if (tok.text == "<") {
				op = ExprOp::LT;
			} else if (tok.text == "<=") {
				op = ExprOp::LE;
			} else if (tok.text == ">") {
				op = ExprOp::GT;
			} else if (tok.text == ">=") {
				op = ExprOp::GE;
			}
			if (op != ExprOp::NONE) {
				++pos_;
				return Expr::binary(op, std::move(left), parse_additive());
			}
		}
		if (tok.is_keyword("IS")) {
			++pos_;
			bool negated = accept_keyword("NOT");
			expect_keyword("NULL");
			return Expr::is_null(std::move(left), negated);
		}
		if (tok.is_keyword("IN")) {
			unsupported(tok, "IN");
		}
		return left;
	}

	Expr parse_additive() {
		Expr left = parse_multiplicative();
		while (true) {
			if (accept_symbol("+")) {
				left = Expr::binary(ExprOp::ADD, std::move(left), parse_multiplicative());
			} else if (accept_symbol("-")) {
				left = Expr::binary(ExprOp::SUB, std::move(left), parse_multiplicative());
			} else {
				return left;
			}
		}
	}

	Expr parse_multiplicative() {
		Expr left = parse_unary();
		while (true) {
			if (accept_symbol("*")) {
				left = Expr::binary(ExprOp::MUL, std::move(left), parse_unary());
			} else if (accept_symbol("/")) {
				left = Expr::binary(ExprOp::DIV, std::move(left), parse_unary());
			} else {
				return left;
			}
		}
	}

	Expr parse_unary() {
		if (peek().is_symbol("-")) {
			++pos_;
			if (peek().kind == TokenKind::NUMBER) {
				return number_literal(next(), true);
			}
			return Expr::unary(ExprOp::NEG, parse_unary());
		}
		if (peek().is_symbol("+")) {
			++pos_;
			return parse_unary();
		}
		return parse_primary();
	}

	Expr number_literal(const Token &tok, bool negative) {
		if (tok.text.find('.') != std::string::npos) {
			try {
				Decimal d = Decimal::parse(tok.text);
				if (negative) {
					d.scaled = -d.scaled;
				}
				return Expr::literal(Value(d));
			} catch (const Error &e) {
				throw ParseError(ErrorKind::PARSE, tok.position, std::string("invalid number: ") + e.what());
			}
		}
		__int128 v = 0;
		for (char c : tok.text) {
			v = v * 10 + (c - '0');
			if (v > static_cast<__int128>(INT64_MAX) + 1) {
				throw ParseError(ErrorKind::PARSE, tok.position, "integer literal out of range: " + tok.text);
			}
		}
		if (negative) {
			v = -v;
		}
		if (v > INT64_MAX) {
			throw ParseError(ErrorKind::PARSE, tok.position, "integer literal out of range: " + tok.text);
		}
		return Expr::literal(Value(static_cast<std::int64_t>(v)));
	}

	Expr parse_primary() {
		const Token &tok = peek();
		switch (tok.kind) {
		case TokenKind::NUMBER:
			++pos_;
			return number_literal(tok, false);
		case TokenKind::STRING:
			++pos_;
			return Expr::literal(Value(tok.text));
		case TokenKind::KEYWORD:
			if (tok.is_keyword("TRUE") || tok.is_keyword("FALSE")) {
				++pos_;
				return Expr::literal(Value(tok.text == "TRUE"));
			}
			if (tok.is_keyword("NULL")) {
				++pos_;
				return Expr::literal(Value::null());
			}
			if (tok.is_keyword("CASE")) {
				return parse_case();
			}
			if (tok.is_keyword("EXISTS")) {
				unsupported(tok, "EXISTS subquery");
			}
			break;
		case TokenKind::SYMBOL:
			if (tok.is_symbol("(")) {
				++pos_;
				if (peek().is_keyword("SELECT") || peek().is_keyword("WITH")) {
					unsupported(peek(), "subquery");
				}
				Expr inner = parse_expr();
				expect_symbol(")");
				return inner;
			}
			if (tok.is_symbol("*")) {
				++pos_;
				return Expr::star();
			}
			break;
		case TokenKind::IDENTIFIER:
			return parse_identifier_expr();
		case TokenKind::END:
			break;
		}
		fail_expected({"expression"});
	}

	Expr parse_case() {
		expect_keyword("CASE");
		if (!peek().is_keyword("WHEN")) {
			unsupported(peek(), "simple CASE (use CASE WHEN <condition>)");
		}
		std::vector<std::pair<Expr, Expr>> branches;
		while (accept_keyword("WHEN")) {
			Expr when = parse_expr();
			expect_keyword("THEN");
			branches.emplace_back(std::move(when), parse_expr());
		}
		std::optional<Expr> otherwise;
		if (accept_keyword("ELSE")) {
			otherwise = parse_expr();
		}
		expect_keyword("END");
		return Expr::case_when(std::move(branches), otherwise ? &*otherwise : nullptr);
	}

	Expr parse_identifier_expr() {
		const Token &first = peek();
		std::string name = expect_identifier();
		if (peek().is_symbol("(") && !first.quoted) {
			return parse_function(first, name);
		}
		if (accept_symbol(".")) {
			if (peek().is_symbol("*")) {
				unsupported(peek(), "qualified star");
			}
			std::string column = expect_identifier();
			return Expr::column(std::move(name), std::move(column));
		}
		return Expr::column("", std::move(name));
	}

	Expr parse_function(const Token &name_tok, const std::string &name) {
		std::string fn = lower(name);
		if (fn == "avg" || fn == "min" || fn == "max") {
			unsupported(name_tok, upper(fn) + " aggregate");
		}
		if (fn != "sum" && fn != "count" && fn != "coalesce") {
			unsupported(name_tok, "function " + upper(fn));
		}
		expect_symbol("(");
		if (peek().is_keyword("DISTINCT")) {
			unsupported(peek(), "DISTINCT aggregate");
		}
		std::vector<Expr> args;
		if (!peek().is_symbol(")")) {
			do {
				args.push_back(parse_expr());
			} while (accept_symbol(","));
		}
		expect_symbol(")");
		if (peek().is_keyword("OVER") || (peek().kind == TokenKind::IDENTIFIER && upper(peek().text) == "OVER")) {
			unsupported(peek(), "window function");
		}
		bool star_ok = fn == "count" && args.size() == 1;
		for (const auto &a : args) {
			if (a.kind == ExprKind::STAR && !star_ok) {
				throw ParseError(ErrorKind::PARSE, name_tok.position, "'*' is only valid as COUNT(*)");
			}
		}
		if ((fn == "sum" || fn == "count") && args.size() != 1) {
			throw ParseError(ErrorKind::PARSE, name_tok.position, upper(fn) + " takes exactly one argument");
		}
		if (fn == "coalesce" && args.empty()) {
			throw ParseError(ErrorKind::PARSE, name_tok.position, "COALESCE needs at least one argument");
		}
		return Expr::function(fn, std::move(args));
	}

	std::vector<Token> tokens_;
	std::size_t pos_ = 0;
	bool allow_materialized_;
};

std::vector<ScriptStatement> parse_script_impl(std::string_view text) {
	auto tokens = tokenize(text);
	Parser parser(tokens, false);
	std::vector<ScriptStatement> out;
	parser.skip_semicolons();
	while (!parser.at_end()) {
		std::size_t first = parser.index();
		const Token &first_tok = parser.token(first);
		ScriptStatement entry;
		entry.position = first_tok.position;
		try {
			entry.statement = parser.parse_statement();
			parser.expect_statement_end();
		} catch (const MaterializedSignal &signal) {
			parser.skip_statement();
			// Hand the statement, with everything else blanked so positions stay valid, to the
			// fallback path.
			std::size_t begin = parser.token(signal.first_token).offset;
			std::size_t end = parser.at_end() ? text.size() : parser.token(parser.index()).offset;
			std::string isolated(text);
			for (std::size_t i = 0; i < isolated.size(); ++i) {
				if ((i < begin || i >= end) && isolated[i] != '\n') {
					isolated[i] = ' ';
				}
			}
			auto view = strip_materialized(isolated);
			CreateView stmt;
			stmt.name = std::move(view.name);
			stmt.query = std::move(view.query);
			stmt.materialized = true;
			entry.statement = std::move(stmt);
		}
		std::size_t last = parser.index() - 1;
		const Token &last_tok = parser.token(last);
		entry.text = std::string(text.substr(first_tok.offset, last_tok.offset + last_tok.length - first_tok.offset));
		out.push_back(std::move(entry));
		if (!parser.skip_semicolons() && !parser.at_end()) {
			parser.fail_expected({";"});
		}
	}
	return out;
}

} // namespace

std::vector<ScriptStatement> parse_script(std::string_view text) {
	return parse_script_impl(text);
}

std::vector<Statement> parse_statements(std::string_view text) {
	std::vector<Statement> out;
	for (auto &s : parse_script_impl(text)) {
		out.push_back(std::move(s.statement));
	}
	return out;
}

SelectQuery parse_query(std::string_view text) {
	Parser parser(tokenize(text), false);
	SelectQuery query = parser.parse_query();
	parser.skip_semicolons();
	if (!parser.at_end()) {
		parser.fail_expected({"end of input"});
	}
	return query;
}

Expr parse_expression(std::string_view text) {
	Parser parser(tokenize(text), false);
	Expr e = parser.parse_expr();
	if (!parser.at_end()) {
		parser.fail_expected({"end of input"});
	}
	return e;
}

MaterializedViewText strip_materialized(std::string_view stmt_text) {
	auto tokens = tokenize(stmt_text);
	if (tokens.size() < 4 || !tokens[0].is_keyword("CREATE") || !tokens[1].is_keyword("MATERIALIZED") ||
	    !tokens[2].is_keyword("VIEW")) {
		SourcePosition pos = tokens.front().kind == TokenKind::END ? SourcePosition {} : tokens.front().position;
		throw ParseError(ErrorKind::PARSE, pos, "not a CREATE MATERIALIZED VIEW statement");
	}
	std::string plain(stmt_text);
	std::fill_n(plain.begin() + static_cast<std::ptrdiff_t>(tokens[1].offset), tokens[1].length, ' ');

	Parser parser(tokenize(plain), false);
	Statement stmt = parser.parse_statement();
	parser.skip_semicolons();
	if (!parser.at_end()) {
		parser.fail_expected({"end of input"});
	}
	auto &view = std::get<CreateView>(stmt);
	return {std::move(view.name), std::move(view.query)};
}

} // namespace ivmc
