#include "ivmc/emit/render.hpp"

#include "ivmc/core/error.hpp"
#include "ivmc/sql/lexer.hpp"

#include <algorithm>
#include <cctype>

namespace ivmc {

namespace {

constexpr int PREC_OR = 1;
constexpr int PREC_AND = 2;
constexpr int PREC_NOT = 3;
constexpr int PREC_COMPARE = 4;
constexpr int PREC_ADD = 5;
constexpr int PREC_MUL = 6;
constexpr int PREC_UNARY = 7;
constexpr int PREC_ATOM = 8;

int binary_precedence(ExprOp op) {
	switch (op) {
	case ExprOp::OR:
		return PREC_OR;
	case ExprOp::AND:
		return PREC_AND;
	case ExprOp::ADD:
	case ExprOp::SUB:
		return PREC_ADD;
	case ExprOp::MUL:
	case ExprOp::DIV:
		return PREC_MUL;
	default:
		return PREC_COMPARE;
	}
}

int precedence(const Expr &e) {
	switch (e.kind) {
	case ExprKind::BINARY:
		return binary_precedence(e.op);
	case ExprKind::UNARY:
		return e.op == ExprOp::NOT ? PREC_NOT : PREC_UNARY;
	case ExprKind::IS_NULL:
		return PREC_COMPARE;
	default:
		return PREC_ATOM;
	}
}

std::string upper(std::string s) {
	std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
	return s;
}

std::string render(const Expr &e);

std::string wrap(const Expr &e, int required) {
	std::string text = render(e);
	return precedence(e) < required ? "(" + text + ")" : text;
}

std::string render(const Expr &e) {
	switch (e.kind) {
	case ExprKind::LITERAL:
		return e.value.to_sql_literal();
	case ExprKind::COLUMN:
		return e.qualifier.empty() ? quote_identifier(e.name)
		                           : quote_identifier(e.qualifier) + "." + quote_identifier(e.name);
	case ExprKind::STAR:
		return "*";
	case ExprKind::UNARY: {
		if (e.op == ExprOp::NOT) {
			return "NOT " + wrap(e.args[0], PREC_NOT);
		}
		std::string operand = wrap(e.args[0], PREC_UNARY);
		if (!operand.empty() && operand[0] == '-') {
			operand = "(" + operand + ")";
		}
		return "-" + operand;
	}
	case ExprKind::BINARY: {
		int p = binary_precedence(e.op);
		int left_req = p == PREC_COMPARE ? PREC_ADD : p;
		int right_req = p == PREC_COMPARE ? PREC_ADD : p + 1;
		return wrap(e.args[0], left_req) + " " + expr_op_symbol(e.op) + " " + wrap(e.args[1], right_req);
	}
	case ExprKind::IS_NULL:
		return wrap(e.args[0], PREC_ADD) + (e.flag ? " IS NOT NULL" : " IS NULL");
	case ExprKind::CASE: {
		std::string out = "CASE";
		std::size_t pairs = (e.args.size() - (e.flag ? 1 : 0)) / 2;
		for (std::size_t i = 0; i < pairs; ++i) {
			out += " WHEN " + render(e.args[2 * i]) + " THEN " + render(e.args[2 * i + 1]);
		}
		if (e.flag) {
			out += " ELSE " + render(e.args.back());
		}
		return out + " END";
	}
	case ExprKind::FUNCTION: {
		std::string out = upper(e.name) + "(";
		for (std::size_t i = 0; i < e.args.size(); ++i) {
			out += (i ? ", " : "") + render(e.args[i]);
		}
		return out + ")";
	}
	}
	throw Error(ErrorKind::INTERNAL, "unknown expression kind");
}

std::string identifier_list(const std::vector<std::string> &names) {
	std::string out = "(";
	for (std::size_t i = 0; i < names.size(); ++i) {
		out += (i ? ", " : "") + quote_identifier(names[i]);
	}
	return out + ")";
}

std::string render_table_ref(const TableRef &ref) {
	std::string out = quote_identifier(ref.name);
	if (!ref.alias.empty()) {
		out += " AS " + quote_identifier(ref.alias);
	}
	return out;
}

std::string render_core(const SelectCore &core) {
	std::string out = "SELECT ";
	for (std::size_t i = 0; i < core.items.size(); ++i) {
		const auto &item = core.items[i];
		out += (i ? ", " : "") + render_expr(item.expr);
		if (!item.alias.empty()) {
			out += " AS " + quote_identifier(item.alias);
		}
	}
	out += "\nFROM " + render_table_ref(core.from);
	if (core.join) {
		out += core.join->type == JoinType::LEFT ? "\nLEFT JOIN " : "\nJOIN ";
		out += render_table_ref(core.join->table) + " ON " + render_expr(core.join->condition);
	}
	if (core.where) {
		out += "\nWHERE " + render_expr(*core.where);
	}
	if (!core.group_by.empty()) {
		out += "\nGROUP BY ";
		for (std::size_t i = 0; i < core.group_by.size(); ++i) {
			out += (i ? ", " : "") + render_expr(core.group_by[i]);
		}
	}
	return out;
}

std::string render_ctes(const std::vector<CommonTableExpr> &ctes) {
	std::string out = "WITH ";
	for (std::size_t i = 0; i < ctes.size(); ++i) {
		if (i) {
			out += ",\n";
		}
		out += quote_identifier(ctes[i].name) + " AS (\n" + render_query(ctes[i].query) + ")";
	}
	return out;
}

std::string render_cores(const std::vector<SelectCore> &cores) {
	std::string out;
	for (std::size_t i = 0; i < cores.size(); ++i) {
		if (i) {
			out += "\nUNION ALL\n";
		}
		out += render_core(cores[i]);
	}
	return out;
}

} // namespace

const char *dialect_name(Dialect dialect) {
	switch (dialect) {
	case Dialect::GENERIC:
		return "generic";
	case Dialect::DUCK_STYLE:
		return "duck";
	case Dialect::POSTGRES_STYLE:
		return "postgres";
	}
	return "?";
}

Dialect parse_dialect(std::string_view name) {
	if (name == "generic") {
		return Dialect::GENERIC;
	}
	if (name == "duck") {
		return Dialect::DUCK_STYLE;
	}
	if (name == "postgres") {
		return Dialect::POSTGRES_STYLE;
	}
	throw Error(ErrorKind::UNSUPPORTED, "unknown dialect '" + std::string(name) + "'");
}

std::string render_type(ScalarType type, Dialect dialect) {
	if (dialect == Dialect::POSTGRES_STYLE) {
		switch (type) {
		case ScalarType::DECIMAL:
			return "NUMERIC(38,9)";
		case ScalarType::TEXT:
			return "TEXT";
		default:
			break;
		}
	}
	if (type == ScalarType::NULL_TYPE) {
		throw Error(ErrorKind::TYPE, "column of unknown type (NULL literal) cannot be materialized");
	}
	return scalar_type_name(type);
}

std::string quote_identifier(const std::string &name) {
	bool plain = !name.empty() && (std::islower(static_cast<unsigned char>(name[0])) || name[0] == '_');
	for (char c : name) {
		if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_')) {
			plain = false;
		}
	}
	if (plain && !is_reserved_keyword(upper(name))) {
		return name;
	}
	std::string out = "\"";
	for (char c : name) {
		if (c == '"') {
			out += "\"\"";
		} else {
			out.push_back(c);
		}
	}
	return out + "\"";
}

std::string render_expr(const Expr &e) {
	return render(e);
}

std::string render_query(const SelectQuery &q) {
	std::string out;
	if (!q.ctes.empty()) {
		out = render_ctes(q.ctes) + "\n";
	}
	return out + render_cores(q.cores);
}

std::string render_statement(const Statement &stmt, Dialect dialect) {
	struct Visitor {
		Dialect dialect;

		std::string operator()(const CreateTable &s) const {
			std::string out = "CREATE TABLE ";
			if (s.if_not_exists) {
				out += "IF NOT EXISTS ";
			}
			out += quote_identifier(s.name) + " (";
			for (std::size_t i = 0; i < s.columns.size(); ++i) {
				out += (i ? ", " : "") + quote_identifier(s.columns[i].name) + " " +
				       render_type(s.columns[i].type, dialect);
			}
			return out + ")";
		}
		std::string operator()(const CreateView &s) const {
			return std::string("CREATE ") + (s.materialized ? "MATERIALIZED " : "") + "VIEW " +
			       quote_identifier(s.name) + " AS\n" + render_query(s.query);
		}
		std::string operator()(const CreateIndex &s) const {
			return std::string("CREATE ") + (s.unique ? "UNIQUE " : "") + "INDEX " + quote_identifier(s.name) +
			       " ON " + quote_identifier(s.table) + " " + identifier_list(s.columns);
		}
		std::string operator()(const SelectStatement &s) const {
			return render_query(s.query);
		}
		std::string operator()(const InsertValues &s) const {
			std::string out = "INSERT INTO " + quote_identifier(s.table);
			if (!s.columns.empty()) {
				out += " " + identifier_list(s.columns);
			}
			out += " VALUES ";
			for (std::size_t r = 0; r < s.rows.size(); ++r) {
				out += r ? ", (" : "(";
				for (std::size_t i = 0; i < s.rows[r].size(); ++i) {
					out += (i ? ", " : "") + render_expr(s.rows[r][i]);
				}
				out += ")";
			}
			return out;
		}
		std::string operator()(const InsertSelect &s) const {
			std::string target = quote_identifier(s.table);
			if (!s.columns.empty()) {
				target += " " + identifier_list(s.columns);
			}
			if (s.conflict != ConflictAction::UPDATE) {
				std::string head = s.conflict == ConflictAction::REPLACE ? "INSERT OR REPLACE INTO " : "INSERT INTO ";
				return head + target + "\n" + render_query(s.query);
			}
			std::string out;
			if (!s.query.ctes.empty()) {
				out = render_ctes(s.query.ctes) + "\n";
			}
			out += "INSERT INTO " + target + "\n" + render_cores(s.query.cores);
			out += "\nON CONFLICT " + identifier_list(s.conflict_keys) + " DO UPDATE SET ";
			for (std::size_t i = 0; i < s.updates.size(); ++i) {
				out += (i ? ", " : "") + quote_identifier(s.updates[i].column) + " = " +
				       render_expr(s.updates[i].value);
			}
			return out;
		}
		std::string operator()(const DeleteStatement &s) const {
			std::string out = "DELETE FROM " + quote_identifier(s.table);
			if (s.where) {
				out += " WHERE " + render_expr(*s.where);
			}
			return out;
		}
	};
	return std::visit(Visitor {dialect}, stmt) + ";";
}

std::string render_script(const std::vector<Statement> &stmts, Dialect dialect) {
	std::string out;
	for (const auto &s : stmts) {
		out += render_statement(s, dialect) + "\n";
	}
	return out;
}

} // namespace ivmc
