#pragma once

#include "ivmc/sql/statement.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ivmc {

/// Target SQL surface. GENERIC and DUCK_STYLE upsert with `INSERT OR REPLACE INTO`; POSTGRES_STYLE
/// uses `INSERT ... ON CONFLICT (keys) DO UPDATE SET` and PostgreSQL type names.
enum class Dialect : std::uint8_t { GENERIC, DUCK_STYLE, POSTGRES_STYLE };

/// Command-line spelling: generic, duck, postgres.
const char *dialect_name(Dialect dialect);
Dialect parse_dialect(std::string_view name);

/// Column type as written in DDL for the dialect.
std::string render_type(ScalarType type, Dialect dialect);

/// Double-quotes names that are not plain lower-case identifiers or that collide with keywords.
std::string quote_identifier(const std::string &name);

std::string render_expr(const Expr &e);
std::string render_query(const SelectQuery &q);

/// Renders one statement with a trailing semicolon. Upsert form follows the tree: REPLACE trees
/// render as INSERT OR REPLACE, UPDATE trees as a leading WITH plus ON CONFLICT.
std::string render_statement(const Statement &stmt, Dialect dialect);

/// Statements separated by newlines, ending in a newline.
std::string render_script(const std::vector<Statement> &stmts, Dialect dialect);

} // namespace ivmc
