#pragma once

#include "ivmc/core/expression.hpp"
#include "ivmc/core/value.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ivmc {

struct Column {
	std::string name;
	ScalarType type = ScalarType::NULL_TYPE;
	/// Table name or alias the column is visible under; empty for derived columns.
	std::string qualifier;

	friend bool operator==(const Column &, const Column &) = default;
};

struct Schema {
	std::string name;
	std::vector<Column> columns;
	std::vector<std::string> key;

	Schema() = default;
	Schema(std::string name, std::vector<Column> columns) : name(std::move(name)), columns(std::move(columns)) {
	}

	std::size_t size() const {
		return columns.size();
	}

	/// Resolves a possibly-qualified reference; raises BINDER for unknown or ambiguous names.
	std::size_t resolve(const ColumnRef &ref) const;
	std::optional<std::size_t> find(const ColumnRef &ref) const;
	std::size_t index_of(const std::string &column) const {
		return resolve({"", column});
	}

	/// Same arity and column types (names may differ).
	bool compatible_with(const Schema &other) const;
	/// Raises SCHEMA_MISMATCH when `other` is not compatible.
	void check_compatible(const Schema &other) const;
	/// Validates unique names within the schema.
	void check_unique_names() const;

	/// Copy with every column qualifier replaced.
	Schema qualified(const std::string &qualifier) const;

	friend bool operator==(const Schema &, const Schema &) = default;
};

/// Checks arity and column kinds; raises TYPE on mismatch.
void check_tuple(const Schema &schema, const Tuple &tuple);

} // namespace ivmc
