#include "ivmc/core/schema.hpp"

#include "ivmc/core/error.hpp"

#include <set>

namespace ivmc {

std::optional<std::size_t> Schema::find(const ColumnRef &ref) const {
	std::optional<std::size_t> found;
	for (std::size_t i = 0; i < columns.size(); ++i) {
		const auto &col = columns[i];
		if (col.name != ref.name) {
			continue;
		}
		if (!ref.qualifier.empty() && col.qualifier != ref.qualifier) {
			continue;
		}
		if (found) {
			throw Error(ErrorKind::BINDER, "ambiguous column reference " + ref.to_string());
		}
		found = i;
	}
	return found;
}

std::size_t Schema::resolve(const ColumnRef &ref) const {
	auto idx = find(ref);
	if (!idx) {
		std::string where = name.empty() ? "" : " in " + name;
		throw Error(ErrorKind::BINDER, "unknown column " + ref.to_string() + where);
	}
	return *idx;
}

bool Schema::compatible_with(const Schema &other) const {
	if (columns.size() != other.columns.size()) {
		return false;
	}
	for (std::size_t i = 0; i < columns.size(); ++i) {
		auto a = columns[i].type;
		auto b = other.columns[i].type;
		if (a != b && a != ScalarType::NULL_TYPE && b != ScalarType::NULL_TYPE) {
			return false;
		}
	}
	return true;
}

void Schema::check_compatible(const Schema &other) const {
	if (!compatible_with(other)) {
		throw Error(ErrorKind::SCHEMA_MISMATCH,
		            "schema mismatch between " + (name.empty() ? std::string("<anonymous>") : name) + " and " +
		                (other.name.empty() ? std::string("<anonymous>") : other.name));
	}
}

void Schema::check_unique_names() const {
	std::set<std::string> seen;
	for (const auto &col : columns) {
		if (!seen.insert(col.name).second) {
			throw Error(ErrorKind::BINDER, "duplicate column name " + col.name + " in " + name);
		}
	}
}

Schema Schema::qualified(const std::string &qualifier) const {
	Schema out = *this;
	for (auto &col : out.columns) {
		col.qualifier = qualifier;
	}
	return out;
}

void check_tuple(const Schema &schema, const Tuple &tuple) {
	if (tuple.size() != schema.columns.size()) {
		throw Error(ErrorKind::TYPE, "tuple arity " + std::to_string(tuple.size()) + " does not match " +
		                                 std::to_string(schema.columns.size()) + " columns of " + schema.name);
	}
	for (std::size_t i = 0; i < tuple.size(); ++i) {
		auto expected = schema.columns[i].type;
		auto actual = tuple[i].type();
		if (actual == ScalarType::NULL_TYPE || expected == ScalarType::NULL_TYPE || actual == expected) {
			continue;
		}
		throw Error(ErrorKind::TYPE, "column " + schema.columns[i].name + " expects " + scalar_type_name(expected) +
		                                 ", got " + scalar_type_name(actual));
	}
}

} // namespace ivmc
