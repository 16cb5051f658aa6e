#pragma once

#include "ivmc/core/value.hpp"

#include <json.hpp>
#include <string>

namespace ivmc {

/// JSON form of a scalar: numbers for INTEGER, strings for DECIMAL (exact) and TEXT.
nlohmann::ordered_json value_to_json(const Value &v);

/// Reads a JSON scalar into a column of type `type`; raises TYPE on a mismatch. DECIMAL accepts
/// numbers and numeric strings.
Value value_from_json(const nlohmann::ordered_json &j, ScalarType type);

/// Reads an unquoted text field (CSV). An empty field is NULL unless `quoted`.
Value value_from_text(const std::string &text, bool quoted, ScalarType type);

} // namespace ivmc
