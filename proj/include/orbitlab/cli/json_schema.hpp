#pragma once

#include <json.hpp>

#include <optional>
#include <string>

namespace orbitlab::cli {

struct SchemaViolation {
  std::string path;  // JSON pointer into the instance, "" for the root
  std::string message;
};

/// Validates `instance` against `schema` using the JSON Schema keywords our
/// shipped schema relies on: type, enum, properties, required,
/// additionalProperties, items, minItems, maxItems, minimum, maximum,
/// exclusiveMinimum. Unknown keywords are ignored. Returns the first
/// violation in document order.
std::optional<SchemaViolation> validate(const nlohmann::json& schema,
                                        const nlohmann::json& instance);

}  // namespace orbitlab::cli
