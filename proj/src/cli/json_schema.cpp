#include "orbitlab/cli/json_schema.hpp"

#include <cmath>

namespace orbitlab::cli {

namespace {

using nlohmann::json;

bool has_type(const json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "number") return value.is_number();
  if (type == "integer") {
    if (value.is_number_integer()) return true;
    if (value.is_number_float()) {
      const double d = value.get<double>();
      return std::isfinite(d) && std::floor(d) == d;
    }
    return false;
  }
  return false;
}

std::string escape(const std::string& key) {
  std::string out;
  for (const char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

std::optional<SchemaViolation> check(const json& schema, const json& value, const std::string& path) {
  auto fail = [&](std::string msg) { return SchemaViolation{path, std::move(msg)}; };

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) ok = has_type(value, it->get<std::string>());
    else
      for (const auto& t : *it) ok = ok || has_type(value, t.get<std::string>());
    if (!ok) return fail("expected type " + it->dump());
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool ok = false;
    for (const auto& option : *it) ok = ok || option == value;
    if (!ok) return fail("value " + value.dump() + " is not one of " + it->dump());
  }
  if (value.is_number()) {
    const double v = value.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && v < it->get<double>())
      return fail("must be >= " + it->dump());
    if (auto it = schema.find("maximum"); it != schema.end() && v > it->get<double>())
      return fail("must be <= " + it->dump());
    if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && !(v > it->get<double>()))
      return fail("must be > " + it->dump());
  }
  if (value.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && value.size() < it->get<std::size_t>())
      return fail("needs at least " + it->dump() + " items");
    if (auto it = schema.find("maxItems"); it != schema.end() && value.size() > it->get<std::size_t>())
      return fail("allows at most " + it->dump() + " items");
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < value.size(); ++i)
        if (auto v = check(*it, value[i], path + "/" + std::to_string(i))) return v;
    }
  }
  if (value.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it)
        if (!value.contains(key.get<std::string>()))
          return fail("missing required property '" + key.get<std::string>() + "'");
    }
    const json* props = nullptr;
    if (auto it = schema.find("properties"); it != schema.end()) props = &*it;
    for (const auto& [key, child] : value.items()) {
      const std::string child_path = path + "/" + escape(key);
      if (props && props->contains(key)) {
        if (auto v = check((*props)[key], child, child_path)) return v;
        continue;
      }
      if (auto it = schema.find("additionalProperties"); it != schema.end()) {
        if (it->is_boolean() && !it->get<bool>())
          return SchemaViolation{child_path, "unknown property '" + key + "'"};
        if (it->is_object())
          if (auto v = check(*it, child, child_path)) return v;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<SchemaViolation> validate(const nlohmann::json& schema, const nlohmann::json& instance) {
  return check(schema, instance, "");
}

}  // namespace orbitlab::cli
