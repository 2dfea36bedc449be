#pragma once

#include "pidmd/errors.hpp"
#include "pidmd/linalg.hpp"

#include "json.hpp"

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace pidmd::json_util {

using nlohmann::json;

/// Rejects keys outside `allowed` and missing `required` keys.
inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                       std::initializer_list<std::string_view> required,
                       std::string_view context) {
  if (!j.is_object()) fail(ErrorKind::InvalidInput, std::string(context) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      fail(ErrorKind::InvalidInput, std::string(context) + ": unknown key '" + key + "'");
    }
  }
  for (auto r : required) {
    if (!j.contains(std::string(r))) {
      fail(ErrorKind::InvalidInput,
           std::string(context) + ": missing key '" + std::string(r) + "'");
    }
  }
}

inline json to_json(const RealVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline RealVector vector_from_json(const json& j, std::string_view context) {
  if (j.is_number()) return RealVector::Constant(1, j.get<double>());
  if (!j.is_array()) fail(ErrorKind::InvalidInput, std::string(context) + ": expected an array");
  RealVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      fail(ErrorKind::InvalidInput, std::string(context) + ": expected numbers");
    }
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

template <typename T>
T get(const json& j, std::string_view key, std::string_view context) {
  try {
    return j.at(std::string(key)).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput,
         std::string(context) + ": bad value for '" + std::string(key) + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, std::string_view key, T fallback, std::string_view context) {
  if (!j.contains(std::string(key))) return fallback;
  return get<T>(j, key, context);
}

}  // namespace pidmd::json_util
