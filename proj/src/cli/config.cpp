#include "config.hpp"

#include <cmath>

namespace bincat::cli {

using nlohmann::json;

Config::Config(const json& raw) : raw_(raw) {
  if (!raw_.is_object()) throw InvalidArgument("config must be a JSON object");
}

const json& Config::lookup(const std::string& key) {
  seen_.insert(key);
  return raw_.at(key);
}

namespace {

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw InvalidArgument("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidArgument("'" + key + "' must be finite");
  return x;
}

std::uint64_t as_count(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (x >= 0.0 && x <= 9.0e18 && std::floor(x) == x) return static_cast<std::uint64_t>(x);
  }
  throw InvalidArgument("'" + key + "' must be a non-negative integer");
}

}  // namespace

double Config::number(const std::string& key) {
  if (!raw_.contains(key)) throw InvalidArgument("missing required key '" + key + "'");
  const double x = as_number(lookup(key), key);
  resolved_[key] = x;
  return x;
}

double Config::number(const std::string& key, double fallback) {
  if (!raw_.contains(key)) {
    seen_.insert(key);
    resolved_[key] = fallback;
    return fallback;
  }
  return number(key);
}

std::uint64_t Config::count(const std::string& key) {
  if (!raw_.contains(key)) throw InvalidArgument("missing required key '" + key + "'");
  const std::uint64_t x = as_count(lookup(key), key);
  resolved_[key] = x;
  return x;
}

std::uint64_t Config::count(const std::string& key, std::uint64_t fallback) {
  if (!raw_.contains(key)) {
    seen_.insert(key);
    resolved_[key] = fallback;
    return fallback;
  }
  return count(key);
}

bool Config::flag(const std::string& key, bool fallback) {
  bool x = fallback;
  if (raw_.contains(key)) {
    const json& v = lookup(key);
    if (!v.is_boolean()) throw InvalidArgument("'" + key + "' must be true or false");
    x = v.get<bool>();
  }
  seen_.insert(key);
  resolved_[key] = x;
  return x;
}

std::string Config::text(const std::string& key, const std::string& fallback) {
  std::string x = fallback;
  if (raw_.contains(key)) {
    const json& v = lookup(key);
    if (!v.is_string()) throw InvalidArgument("'" + key + "' must be a string");
    x = v.get<std::string>();
  }
  seen_.insert(key);
  resolved_[key] = x;
  return x;
}

std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) {
  std::vector<double> out = std::move(fallback);
  if (raw_.contains(key)) {
    const json& v = lookup(key);
    if (!v.is_array()) throw InvalidArgument("'" + key + "' must be an array");
    out.clear();
    for (const json& e : v) out.push_back(as_number(e, key));
  }
  seen_.insert(key);
  resolved_[key] = out;
  return out;
}

std::vector<std::uint64_t> Config::counts(const std::string& key,
                                          std::vector<std::uint64_t> fallback) {
  std::vector<std::uint64_t> out = std::move(fallback);
  if (raw_.contains(key)) {
    const json& v = lookup(key);
    if (!v.is_array()) throw InvalidArgument("'" + key + "' must be an array");
    out.clear();
    for (const json& e : v) out.push_back(as_count(e, key));
  }
  seen_.insert(key);
  resolved_[key] = out;
  return out;
}

void Config::set(const std::string& key, const json& value) {
  seen_.insert(key);
  resolved_[key] = value;
}

bool Config::has_section(const std::string& key) const {
  return raw_.contains(key) && !raw_.at(key).is_null();
}

Config Config::section(const std::string& key) {
  const json& v = lookup(key);
  if (!v.is_object()) throw InvalidArgument("'" + key + "' must be an object");
  return Config(v);
}

void Config::store_section(const std::string& key, const Config& sub) {
  sub.finish();
  seen_.insert(key);
  resolved_[key] = sub.resolved();
}

void Config::finish() const {
  for (const auto& [key, value] : raw_.items()) {
    if (!seen_.count(key)) throw InvalidArgument("unknown config key '" + key + "'");
  }
}

}  // namespace bincat::cli
