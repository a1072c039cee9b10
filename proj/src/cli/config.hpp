#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bincat/errors.hpp"

namespace bincat::cli {

/// Typed access to one experiment's config. Every key read is recorded with
/// its effective value in resolved(); finish() rejects keys never read.
class Config {
 public:
  explicit Config(const nlohmann::json& raw);

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::uint64_t count(const std::string& key);
  std::uint64_t count(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  std::vector<std::uint64_t> counts(const std::string& key, std::vector<std::uint64_t> fallback);

  /// Records `value` for key, ignoring whatever the file said.
  void set(const std::string& key, const nlohmann::json& value);

  bool has(const std::string& key) const { return raw_.contains(key); }

  /// Nested object as its own Config, recorded under `key` when present.
  bool has_section(const std::string& key) const;
  Config section(const std::string& key);
  void store_section(const std::string& key, const Config& sub);

  void finish() const;
  const nlohmann::json& resolved() const { return resolved_; }

 private:
  const nlohmann::json& lookup(const std::string& key);

  nlohmann::json raw_;
  nlohmann::json resolved_ = nlohmann::json::object();
  std::set<std::string> seen_;
};

}  // namespace bincat::cli
