#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "bincat/runner.hpp"
#include "bincat/types.hpp"

namespace bincat::cli {

/// Comma-separated table with a fixed header, LF line endings and
/// shortest round-trip numbers. Refuses non-finite values.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  template <class... Cells>
  void row(const Cells&... cells) {
    std::string line;
    bool first = true;
    (append(line, first, cells), ...);
    line.push_back('\n');
    out_ << line;
  }

  /// Flushes and throws std::runtime_error on a write failure.
  void close();

 private:
  template <class T>
  void append(std::string& line, bool& first, const T& cell) {
    if (!first) line.push_back(',');
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      line += checked(cell);
    } else if constexpr (std::is_integral_v<T>) {
      line += std::to_string(cell);
    } else {
      line += cell;
    }
  }
  std::string checked(double value) const;

  std::filesystem::path path_;
  std::ofstream out_;
};

/// Writes `doc` as indented JSON with a trailing LF.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace bincat::cli
