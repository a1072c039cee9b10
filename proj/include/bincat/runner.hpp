#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace bincat {

/// Command-line overrides applied on top of a config file.
struct RunOptions {
  /// When set, the config's "experiment" must match (or be absent).
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

/// simulate, stationary, tv, cutoff, extinction, branching.
const std::vector<std::string>& experiment_names();

/// Runs one experiment from an already parsed config and writes its files
/// plus manifest.json into out_dir. A manifest can be passed back in as a
/// config; its embedded config is used. Throws InvalidArgument for config
/// problems and NumericalFault for numerical failures.
void run_config(const nlohmann::json& config, const std::filesystem::path& out_dir,
                const RunOptions& options);

/// Reads the config at config_path and runs it. Returns the process exit
/// status: 0 on success, 1 for an invalid config, 2 for a numerical fault.
/// Diagnostics go to `err`.
int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        const RunOptions& options, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double value);

}  // namespace bincat
