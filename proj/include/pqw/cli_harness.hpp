#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqw/decoherence.hpp"
#include "pqw/errors.hpp"
#include "pqw/graph_model.hpp"

namespace pqw::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2 };

// Configuration errors map to exit code 2.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct ExperimentConfig {
  std::string graph = "complete:3";
  // Exactly one of these may be set; neither means no marked vertices.
  std::optional<std::vector<int>> marked;
  std::optional<int> marked_first;
  // Percolation: a single p, an "A:STEP:B" grid, or multiples of p_threshold.
  std::optional<double> p;
  std::optional<std::string> p_grid;
  std::optional<std::vector<double>> p_threshold_fractions;
  std::string variant = "bond-flip";
  std::string mode = "exact";
  std::uint64_t samples = kDefaultSamples;
  std::uint64_t seed = 0;
  std::optional<int> tcap;
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  // detect only
  std::uint64_t trials = 10000;
  std::optional<int> T;
  bool reference_check = false;
  // dqht only: "none", "binary" or "csv" dump of each averaged operator.
  std::string dump_operator = "none";
  std::string out = "pqw_out";
  // Worker threads never change results, so they are not serialised.
  unsigned workers = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
// Throws ConfigError naming the offending key.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Parses a JSON config file; syntax errors report line and column.
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Throws ConfigError for inconsistent or incomplete settings.
void validate(const ExperimentConfig& config);

Graph resolve_graph(const ExperimentConfig& config);
MarkedSet resolve_marked(const ExperimentConfig& config, int n);
// Expands p / p_grid / p_threshold_fractions into the list of probabilities.
std::vector<double> resolve_p_values(const ExperimentConfig& config, const Graph& base,
                                     const MarkedSet& marked);
std::vector<double> expand_p_grid(const std::string& grid);

// Each command writes its artifacts under config.out and returns an exit code.
int cmd_qht(const ExperimentConfig& config);
int cmd_dqht(const ExperimentConfig& config);
int cmd_detect(const ExperimentConfig& config);
int cmd_bounds(const ExperimentConfig& config);

struct VerifyOptions {
  // Adds a fixture whose transition matrix has a non-stochastic row.
  bool corrupt_fixture = false;
};
int cmd_verify(const ExperimentConfig& config, const VerifyOptions& options = {});

// Entry point used by tools/pqw.cpp.
int run(int argc, char** argv);

}  // namespace pqw::cli
