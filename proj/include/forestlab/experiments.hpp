#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "forestlab/errors.hpp"

namespace forestlab {

enum class Experiment {
  Sample,
  Resistance,
  ResampleTest,
  CutTime,
  Njl,
  Growth,
  Recurrence,
  Counterexample,
  Kac,
};

std::string_view experiment_name(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);

/// Invalid configuration; field is a JSON pointer such as "/radius".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Sample;
  int dimension = 5;
  int radius = 3;
  std::vector<int> radii;  // resistance, recurrence, counterexample
  int ball = 1;
  std::uint64_t replicas = 100;
  std::uint64_t horizon = 100'000;
  std::uint64_t truncation = 10'000;  // z-value truncation for cuttime
  std::vector<unsigned> levels{1, 2, 4, 8};
  std::vector<unsigned> n_values{1, 2, 3};
  std::vector<unsigned> m_values{2, 3, 4, 5, 6};
  unsigned n_max = 10;
  std::vector<int> x;  // lattice points; empty means origin / origin + e_1
  std::vector<int> y;
  std::string graph;  // edge-list file for resistance on a user graph
  std::uint32_t source = 0;
  std::uint32_t target = 1;
  std::string chain = "two-state";
  std::vector<std::vector<double>> transition;  // overrides chain when set
  std::vector<std::size_t> event{0};
  double drop_fraction = 0.1;
  double confidence = 0.999;
  double significance = 1e-3;
  double censor_threshold = 0.01;
  std::uint64_t bootstrap = 1000;

  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::uint64_t budget_vertices = std::uint64_t{1} << 27;
  std::string out = "out";
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Reads the fields present in j over c; ConfigError on a bad value.
void apply_json(const nlohmann::json& j, ExperimentConfig& c);
/// ConfigError for malformed values, ResourceError for budget overruns.
void validate(const ExperimentConfig& c);

/// 64-bit FNV-1a of the canonical config JSON without threads and out.
std::uint64_t config_hash(const ExperimentConfig& c);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct RunSummary {
  std::vector<std::filesystem::path> artifacts;
  nlohmann::json censoring = nlohmann::json::object();
  nlohmann::json headline = nlohmann::json::object();
};

/// Runs the experiment, writes its artifacts and manifest.json under
/// c.out. Throws ConfigError, ResourceError or other Errors.
RunSummary run_experiment(const ExperimentConfig& c);

/// run_experiment with errors mapped to exit codes: 0 ok, 2 invalid
/// config, 3 budget exceeded, 1 anything else.
int run(const ExperimentConfig& c, std::ostream& err);

}  // namespace forestlab
