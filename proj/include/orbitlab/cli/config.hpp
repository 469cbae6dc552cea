#pragma once

#include "orbitlab/chaos.hpp"
#include "orbitlab/dynamics.hpp"
#include "orbitlab/invariants.hpp"
#include "orbitlab/maps.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitlab::cli {

/// Invalid configuration. `path` is a JSON pointer into the offending
/// document ("" for the root, or the file name for I/O failures).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The run-configuration schema shipped with the tool.
const nlohmann::json& run_config_schema();

enum class InvariantType { none, closed_form, series };

struct InvariantSpec {
  InvariantType type = InvariantType::none;
  WeightFunction weight = WeightFunction::constant(1.0);
  std::size_t n = 64;
  std::size_t defect_horizon = 0;
};

struct ClassifySpec {
  Eigen::VectorXd x, y;
  std::size_t max_iter = 1000;
  std::optional<double> tol;
};

struct ScanSpec {
  std::size_t pairs = 1000;
  std::size_t horizon = 10000;
  double half_width = 50.0;
  ChaosThresholds thresholds;
  std::optional<double> gap_tolerance;
  double min_level_gap = 1e-6;  // relative Phi gap required between sampled points
  bool include_reports = true;
};

struct Tolerances {
  double inverse = 1e-12;
  int max_newton_iterations = 60;
  double fixed_point = kDefaultFixedPointTolerance;
  double defect = 1e-6;
  double series_stop = 1e-14;
};

struct RunConfig {
  explicit RunConfig(MapInstance m) : map(std::move(m)) {}

  MapInstance map;
  std::vector<State> initial_states;
  std::size_t forward = 0;
  std::size_t backward = 0;
  InvariantSpec invariant;
  std::optional<ClassifySpec> classify;
  ScanSpec scan;
  Tolerances tolerances;
  bool tolerance_overridden = false;  // set by --tolerance
  std::optional<std::uint64_t> seed;
  std::string prefix;

  OrbitOptions orbit_options() const;
  SeriesOptions series_options() const;
};

/// Validates against the schema, then checks the cross-field rules the
/// schema cannot express, then builds the map. `base_dir` resolves a
/// relative payoff_file.
RunConfig parse_config(const nlohmann::json& doc,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace orbitlab::cli
