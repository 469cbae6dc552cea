#pragma once

#include "orbitlab/chaos.hpp"
#include "orbitlab/invariants.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace orbitlab::cli {

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_double(double v);

/// One row of a trajectory file.
struct TrajectoryRow {
  long t = 0;
  Eigen::VectorXd x;
  double f = 0.0;
  double phi = 0.0;
  double defect = 0.0;
};

/// "t,x_0,...,x_{d-1},f,phi,defect"
std::string trajectory_header(Eigen::Index dim);

/// Writes header and rows. Throws std::invalid_argument unless t is strictly
/// increasing and every row has `dim` coordinates.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows,
                          Eigen::Index dim);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const InvariantReport& report);
nlohmann::json to_json(const ChaosReport& report);

/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace orbitlab::cli
