#include "orbitlab/cli/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace orbitlab::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string trajectory_header(Eigen::Index dim) {
  std::string h = "t";
  for (Eigen::Index i = 0; i < dim; ++i) h += ",x_" + std::to_string(i);
  h += ",f,phi,defect";
  return h;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows,
                          Eigen::Index dim) {
  out << trajectory_header(dim) << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const TrajectoryRow& row = rows[r];
    if (row.x.size() != dim) throw std::invalid_argument("trajectory row has the wrong dimension");
    if (r > 0 && row.t <= rows[r - 1].t)
      throw std::invalid_argument("trajectory rows must have strictly increasing t");
    out << row.t;
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_double(row.x[i]);
    out << ',' << format_double(row.f) << ',' << format_double(row.phi) << ','
        << format_double(row.defect) << '\n';
  }
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

nlohmann::json to_json(const InvariantReport& r) {
  return {
      {"value", r.value},
      {"truncation_n", r.truncation_n},
      {"fixed_point", r.fixed_point},
      {"divergent", r.divergent},
      {"auto_stopped", r.auto_stopped},
      {"one_sided", r.one_sided},
      {"backward_depth", r.backward_depth},
      {"tail_estimate", r.tail_estimate},
      {"forward_endpoint_f", r.forward_endpoint_f},
      {"backward_endpoint_f", r.backward_endpoint_f},
      {"bias_note", r.bias_note},
      {"partial_sums", r.partial_sums},
      {"per_step_defect", r.per_step_defect},
  };
}

nlohmann::json to_json(const ChaosReport& r) {
  return {
      {"x", to_json(r.pair.first.coords())},
      {"y", to_json(r.pair.second.coords())},
      {"liminf", r.liminf_estimate},
      {"limsup", r.limsup_estimate},
      {"horizon", r.horizon},
      {"invariant_gap", r.invariant_gap},
      {"phi_defect", r.phi_defect},
      {"verdict", std::string(to_string(r.verdict))},
  };
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace orbitlab::cli
