#include "orbitlab/cli/config.hpp"

#include "orbitlab/cli/json_schema.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab_schema.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

namespace orbitlab::cli {

using nlohmann::json;

const json& run_config_schema() {
  static const json schema = json::parse(kRunConfigSchema);
  return schema;
}

namespace {

Eigen::VectorXd to_vector(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

std::size_t get_size(const json& obj, const char* key, std::size_t fallback) {
  return obj.contains(key) ? obj[key].get<std::size_t>() : fallback;
}

ObjectivePtr build_objective(const json& spec, const std::string& path) {
  const auto name = spec["name"].get<std::string>();
  const auto dim = static_cast<Eigen::Index>(get_size(spec, "dimension", 1));
  auto require = [&](const char* key) {
    if (!spec.contains(key))
      throw ConfigError(path, "objective '" + name + "' needs '" + key + "'");
  };
  if (name == "quadratic") return catalog::quadratic(dim);
  if (name == "bump") return catalog::bump(dim);
  if (name == "double_well") return catalog::double_well(spec.value("half_width", 1.5));
  if (name == "linear") {
    require("coefficients");
    return catalog::linear(to_vector(spec["coefficients"]));
  }
  require("matrix");
  const json& rows = spec["matrix"];
  const std::size_t cols = rows[0].size();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw ConfigError(path + "/matrix/" + std::to_string(i), "matrix rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return catalog::bilinear(a);
}

Payoff build_payoff(const json& spec, const std::string& path) {
  const int n = spec["n"].get<int>(), m = spec["m"].get<int>();
  const int k1 = spec["k1"].get<int>(), k2 = spec["k2"].get<int>();
  const json& blocks = spec["blocks"];
  if (blocks.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
    throw ConfigError(path + "/blocks", "expected n*m = " + std::to_string(n * m) + " blocks");
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string bpath = path + "/blocks/" + std::to_string(b);
    if (blocks[b].size() != static_cast<std::size_t>(k1))
      throw ConfigError(bpath, "expected k1 = " + std::to_string(k1) + " rows");
    Eigen::MatrixXd block(k1, k2);
    for (int i = 0; i < k1; ++i) {
      const json& row = blocks[b][static_cast<std::size_t>(i)];
      if (row.size() != static_cast<std::size_t>(k2))
        throw ConfigError(bpath + "/" + std::to_string(i), "expected k2 = " + std::to_string(k2) + " entries");
      for (int j = 0; j < k2; ++j) block(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    out.push_back(std::move(block));
  }
  return Payoff(n, m, k1, k2, std::move(out));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

Payoff load_payoff(const json& map_spec, const std::filesystem::path& base_dir) {
  const bool inline_payoff = map_spec.contains("payoff");
  const bool file_payoff = map_spec.contains("payoff_file");
  if (inline_payoff == file_payoff)
    throw ConfigError("/map", "alt_play needs exactly one of 'payoff' and 'payoff_file'");
  if (inline_payoff) return build_payoff(map_spec["payoff"], "/map/payoff");

  std::filesystem::path file = map_spec["payoff_file"].get<std::string>();
  if (file.is_relative()) file = base_dir / file;
  const json doc = read_json_file(file);
  const json& schema = run_config_schema()["properties"]["map"]["properties"]["payoff"];
  if (auto v = validate(schema, doc)) throw ConfigError(file.string() + ":" + v->path, v->message);
  return build_payoff(doc, file.string() + ":");
}

MapInstance build_map(const json& spec, const std::filesystem::path& base_dir) {
  const auto kind = map_kind_from_string(spec["kind"].get<std::string>());
  if (!spec.contains("step_sizes")) throw ConfigError("/map", "missing required property 'step_sizes'");
  std::vector<double> steps = spec["step_sizes"].get<std::vector<double>>();
  auto expect_steps = [&](std::size_t count) {
    if (steps.size() != count)
      throw ConfigError("/map/step_sizes", "map '" + spec["kind"].get<std::string>() + "' takes " +
                                               std::to_string(count) + " step size(s)");
  };
  auto objective = [&]() {
    if (!spec.contains("objective")) throw ConfigError("/map", "missing required property 'objective'");
    return build_objective(spec["objective"], "/map/objective");
  };

  try {
    switch (kind) {
      case MapKind::gd:
        expect_steps(1);
        return MapInstance::gd(objective(), steps[0]);
      case MapKind::rgd_sphere: {
        expect_steps(1);
        std::optional<double> lip;
        if (spec.contains("lipschitz")) lip = spec["lipschitz"].get<double>();
        return MapInstance::rgd_sphere(objective(), steps[0], lip);
      }
      case MapKind::mwu_exp:
      case MapKind::mwu_lin: {
        if (!spec.contains("simplex_blocks"))
          throw ConfigError("/map", "missing required property 'simplex_blocks'");
        const auto blocks = spec["simplex_blocks"].get<std::vector<Eigen::Index>>();
        if (steps.size() == 1) steps.assign(blocks.size(), steps[0]);
        expect_steps(blocks.size());
        auto obj = objective();
        const auto total = std::accumulate(blocks.begin(), blocks.end(), Eigen::Index{0});
        if (total != obj->dimension())
          throw ConfigError("/map/simplex_blocks", "block sizes sum to " + std::to_string(total) +
                                                       " but the objective has dimension " +
                                                       std::to_string(obj->dimension()));
        return kind == MapKind::mwu_exp ? MapInstance::mwu_exp(obj, steps, blocks)
                                        : MapInstance::mwu_lin(obj, steps, blocks);
      }
      case MapKind::alt_play:
        expect_steps(2);
        if (spec.contains("objective"))
          throw ConfigError("/map/objective", "alt_play takes its objective from the payoff");
        return MapInstance::alt_play(load_payoff(spec, base_dir), steps[0], steps[1]);
    }
  } catch (const DomainError& e) {
    throw ConfigError("/map", e.what());
  }
  throw ConfigError("/map/kind", "unsupported map kind");
}

State build_state(const MapInstance& map, const json& coords, const std::string& path) {
  Eigen::VectorXd v = to_vector(coords);
  if (v.size() != map.dimension())
    throw ConfigError(path, "expected " + std::to_string(map.dimension()) + " coordinates, got " +
                                std::to_string(v.size()));
  try {
    State s = map.make_state(std::move(v));
    s.validate();
    return s;
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

WeightFunction build_weight(const json& spec) {
  const auto kind = spec["kind"].get<std::string>();
  if (kind == "constant") return WeightFunction::constant(spec.value("value", 1.0));
  if (kind == "coordinate") {
    if (!spec.contains("index")) throw ConfigError("/invariant/weight", "coordinate weight needs 'index'");
    return WeightFunction::coordinate(spec["index"].get<Eigen::Index>());
  }
  if (!spec.contains("center")) throw ConfigError("/invariant/weight", "gaussian_bump weight needs 'center'");
  return WeightFunction::gaussian_bump(to_vector(spec["center"]), spec.value("width", 1.0));
}

}  // namespace

OrbitOptions RunConfig::orbit_options() const {
  OrbitOptions o;
  o.fixed_point_tolerance = tolerances.fixed_point;
  o.inverse.tolerance = tolerances.inverse;
  o.inverse.max_iterations = tolerances.max_newton_iterations;
  return o;
}

SeriesOptions RunConfig::series_options() const {
  SeriesOptions o;
  o.n = invariant.n;
  o.stop_threshold = tolerances.series_stop;
  o.defect_horizon = invariant.defect_horizon;
  o.orbit = orbit_options();
  return o;
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (auto v = validate(run_config_schema(), doc)) throw ConfigError(v->path, v->message);

  RunConfig cfg(build_map(doc["map"], base_dir));
  const MapInstance& map = cfg.map;

  if (doc.contains("initial_states")) {
    const json& states = doc["initial_states"];
    for (std::size_t i = 0; i < states.size(); ++i)
      cfg.initial_states.push_back(build_state(map, states[i], "/initial_states/" + std::to_string(i)));
  }
  if (doc.contains("steps")) {
    cfg.forward = get_size(doc["steps"], "forward", 0);
    cfg.backward = get_size(doc["steps"], "backward", 0);
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    cfg.tolerances.inverse = t.value("inverse", cfg.tolerances.inverse);
    cfg.tolerances.max_newton_iterations =
        t.value("max_newton_iterations", cfg.tolerances.max_newton_iterations);
    cfg.tolerances.fixed_point = t.value("fixed_point", cfg.tolerances.fixed_point);
    cfg.tolerances.defect = t.value("defect", cfg.tolerances.defect);
    cfg.tolerances.series_stop = t.value("series_stop", cfg.tolerances.series_stop);
  }
  if (map.kind() == MapKind::alt_play) cfg.invariant.type = InvariantType::closed_form;
  if (doc.contains("invariant")) {
    const json& inv = doc["invariant"];
    const auto type = inv["type"].get<std::string>();
    cfg.invariant.type = type == "closed_form" ? InvariantType::closed_form
                         : type == "series"    ? InvariantType::series
                                               : InvariantType::none;
    if (cfg.invariant.type == InvariantType::closed_form && map.kind() != MapKind::alt_play)
      throw ConfigError("/invariant/type", "the closed-form invariant exists only for alt_play");
    if (inv.contains("weight")) {
      try {
        cfg.invariant.weight = build_weight(inv["weight"]);
      } catch (const DomainError& e) {
        throw ConfigError("/invariant/weight", e.what());
      }
    }
    cfg.invariant.n = get_size(inv, "n", cfg.invariant.n);
    cfg.invariant.defect_horizon = get_size(inv, "defect_horizon", 0);
  }
  if (doc.contains("classify")) {
    const json& c = doc["classify"];
    ClassifySpec spec;
    spec.x = build_state(map, c["x"], "/classify/x").coords();
    spec.y = build_state(map, c["y"], "/classify/y").coords();
    spec.max_iter = get_size(c, "max_iter", spec.max_iter);
    if (c.contains("tol")) spec.tol = c["tol"].get<double>();
    cfg.classify = std::move(spec);
  }
  if (doc.contains("scan")) {
    const json& s = doc["scan"];
    cfg.scan.pairs = get_size(s, "pairs", cfg.scan.pairs);
    cfg.scan.horizon = get_size(s, "horizon", cfg.scan.horizon);
    cfg.scan.half_width = s.value("half_width", cfg.scan.half_width);
    cfg.scan.thresholds.eps_low = s.value("eps_low", cfg.scan.thresholds.eps_low);
    cfg.scan.thresholds.eps_high = s.value("eps_high", cfg.scan.thresholds.eps_high);
    if (!(cfg.scan.thresholds.eps_low < cfg.scan.thresholds.eps_high))
      throw ConfigError("/scan", "eps_low must be smaller than eps_high");
    if (s.contains("gap_tolerance")) cfg.scan.gap_tolerance = s["gap_tolerance"].get<double>();
    cfg.scan.min_level_gap = s.value("min_level_gap", cfg.scan.min_level_gap);
    cfg.scan.include_reports = s.value("include_reports", cfg.scan.include_reports);
  }
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("output")) cfg.prefix = doc["output"].value("prefix", std::string{});
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  return parse_config(doc, path.parent_path());
}

}  // namespace orbitlab::cli
