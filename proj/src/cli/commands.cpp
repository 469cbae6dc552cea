#include "orbitlab/cli/commands.hpp"

#include "orbitlab/errors.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/precise_alt_play.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace orbitlab::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double relative_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

void announce(const Context& ctx, const std::filesystem::path& file) {
  if (ctx.log) *ctx.log << file.string() << '\n';
}

std::filesystem::path output_path(const RunConfig& cfg, const Context& ctx, const std::string& name) {
  return ctx.out_dir / (cfg.prefix + name);
}

json map_json(const MapInstance& map) {
  json j = {{"kind", std::string(to_string(map.kind()))},
            {"chart", std::string(to_string(map.chart()))},
            {"step_sizes", map.step_sizes()},
            {"validated", map.validated()}};
  if (map.kind() != MapKind::alt_play) j["objective"] = map.objective().name();
  if (const auto& v = map.verdict()) {
    j["step_size_verdict"] = {{"status", std::string(to_string(v->status))},
                              {"bound", v->bound},
                              {"margin", v->margin},
                              {"estimated", v->estimated}};
  }
  return j;
}

std::optional<Invariant> configured_invariant(const RunConfig& cfg) {
  const MapInstance& map = cfg.map;
  switch (cfg.invariant.type) {
    case InvariantType::closed_form: {
      const auto& s = map.step_sizes();
      return Invariant::closed_form(*map.payoff(), s[0], s[1]);
    }
    case InvariantType::series:
      return Invariant::series(map, cfg.invariant.weight, cfg.series_options());
    case InvariantType::none:
      break;
  }
  return std::nullopt;
}

std::vector<TrajectoryRow> precise_trajectory(const RunConfig& cfg, const State& x0) {
  const MapInstance& map = cfg.map;
  const auto& s = map.step_sizes();
  const bool closed = cfg.invariant.type == InvariantType::closed_form;
  auto series = cfg.invariant.type == InvariantType::series ? configured_invariant(cfg) : std::nullopt;

  auto make_row = [&](const PreciseAltPlay& p) {
    TrajectoryRow row;
    row.t = p.index();
    row.x = p.state().coords();
    if (!row.x.allFinite()) throw NumericalError("state no longer representable in double", p.index());
    row.f = p.payoff_value();
    if (closed) {
      row.phi = p.phi();
      row.defect = p.relative_defect();
    } else if (series) {
      row.phi = (*series)(p.state());
    } else {
      row.phi = row.defect = kNaN;
    }
    return row;
  };

  std::vector<TrajectoryRow> rows;
  PreciseAltPlay back(*map.payoff(), s[0], s[1], x0);
  for (std::size_t k = 0; k < cfg.backward; ++k) {
    back.step_back();
    rows.push_back(make_row(back));
  }
  std::reverse(rows.begin(), rows.end());
  PreciseAltPlay fwd(*map.payoff(), s[0], s[1], x0);
  rows.push_back(make_row(fwd));
  for (std::size_t k = 0; k < cfg.forward; ++k) {
    fwd.step();
    rows.push_back(make_row(fwd));
  }
  if (series) {
    const double phi0 = rows[cfg.backward].phi;
    for (auto& row : rows) row.defect = relative_gap(row.phi, phi0);
  }
  return rows;
}

}  // namespace

std::vector<TrajectoryRow> simulate_trajectory(const RunConfig& cfg, const State& x0) {
  const MapInstance& map = cfg.map;
  if (map.kind() == MapKind::alt_play) return precise_trajectory(cfg, x0);

  OrbitOptions opts = cfg.orbit_options();
  opts.stop_at_fixed_point = false;
  const OrbitSegment back = orbit(map, x0, 0, cfg.backward, opts);

  std::vector<State> states(back.backward.rbegin(), back.backward.rend());
  states.push_back(x0);
  State current = x0;
  for (std::size_t k = 0; k < cfg.forward; ++k) {
    const long index = static_cast<long>(k + 1);
    try {
      current = step(map, current);
    } catch (const StepSizeError& e) {
      throw NumericalError(e.what(), index);
    }
    if (!current.coords().allFinite()) throw NumericalError("non-finite state", index);
    states.push_back(current);
  }

  const auto phi = configured_invariant(cfg);
  std::vector<TrajectoryRow> rows;
  rows.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    TrajectoryRow row;
    row.t = static_cast<long>(i) - static_cast<long>(cfg.backward);
    row.x = states[i].coords();
    row.f = map.value(states[i]);
    row.phi = phi ? (*phi)(states[i]) : kNaN;
    rows.push_back(std::move(row));
  }
  const double phi0 = rows[cfg.backward].phi;
  for (auto& row : rows) row.defect = phi ? relative_gap(row.phi, phi0) : kNaN;
  return rows;
}

int cmd_simulate(const RunConfig& cfg, const Context& ctx) {
  if (cfg.initial_states.empty())
    throw ConfigError("/initial_states", "simulate needs at least one initial state");
  json runs = json::array();
  for (std::size_t i = 0; i < cfg.initial_states.size(); ++i) {
    const State& x0 = cfg.initial_states[i];
    const auto rows = simulate_trajectory(cfg, x0);
    const std::string name = "trajectory_" + std::to_string(i) + ".csv";
    std::ostringstream csv;
    write_trajectory_csv(csv, rows, cfg.map.dimension());
    const auto path = output_path(cfg, ctx, name);
    write_text_file(path, csv.str());
    announce(ctx, path);

    double max_defect = 0.0;
    for (const auto& row : rows) max_defect = std::max(max_defect, row.defect);
    if (cfg.invariant.type == InvariantType::none) max_defect = kNaN;
    const State final_state = cfg.map.make_state(rows.back().x);
    runs.push_back({
        {"file", cfg.prefix + name},
        {"initial_state", to_json(x0.coords())},
        {"final_state", to_json(rows.back().x)},
        {"final_f", rows.back().f},
        {"rows", rows.size()},
        {"max_defect", max_defect},
        {"within_tolerance", std::isfinite(max_defect) && max_defect <= cfg.tolerances.defect},
        {"fixed_point", detect_fixed_point(cfg.map, final_state, cfg.tolerances.fixed_point)},
    });
  }
  const json summary = {{"command", "simulate"},
                        {"map", map_json(cfg.map)},
                        {"steps", {{"forward", cfg.forward}, {"backward", cfg.backward}}},
                        {"defect_tolerance", cfg.tolerances.defect},
                        {"runs", runs}};
  const auto path = output_path(cfg, ctx, "summary.json");
  write_json_file(path, summary);
  announce(ctx, path);
  return kSuccess;
}

int cmd_invariant(const RunConfig& cfg, const Context& ctx) {
  if (cfg.initial_states.empty())
    throw ConfigError("/initial_states", "invariant needs at least one initial state");
  if (cfg.invariant.type == InvariantType::none)
    throw ConfigError("/invariant", "invariant needs an invariant of type closed_form or series");

  const MapInstance& map = cfg.map;
  json reports = json::array();
  for (const State& x : cfg.initial_states) {
    json entry;
    if (cfg.invariant.type == InvariantType::closed_form) {
      const auto& s = map.step_sizes();
      const Invariant phi = Invariant::closed_form(*map.payoff(), s[0], s[1]);
      InvariantReport r;
      r.value = bipartite_invariant(*map.payoff(), s[0], s[1], x);
      r.fixed_point = detect_fixed_point(map, x, cfg.tolerances.fixed_point);
      if (cfg.invariant.defect_horizon > 0)
        r.per_step_defect = invariance_defect_trace(phi, map, x, cfg.invariant.defect_horizon);
      entry = to_json(r);
      entry["kind"] = "closed_form";
    } else {
      entry = to_json(series_invariant(map, cfg.invariant.weight, x, cfg.series_options()));
      entry["kind"] = "series";
      entry["weight"] = cfg.invariant.weight.describe();
    }
    double max_defect = 0.0;
    for (const double d : entry["per_step_defect"]) max_defect = std::max(max_defect, d);
    entry["max_defect"] = max_defect;
    entry["within_tolerance"] = max_defect <= cfg.tolerances.defect;
    entry["state"] = to_json(x.coords());
    reports.push_back(std::move(entry));
  }
  const json doc = {{"command", "invariant"},
                    {"map", map_json(map)},
                    {"defect_tolerance", cfg.tolerances.defect},
                    {"reports", reports}};
  const auto path = output_path(cfg, ctx, "invariant.json");
  write_json_file(path, doc);
  announce(ctx, path);
  return kSuccess;
}

int cmd_classify(const RunConfig& cfg, const Context& ctx) {
  if (!cfg.classify) throw ConfigError("/classify", "classify needs a 'classify' section");
  const ClassifySpec& spec = *cfg.classify;
  const MapInstance& map = cfg.map;
  double tol = spec.tol.value_or(1e-9);
  if (cfg.tolerance_overridden) tol = cfg.tolerances.defect;

  std::vector<Invariant> filters;
  // Alternating play falls back to its closed form inside same_orbit.
  if (cfg.invariant.type == InvariantType::series) filters.push_back(*configured_invariant(cfg));

  const State x = map.make_state(spec.x), y = map.make_state(spec.y);
  const SameOrbitResult r = same_orbit(map, x, y, spec.max_iter, tol, filters, cfg.orbit_options());
  auto values = [](const std::vector<std::pair<std::string, double>>& v) {
    json out = json::array();
    for (const auto& [id, value] : v) out.push_back({{"invariant", id}, {"value", value}});
    return out;
  };
  const json doc = {{"command", "classify"},
                    {"map", map_json(map)},
                    {"x", to_json(spec.x)},
                    {"y", to_json(spec.y)},
                    {"max_iter", spec.max_iter},
                    {"tolerance", tol},
                    {"verdict", std::string(to_string(r.verdict))},
                    {"reason", r.reason},
                    {"index", r.index},
                    {"closest_distance", r.closest_distance},
                    {"closest_index", r.closest_index},
                    {"forward_only", r.forward_only},
                    {"note", r.note},
                    {"phi_x", values(r.phi_x)},
                    {"phi_y", values(r.phi_y)}};
  const auto path = output_path(cfg, ctx, "classify.json");
  write_json_file(path, doc);
  announce(ctx, path);
  return kSuccess;
}

namespace {

State sample_state(const MapInstance& map, std::mt19937_64& rng, double half_width) {
  const Eigen::Index d = map.dimension();
  Eigen::VectorXd v(d);
  switch (map.chart()) {
    case Chart::simplex_product: {
      std::exponential_distribution<double> expo(1.0);
      for (Eigen::Index i = 0; i < d; ++i) v[i] = expo(rng);
      renormalize_simplex(v, map.blocks());
      break;
    }
    case Chart::sphere: {
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
      v /= v.norm();
      break;
    }
    default: {
      if (map.chart() == Chart::euclidean && map.objective().region())
        return map.make_state(map.objective().region()->sample(rng));
      std::uniform_real_distribution<double> uni(-half_width, half_width);
      for (Eigen::Index i = 0; i < d; ++i) v[i] = uni(rng);
    }
  }
  return map.make_state(std::move(v));
}

}  // namespace

int cmd_scan(const RunConfig& cfg, const Context& ctx) {
  if (!cfg.seed) throw ConfigError("/seed", "scan needs a seed (config 'seed' or --seed)");
  const MapInstance& map = cfg.map;
  const ScanSpec& spec = cfg.scan;

  std::optional<Invariant> phi;
  if (cfg.invariant.type == InvariantType::series) {
    phi = configured_invariant(cfg);
  } else if (map.kind() == MapKind::alt_play) {
    const auto& s = map.step_sizes();
    phi = Invariant::closed_form(*map.payoff(), s[0], s[1]);
  }

  std::mt19937_64 rng(*cfg.seed);
  std::vector<std::pair<State, State>> pairs;
  std::size_t resamples = 0;
  constexpr std::size_t kMaxAttempts = 1000;
  while (pairs.size() < spec.pairs) {
    State x = sample_state(map, rng, spec.half_width);
    State y = sample_state(map, rng, spec.half_width);
    bool accept = distance(x, y) > 0.0;
    if (accept && phi) {
      const double px = (*phi)(x), py = (*phi)(y);
      accept = std::abs(px - py) > spec.min_level_gap * (1.0 + std::max(std::abs(px), std::abs(py)));
    }
    if (accept) {
      pairs.emplace_back(std::move(x), std::move(y));
    } else if (++resamples > kMaxAttempts * spec.pairs) {
      throw ConfigError("/scan/min_level_gap", "could not sample pairs on distinct level sets");
    }
  }

  json doc = {{"command", "scan"},
              {"map", map_json(map)},
              {"seed", *cfg.seed},
              {"pairs", spec.pairs},
              {"horizon", spec.horizon},
              {"resampled", resamples},
              {"thresholds",
               {{"eps_low", spec.thresholds.eps_low},
                {"eps_high", spec.thresholds.eps_high},
                {"tail_fraction", spec.thresholds.tail_fraction}}}};

  std::vector<ChaosReport> reports;
  if (phi) {
    ConfinementOptions opts;
    opts.thresholds = spec.thresholds;
    opts.defect_tolerance = cfg.tolerances.defect;
    opts.gap_tolerance = spec.gap_tolerance.value_or(opts.gap_tolerance);
    if (cfg.tolerance_overridden) opts.gap_tolerance = cfg.tolerances.defect;
    ConfinementReport conf = level_set_confinement(map, *phi, pairs, spec.horizon, opts);
    doc["confinement"] = {{"invariant", phi->id()},
                          {"status", std::string(to_string(conf.status))},
                          {"note", conf.note},
                          {"refutations", conf.refutations},
                          {"gap_tolerance", opts.gap_tolerance},
                          {"max_phi_defect", conf.max_phi_defect}};
    reports = std::move(conf.reports);
  } else {
    reports = kernels::scan_pairs(map, pairs, spec.horizon, spec.thresholds, nullptr,
                                  kernels::Backend::openmp);
    doc["confinement"] = {{"status", std::string(to_string(ConfinementStatus::skipped))},
                          {"note", "no invariant configured for this map"}};
  }

  json counts = {{"scramble-candidate", 0}, {"separated", 0}, {"converging-pair", 0}, {"inconclusive", 0}};
  for (const auto& r : reports) {
    auto& c = counts[std::string(to_string(r.verdict))];
    c = c.get<std::size_t>() + 1;
  }
  doc["counts"] = counts;
  if (spec.include_reports) {
    json list = json::array();
    for (const auto& r : reports) list.push_back(to_json(r));
    doc["reports"] = std::move(list);
  }
  const auto path = output_path(cfg, ctx, "scan.json");
  write_json_file(path, doc);
  announce(ctx, path);
  return kSuccess;
}

namespace {

struct FigureSpec {
  double eta1, eta2;
  std::vector<std::pair<double, double>> starts;
};

FigureSpec figure_spec(const std::string& which) {
  if (which == "fig1") return {0.1, 0.2, {{60, -25}, {-20, 2}, {10, -50}}};
  if (which == "fig2") return {0.05, 0.02, {{-14, -5}, {5, -10}, {5, -15}}};
  throw ConfigError("which", "unknown figure '" + which + "' (expected fig1 or fig2)");
}

}  // namespace

int cmd_figures(const std::string& which, std::size_t steps, const Context& ctx) {
  const FigureSpec fig = figure_spec(which);
  RunConfig cfg(MapInstance::alt_play(Payoff::scalar(1.0), fig.eta1, fig.eta2));
  cfg.forward = steps;
  cfg.invariant.type = InvariantType::closed_form;

  json trajectories = json::array();
  std::vector<double> levels;
  double extent = 0.0;
  for (std::size_t k = 0; k < fig.starts.size(); ++k) {
    Eigen::VectorXd x(1), y(1);
    x << fig.starts[k].first;
    y << fig.starts[k].second;
    const State x0 = State::bipartite(x, y);
    const auto rows = simulate_trajectory(cfg, x0);
    double max_defect = 0.0;
    for (const auto& row : rows) {
      max_defect = std::max(max_defect, row.defect);
      extent = std::max(extent, row.x.cwiseAbs().maxCoeff());
    }
    const std::string name = which + "_trajectory_" + std::to_string(k + 1) + ".csv";
    std::ostringstream csv;
    write_trajectory_csv(csv, rows, 2);
    write_text_file(ctx.out_dir / name, csv.str());
    announce(ctx, ctx.out_dir / name);
    levels.push_back(rows.front().phi);
    trajectories.push_back({{"file", name},
                            {"initial_state", to_json(x0.coords())},
                            {"phi", rows.front().phi},
                            {"max_defect", max_defect}});
  }

  const double half_width = 1.05 * extent;
  constexpr std::size_t kGridPoints = 2001;
  std::ostringstream csv;
  csv << "curve,c,x,y\n";
  json curves = json::array();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double c = levels[k];
    const auto points = kernels::level_curve(fig.eta1, fig.eta2, 1.0, c, half_width, kGridPoints,
                                             kernels::Backend::openmp);
    double max_residual = 0.0;
    for (const auto& p : points) {
      const double phi = p.x * p.x / fig.eta1 - p.y * p.y / fig.eta2 + p.x * p.y;
      max_residual = std::max(max_residual, std::abs(phi - c) / (1.0 + std::abs(c)));
      csv << (k + 1) << ',' << format_double(c) << ',' << format_double(p.x) << ','
          << format_double(p.y) << '\n';
    }
    curves.push_back({{"curve", k + 1}, {"c", c}, {"points", points.size()}, {"max_residual", max_residual}});
  }
  const std::string curve_file = which + "_level_curves.csv";
  write_text_file(ctx.out_dir / curve_file, csv.str());
  announce(ctx, ctx.out_dir / curve_file);

  const json doc = {{"command", "figures"},
                    {"figure", which},
                    {"step_sizes", {fig.eta1, fig.eta2}},
                    {"steps", steps},
                    {"half_width", half_width},
                    {"grid_points", kGridPoints},
                    {"trajectories", trajectories},
                    {"level_curves", {{"file", curve_file}, {"curves", curves}}}};
  const std::string summary = which + "_summary.json";
  write_json_file(ctx.out_dir / summary, doc);
  announce(ctx, ctx.out_dir / summary);
  return kSuccess;
}

}  // namespace orbitlab::cli
