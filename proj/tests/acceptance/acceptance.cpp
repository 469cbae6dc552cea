// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "orbitlab/chaos.hpp"
#include "orbitlab/cli/commands.hpp"
#include "orbitlab/dynamics.hpp"
#include "orbitlab/invariants.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/maps.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace orbitlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::VectorXd uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, lo, hi);
  return v;
}

State interior_simplex(std::mt19937_64& rng, const std::vector<Eigen::Index>& blocks) {
  Eigen::Index d = 0;
  for (auto b : blocks) d += b;
  Eigen::VectorXd v = uniform_vector(rng, d, 0.05, 1.0);
  renormalize_simplex(v, blocks);
  return State::simplex(v, blocks);
}

State sphere_point(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
  return State::sphere(v / v.norm());
}

State pair_state(double x, double y) {
  Eigen::VectorXd a(1), b(1);
  a << x;
  b << y;
  return State::bipartite(a, b);
}

struct Game {
  Payoff payoff;
  double eta1, eta2;
  State start;
};

// n, m <= 3, block sizes <= 4, entries in [-1, 1], step sizes in [0.01, 0.5].
std::vector<Game> random_games() {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> players(1, 3), block(1, 4);
  std::vector<Game> games;
  for (int g = 0; g < 100; ++g) {
    const int n = players(rng), m = players(rng), k1 = block(rng), k2 = block(rng);
    std::vector<Eigen::MatrixXd> blocks;
    for (int b = 0; b < n * m; ++b) {
      Eigen::MatrixXd a(k1, k2);
      for (int i = 0; i < k1; ++i)
        for (int j = 0; j < k2; ++j) a(i, j) = uniform(rng, -1.0, 1.0);
      blocks.push_back(a);
    }
    Payoff p(n, m, k1, k2, std::move(blocks));
    const double e1 = uniform(rng, 0.01, 0.5), e2 = uniform(rng, 0.01, 0.5);
    const Eigen::VectorXd x = uniform_vector(rng, p.x_dim(), -1, 1);
    const Eigen::VectorXd y = uniform_vector(rng, p.y_dim(), -1, 1);
    games.push_back({std::move(p), e1, e2, State::bipartite(x, y)});
  }
  return games;
}

Outcome reference_values() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case { double e1, e2, x, y, level; };
  const Case cases[] = {{0.1, 0.2, 60, -25, 31375},  {0.1, 0.2, -20, 2, 3940},   {0.1, 0.2, 10, -50, -12000},
                        {0.05, 0.02, -14, -5, 2740}, {0.05, 0.02, 5, -10, -4550}, {0.05, 0.02, 5, -15, -10825}};
  bool exact = true;
  double worst = 0.0;
  for (const Case& c : cases) {
    const Payoff p = Payoff::scalar(1.0);
    const State s = pair_state(c.x, c.y);
    exact = exact && bipartite_invariant(p, c.e1, c.e2, s) == c.level;
    const auto map = MapInstance::alt_play(p, c.e1, c.e2);
    worst = std::max(worst, invariance_defect(Invariant::closed_form(p, c.e1, c.e2), map, s, 10000));
  }
  const double elapsed = seconds_since(t0);
  return {exact && worst <= 1e-6 && elapsed < 1.0,
          std::string("t=0 values ") + (exact ? "exact" : "NOT exact") + ", max defect over 1e4 steps " + sci(worst) +
              " <= 1e-6, " + sci(elapsed) + " s < 1 s"};
}

Outcome random_conservation() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const Game& g : random_games()) {
    const auto map = MapInstance::alt_play(g.payoff, g.eta1, g.eta2);
    const auto trace = invariance_defect_trace(Invariant::closed_form(g.payoff, g.eta1, g.eta2), map, g.start, 1000);
    for (double d : trace) worst = std::max(worst, d);
  }
  const double elapsed = seconds_since(t0);
  return {worst <= 1e-9 && elapsed < 10.0,
          "100 games x 1e3 steps, max per-step defect " + sci(worst) + " <= 1e-9, " + sci(elapsed) + " s < 10 s"};
}

Outcome descent_lemma() {
  Eigen::MatrixXd a(2, 3);
  a << 0.5, -1.0, 0.25, 0.75, 0.1, -0.6;
  Eigen::VectorXd c(4);
  c << 1.0, -0.5, 0.25, 2.0;
  const std::vector<ObjectivePtr> objectives = {catalog::quadratic(3), catalog::bilinear(a), catalog::double_well(1.5),
                                                catalog::linear(c), catalog::bump(3)};
  std::mt19937_64 rng(33);
  std::size_t violations = 0, tested = 0;
  bool all_validated = true;
  for (const auto& f : objectives) {
    const StepSizeVerdict v = validate_step_size_gd(*f, 1e-3);
    const double eta = std::isfinite(v.bound) ? 0.9 * v.bound : 0.5;
    const auto map = MapInstance::gd(f, eta);
    all_validated = all_validated && map.validated();
    std::vector<State> points;
    while (points.size() < 1000) {
      const Eigen::VectorXd x = f->region() ? f->region()->sample(rng) : uniform_vector(rng, f->dimension(), -2, 2);
      const State s = State::euclidean(x);
      if (!detect_fixed_point(map, s)) points.push_back(s);
    }
    for (double d : kernels::descent_values(map, points, kernels::Backend::openmp)) {
      ++tested;
      if (!(d > 0.0)) ++violations;
    }
  }
  return {violations == 0 && all_validated,
          std::to_string(violations) + " violations at " + std::to_string(tested) +
              " points (5 catalog objectives, eta = 0.9 x 2/(dL))"};
}

Outcome series_convergence() {
  const auto map = MapInstance::gd(catalog::double_well(1.5), 0.1);
  const State x = State::scalar(0.5);
  SeriesOptions o;
  o.n = 200;
  const InvariantReport r = series_invariant(map, WeightFunction::constant(1.0), x, o);
  const bool converged = std::abs(r.value - 0.25) <= 1e-6 && r.truncation_n <= 200;

  bool monotone = true;
  double previous = INFINITY;
  std::string trace;
  for (std::size_t n : {4, 8, 16, 32, 64}) {
    SeriesOptions fixed;
    fixed.n = n;
    fixed.auto_stop = false;
    const Invariant phi = Invariant::series(map, WeightFunction::constant(1.0), fixed);
    const double d = invariance_defect(phi, map, x, 2);
    monotone = monotone && d < previous;
    previous = d;
    trace += (trace.empty() ? "" : ", ") + sci(d);
  }
  return {converged && monotone, "|Phi - 0.25| = " + sci(std::abs(r.value - 0.25)) + " <= 1e-6 at n = " +
                                     std::to_string(r.truncation_n) + "; defect (horizon 2) over n=4..64: " + trace +
                                     (monotone ? " decreasing" : " NOT decreasing")};
}

Outcome inverse_roundtrip() {
  std::mt19937_64 rng(55);
  double worst = 0.0;
  auto run = [&](const MapInstance& map, const std::vector<State>& pts) {
    for (double e : kernels::roundtrip_errors(map, pts, {}, kernels::Backend::openmp)) worst = std::max(worst, e);
  };
  std::vector<State> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(State::scalar(uniform(rng, -1.5, 1.5)));
  run(MapInstance::gd(catalog::double_well(1.5), 0.1), pts);

  pts.clear();
  for (int k = 0; k < 100; ++k) pts.push_back(interior_simplex(rng, {3, 2}));
  run(MapInstance::mwu_exp(catalog::quadratic(5), {0.3, 0.5}, {3, 2}), pts);
  run(MapInstance::mwu_lin(catalog::quadratic(5), {0.3, 0.5}, {3, 2}), pts);

  const Game g = random_games().front();
  const auto alt = MapInstance::alt_play(g.payoff, g.eta1, g.eta2);
  pts.clear();
  for (int k = 0; k < 100; ++k) pts.push_back(alt.make_state(uniform_vector(rng, alt.dimension(), -10, 10)));
  run(alt, pts);

  pts.clear();
  for (int k = 0; k < 100; ++k) pts.push_back(sphere_point(rng, 3));
  run(MapInstance::rgd_sphere(catalog::bump(3), 0.1, 2.0), pts);
  return {worst <= 1e-10, "max |T^-1(T x) - x| = " + sci(worst) + " <= 1e-10 (GD, MWU exp, MWU lin, alt_play, sphere; 100 points each)"};
}

Outcome rank_diagnostic() {
  Eigen::Index lowest = 1 << 20;
  for (const Game& g : random_games()) lowest = std::min(lowest, dphi_rank(g.payoff, g.eta1, g.eta2).rank);
  return {lowest >= 2, "minimum rank over 100 games = " + std::to_string(lowest) + " >= 2"};
}

Outcome chaos_confinement() {
  const auto t0 = std::chrono::steady_clock::now();
  const Payoff p = Payoff::scalar(1.0);
  const auto map = MapInstance::alt_play(p, 0.1, 0.2);
  const Invariant phi = Invariant::closed_form(p, 0.1, 0.2);
  std::mt19937_64 rng(7);
  std::vector<std::pair<State, State>> pairs;
  while (pairs.size() < 1000) {
    const State x = map.make_state(uniform_vector(rng, 2, -50, 50));
    const State y = map.make_state(uniform_vector(rng, 2, -50, 50));
    const double px = phi(x), py = phi(y);
    if (std::abs(px - py) > 1e-6 * (1.0 + std::max(std::abs(px), std::abs(py)))) pairs.emplace_back(x, y);
  }
  const ConfinementReport rep = level_set_confinement(map, phi, pairs, 10000);
  return {rep.candidates == 0 && rep.status == ConfinementStatus::confirmed,
          std::to_string(rep.candidates) + " scramble-candidates among " + std::to_string(pairs.size()) +
              " cross-level pairs (horizon 1e4, max Phi defect " + sci(rep.max_phi_defect) + ", " +
              sci(seconds_since(t0)) + " s)"};
}

Outcome chart_conservation() {
  std::mt19937_64 rng(88);
  double renorm = 0.0, sums = 0.0, norm = 0.0;
  Eigen::VectorXd c(5);
  c << 1.0, -0.5, 0.25, 0.3, -0.7;
  for (const auto& map : {MapInstance::mwu_exp(catalog::linear(c), {0.05, 0.1}, {3, 2}),
                          MapInstance::mwu_lin(catalog::quadratic(5), {0.05, 0.1}, {3, 2})}) {
    for (int trial = 0; trial < 5; ++trial) {
      State x = interior_simplex(rng, {3, 2});
      for (int k = 0; k < 10000; ++k) {
        const StepResult r = step_detailed(map, x);
        renorm = std::max(renorm, r.renorm_defect);
        x = r.next;
        sums = std::max({sums, std::abs(x.coords().head(3).sum() - 1.0), std::abs(x.coords().tail(2).sum() - 1.0)});
      }
    }
  }
  const auto rgd = MapInstance::rgd_sphere(catalog::bump(3), 0.1, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    State s = sphere_point(rng, 3);
    for (int k = 0; k < 10000; ++k) {
      s = step(rgd, s);
      norm = std::max(norm, std::abs(s.coords().norm() - 1.0));
    }
  }
  return {renorm <= 1e-12 && sums <= 1e-12 && norm <= 1e-12,
          "MWU pre-renormalization defect " + sci(renorm) + ", block sums " + sci(sums) + ", sphere |norm - 1| " +
              sci(norm) + " (all <= 1e-12, 1e4 steps)"};
}

Outcome mwu_agreement() {
  const auto f = catalog::quadratic(5);
  const std::vector<Eigen::Index> blocks = {3, 2};
  auto constant = [&](double eps) {
    std::mt19937_64 rng(7);
    const auto e = MapInstance::mwu_exp(f, {eps, eps}, blocks);
    const auto l = MapInstance::mwu_lin(f, {eps, eps}, blocks);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const State x = interior_simplex(rng, blocks);
      worst = std::max(worst, distance(step(e, x), step(l, x)) / (eps * eps));
    }
    return worst;
  };
  const double c2 = constant(1e-2), c3 = constant(1e-3);
  const double ratio = c3 / c2;
  return {std::abs(ratio - 1.0) <= 0.1, "C(1e-2) = " + sci(c2) + ", C(1e-3) = " + sci(c3) + ", |ratio - 1| = " +
                                            sci(std::abs(ratio - 1.0)) + " <= 0.1 (1e3 interior points)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("orbitlab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const fs::path src = ORBITLAB_SOURCE_DIR;
  const std::vector<std::pair<std::string, std::string>> jobs = {
      {"alt_play_fig1", "simulate"}, {"mwu_exp", "simulate"}, {"gd_double_well_series", "invariant"},
      {"classify_alt_play", "classify"}, {"scan_alt_play", "scan"}};
  std::size_t files = 0, mismatches = 0;
  bool ran = true;
  for (const auto& [config, command] : jobs) {
    fs::path runs[2] = {root / (config + "_a"), root / (config + "_b")};
    for (const fs::path& out : runs) {
      const std::string cfg = (src / "configs" / (config + ".json")).string(), dir = out.string();
      const char* argv[] = {"orbitlab", "--config", cfg.c_str(), "--out", dir.c_str(), command.c_str()};
      std::ostringstream log, err;
      ran = ran && cli::run(6, argv, log, err) == 0;
    }
    for (const auto& entry : fs::directory_iterator(runs[0])) {
      ++files;
      if (slurp(entry.path()) != slurp(runs[1] / entry.path().filename())) ++mismatches;
    }
  }
  fs::remove_all(root);
  return {ran && files > 0 && mismatches == 0,
          std::to_string(files) + " CSV/JSON files from two consecutive runs, " + std::to_string(mismatches) +
              " differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"reference invariant values", reference_values},
      {"conservation on random games", random_conservation},
      {"descent lemma", descent_lemma},
      {"series-invariant convergence", series_convergence},
      {"inverse roundtrip", inverse_roundtrip},
      {"rank diagnostic", rank_diagnostic},
      {"chaos confinement", chaos_confinement},
      {"simplex/sphere conservation", chart_conservation},
      {"MWU variant agreement", mwu_agreement},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " acceptance criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
