#include "orbitlab/invariants.hpp"

#include "orbitlab/errors.hpp"
#include "orbitlab/precise_alt_play.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace orbitlab {

WeightFunction WeightFunction::gaussian_bump(Eigen::VectorXd center, double width) {
  if (!(width > 0.0)) throw DomainError("gaussian bump width must be positive");
  return WeightFunction(GaussianBump{std::move(center), width});
}

double WeightFunction::operator()(const State& x) const {
  struct Visitor {
    const State& x;
    double operator()(const Constant& k) const { return k.c; }
    double operator()(const Coordinate& k) const {
      if (k.index < 0 || k.index >= x.dim()) throw DomainError("weight coordinate out of range");
      return x[k.index];
    }
    double operator()(const GaussianBump& k) const {
      if (k.center.size() != x.dim()) throw DomainError("bump center dimension mismatch");
      return std::exp(-(x.coords() - k.center).squaredNorm() / (2.0 * k.width * k.width));
    }
  };
  return std::visit(Visitor{x}, kind_);
}

std::string WeightFunction::describe() const {
  std::ostringstream out;
  if (const auto* c = std::get_if<Constant>(&kind_)) {
    out << "constant(" << c->c << ")";
  } else if (const auto* i = std::get_if<Coordinate>(&kind_)) {
    out << "coordinate(" << i->index << ")";
  } else {
    const auto& b = std::get<GaussianBump>(kind_);
    out << "gaussian-bump(width=" << b.width << ")";
  }
  return out.str();
}

double bipartite_invariant(const Payoff& payoff, double eta1, double eta2, const State& xy) {
  if (xy.chart() != Chart::bipartite_pair) throw DomainError("bipartite invariant needs a bipartite state");
  const Eigen::MatrixXd& a = payoff.assembled();
  if (xy.blocks()[0] != a.rows() || xy.blocks()[1] != a.cols())
    throw DomainError("bipartite state does not match the payoff dimensions");
  const Eigen::VectorXd x = xy.x_block();
  const Eigen::VectorXd y = xy.y_block();
  return x.squaredNorm() / eta1 - y.squaredNorm() / eta2 + x.dot(a * y);
}

namespace {

// Tracks one half of the series: consecutive non-decaying increments.
struct DecayWatch {
  double last = std::numeric_limits<double>::infinity();
  std::size_t run = 0;

  std::size_t update(double term) {
    const double mag = std::abs(term);
    if (mag != 0.0 && mag >= last) ++run;
    else run = 0;
    last = mag;
    return run;
  }
};

}  // namespace

InvariantReport series_invariant(const MapInstance& map, const WeightFunction& p,
                                 const State& x, const SeriesOptions& opts) {
  map.check_domain(x);
  const Objective& obj = map.objective();
  if (map.kind() == MapKind::gd && !obj.bounded() && !obj.region())
    throw DomainError("series invariant for gd needs a bounded objective or a declared region");
  auto f = [&](const State& s) { return obj.value(s.coords()); };
  const double fp_tol = opts.orbit.fixed_point_tolerance;

  InvariantReport rep;
  if (detect_fixed_point(map, x, fp_tol)) {
    rep.fixed_point = true;
    rep.forward_endpoint_f = rep.backward_endpoint_f = f(x);
    return rep;
  }

  State fwd = x;
  double f_fwd = f(x);
  bool fwd_frozen = false;

  State bwd = x;  // x_{-j}
  double f_bwd = f(x);
  bool bwd_frozen = false;
  bool bwd_failed = false;

  // Advances the backward half: returns p(x_{-j}) (f(x_{-j-1}) - f(x_{-j})).
  auto backward_term = [&]() -> double {
    if (bwd_failed || bwd_frozen) return 0.0;
    if (rep.backward_depth > 0 && detect_fixed_point(map, bwd, fp_tol)) {
      bwd_frozen = true;
      return 0.0;
    }
    State prev;
    try {
      prev = inverse_step(map, bwd, opts.orbit.inverse);
    } catch (const InversionError& e) {
      bwd_failed = true;
      rep.one_sided = true;
      rep.bias_note = std::string("backward orbit stopped after ") +
                      std::to_string(rep.backward_depth) + " steps (" + e.what() +
                      "); the missing tail f(T^-1 x) - f(L_x) is not evaluated";
      return 0.0;
    }
    const double f_prev = f(prev);
    const double term = p(bwd) * (f_prev - f_bwd);
    bwd = std::move(prev);
    f_bwd = f_prev;
    ++rep.backward_depth;
    return term;
  };
  auto forward_term = [&]() -> double {
    if (fwd_frozen) return 0.0;
    State next = step(map, fwd);
    if (!next.coords().allFinite())
      throw NumericalError("non-finite state in series forward orbit", 0);
    if (distance(next, fwd) <= fp_tol) {
      fwd_frozen = true;
      return 0.0;
    }
    const double f_next = f(next);
    const double term = p(next) * (f_fwd - f_next);
    fwd = std::move(next);
    f_fwd = f_next;
    return term;
  };

  double sum = backward_term();  // term_0
  rep.partial_sums.push_back(sum);
  double last_increment = sum;

  DecayWatch fwd_watch, bwd_watch;
  std::size_t j = 0;
  while (j < opts.n) {
    ++j;
    const double tf = forward_term();
    sum += tf;
    rep.partial_sums.push_back(sum);
    const double tb = backward_term();
    sum += tb;
    rep.partial_sums.push_back(sum);
    last_increment = tb;

    if (fwd_watch.update(tf) >= opts.divergence_window ||
        bwd_watch.update(tb) >= opts.divergence_window) {
      rep.divergent = true;
      break;
    }
    if (opts.auto_stop && std::abs(tf) < opts.stop_threshold &&
        std::abs(tb) < opts.stop_threshold) {
      rep.auto_stopped = j < opts.n;
      break;
    }
  }

  rep.truncation_n = j;
  rep.tail_estimate = std::abs(last_increment);
  rep.forward_endpoint_f = f_fwd;
  rep.backward_endpoint_f = f_bwd;
  rep.value = rep.divergent ? std::numeric_limits<double>::quiet_NaN() : sum;

  if (opts.defect_horizon > 0 && !rep.divergent) {
    SeriesOptions inner = opts;
    inner.defect_horizon = 0;
    State s = x;
    for (std::size_t k = 1; k <= opts.defect_horizon; ++k) {
      s = step(map, s);
      rep.per_step_defect.push_back(std::abs(series_invariant(map, p, s, inner).value - rep.value) /
                                    (1.0 + std::abs(rep.value)));
    }
  }
  return rep;
}

Invariant Invariant::closed_form(Payoff payoff, double eta1, double eta2) {
  auto shared = std::make_shared<const Payoff>(payoff);
  Invariant inv("bipartite", [shared, eta1, eta2](const State& s) {
    return bipartite_invariant(*shared, eta1, eta2, s);
  });
  inv.form_ = BipartiteForm{std::move(payoff), eta1, eta2};
  return inv;
}

Invariant Invariant::series(MapInstance map, WeightFunction p, SeriesOptions opts) {
  std::string id = "series:" + p.describe() + ":n=" + std::to_string(opts.n);
  return Invariant(std::move(id), [map = std::move(map), p = std::move(p), opts](const State& s) {
    return series_invariant(map, p, s, opts).value;
  });
}

Invariant Invariant::constant(double c) {
  return Invariant("constant", [c](const State&) { return c; });
}

Invariant Invariant::custom(std::string id, std::function<double(const State&)> fn) {
  return Invariant(std::move(id), std::move(fn));
}

bool Invariant::is_closed_form_for(const MapInstance& map) const {
  if (!form_ || map.kind() != MapKind::alt_play) return false;
  return form_->eta1 == map.step_sizes()[0] && form_->eta2 == map.step_sizes()[1] &&
         form_->payoff.assembled() == map.payoff()->assembled();
}

std::vector<double> invariance_defect_trace(const Invariant& phi, const MapInstance& map,
                                            const State& x, std::size_t horizon) {
  if (horizon < 1) throw DomainError("invariance defect needs horizon >= 1");
  map.check_domain(x);
  std::vector<double> trace;
  trace.reserve(horizon);
  if (phi.is_closed_form_for(map)) {
    PreciseAltPlay tracker(*map.payoff(), map.step_sizes()[0], map.step_sizes()[1], x);
    for (std::size_t k = 0; k < horizon; ++k) {
      tracker.step();
      trace.push_back(tracker.relative_defect());
    }
    return trace;
  }
  const double phi0 = phi(x);
  State s = x;
  for (std::size_t k = 1; k <= horizon; ++k) {
    s = step(map, s);
    if (!s.coords().allFinite())
      throw NumericalError("non-finite state while measuring invariance defect", static_cast<long>(k));
    trace.push_back(std::abs(phi(s) - phi0) / (1.0 + std::abs(phi0)));
  }
  return trace;
}

double invariance_defect(const Invariant& phi, const MapInstance& map, const State& x,
                         std::size_t horizon) {
  double worst = 0.0;
  for (const double d : invariance_defect_trace(phi, map, x, horizon)) {
    if (std::isnan(d)) return d;
    worst = std::max(worst, d);
  }
  return worst;
}

RankResult dphi_rank(const Payoff& payoff, double eta1, double eta2) {
  const Eigen::MatrixXd& a = payoff.assembled();
  const Eigen::Index nx = a.rows(), ny = a.cols();
  RankResult out;
  out.matrix.resize(nx + ny, nx + ny);
  out.matrix.topLeftCorner(nx, nx) = (2.0 / eta1) * Eigen::MatrixXd::Identity(nx, nx);
  out.matrix.topRightCorner(nx, ny) = a;
  out.matrix.bottomLeftCorner(ny, nx) = a.transpose();
  out.matrix.bottomRightCorner(ny, ny) = (-2.0 / eta2) * Eigen::MatrixXd::Identity(ny, ny);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.matrix);
  out.singular_values = svd.singularValues();
  const double threshold = 1e-10 * out.singular_values.maxCoeff();
  out.rank = (out.singular_values.array() > threshold).count();
  return out;
}

}  // namespace orbitlab
