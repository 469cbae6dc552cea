#include "orbitlab/dynamics.hpp"

#include "orbitlab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace orbitlab {

namespace {

[[noreturn]] void fail(const std::string& what, const Eigen::VectorXd& y, double residual) {
  throw InversionError(what, y, residual);
}

State invert_gd(const MapInstance& map, const State& x, const InverseConfig& cfg) {
  const Objective& obj = map.objective();
  const double eta = map.eta();
  const Eigen::VectorXd& target = x.coords();
  auto residual = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return gd_step(obj, eta, y) - target;
  };
  Eigen::VectorXd y = target + eta * obj.gradient(target);
  Eigen::VectorXd r = residual(y);
  double norm = r.norm();
  int it = 0;
  for (; it < cfg.max_iterations && norm > cfg.tolerance; ++it) {
    const Eigen::MatrixXd jac = jacobian(map, y);
    const Eigen::VectorXd delta = jac.fullPivLu().solve(-r);
    if (!delta.allFinite()) fail("gd inverse: singular Jacobian", y, norm);
    // Backtracking on the residual norm.
    double alpha = 1.0;
    Eigen::VectorXd trial = y + delta;
    Eigen::VectorXd r_trial = residual(trial);
    while (!(r_trial.norm() < norm) && alpha > 1e-6) {
      alpha *= 0.5;
      trial = y + alpha * delta;
      r_trial = residual(trial);
    }
    if (!(r_trial.norm() < norm)) break;
    y = std::move(trial);
    r = std::move(r_trial);
    norm = r.norm();
  }
  if (!(norm <= cfg.tolerance)) fail("gd inverse: Newton did not converge", y, norm);
  // One polishing step; kept only if it helps.
  const Eigen::VectorXd polished = y + jacobian(map, y).fullPivLu().solve(-r);
  if (polished.allFinite() && residual(polished).norm() < norm) {
    y = polished;
    norm = residual(y).norm();
  }
  if (obj.region() && !obj.region()->contains(y))
    fail("gd inverse: preimage leaves the declared region", y, norm);
  return x.with_coords(std::move(y));
}

State invert_mwu(const MapInstance& map, const State& x, const InverseConfig& cfg) {
  const Eigen::VectorXd& target = x.coords();
  if ((target.array() <= 0.0).any())
    fail("mwu inverse: target must lie in the simplex interior", target, 0.0);
  const auto& blocks = map.blocks();
  const Eigen::Index d = target.size();
  const auto nb = static_cast<Eigen::Index>(blocks.size());
  const bool exponential = map.kind() == MapKind::mwu_exp;

  // Undo the multiplicative factors at x as a starting guess.
  const Eigen::VectorXd g = map.objective().gradient(target);
  Eigen::VectorXd y(d);
  Eigen::Index off = 0;
  for (Eigen::Index b = 0; b < nb; ++b) {
    const double e = map.step_sizes()[static_cast<std::size_t>(b)];
    for (Eigen::Index j = off; j < off + blocks[static_cast<std::size_t>(b)]; ++j) {
      const double w = exponential ? std::exp(-e * g[j]) : 1.0 - e * g[j];
      y[j] = w > 0.0 ? target[j] / w : target[j];
    }
    off += blocks[static_cast<std::size_t>(b)];
  }
  renormalize_simplex(y, blocks);

  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd r(d + nb);
    r.head(d) = mwu_ambient(map, v) - target;
    Eigen::Index o = 0;
    for (Eigen::Index b = 0; b < nb; ++b) {
      const Eigen::Index size = blocks[static_cast<std::size_t>(b)];
      r[d + b] = v.segment(o, size).sum() - 1.0;
      o += size;
    }
    return r;
  };
  auto stacked_jacobian = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d + nb, d);
    jac.topRows(d) = jacobian(map, v);
    Eigen::Index o = 0;
    for (Eigen::Index b = 0; b < nb; ++b) {
      const Eigen::Index size = blocks[static_cast<std::size_t>(b)];
      jac.block(d + b, o, 1, size).setOnes();
      o += size;
    }
    return jac;
  };

  Eigen::VectorXd r = residual(y);
  double norm = r.norm();
  for (int it = 0; it < cfg.max_iterations && norm > 0.1 * cfg.tolerance; ++it) {
    const Eigen::VectorXd delta = stacked_jacobian(y).colPivHouseholderQr().solve(-r);
    if (!delta.allFinite()) fail("mwu inverse: singular Jacobian", y, norm);
    double alpha = 1.0;
    Eigen::VectorXd trial = y + delta;
    while (((trial.array() <= 0.0).any() || !(residual(trial).norm() < norm)) && alpha > 1e-6) {
      alpha *= 0.5;
      trial = y + alpha * delta;
    }
    if ((trial.array() <= 0.0).any())
      fail("mwu inverse: Newton left the simplex interior", trial, norm);
    const Eigen::VectorXd r_trial = residual(trial);
    if (!(r_trial.norm() < norm)) break;
    y = std::move(trial);
    r = r_trial;
    norm = r.norm();
  }
  renormalize_simplex(y, blocks);
  const State pre = x.with_coords(y);
  const double final_residual = distance(step(map, pre), x);
  if (!(final_residual <= cfg.tolerance))
    fail("mwu inverse: Newton did not converge", y, final_residual);
  return pre;
}

State invert_sphere(const MapInstance& map, const State& x, const InverseConfig& cfg) {
  const Eigen::VectorXd& target = x.coords();
  const Eigen::Index d = target.size();
  // Orthonormal tangent basis at a point p: trailing columns of the
  // Householder Q of p.
  auto tangent_basis = [d](const Eigen::VectorXd& p) -> Eigen::MatrixXd {
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(p).householderQ();
    return q.rightCols(d - 1);
  };
  const Eigen::MatrixXd target_basis = tangent_basis(target);
  // Reverse step as the chart center.
  const Eigen::VectorXd center =
      retract_sphere(target, map.eta() * riemannian_gradient(map.objective(), target));
  const Eigen::MatrixXd chart = tangent_basis(center);

  auto point = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return retract_sphere(center, chart * v);
  };
  auto image = [&](const Eigen::VectorXd& v) {
    return rgd_sphere_step(map.objective(), map.eta(), State(point(v), Chart::sphere)).next.coords();
  };
  auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return target_basis.transpose() * (image(v) - target);
  };

  Eigen::VectorXd v = Eigen::VectorXd::Zero(d - 1);
  Eigen::VectorXd r = residual(v);
  double full = (image(v) - target).norm();
  for (int it = 0; it < cfg.max_iterations && full > 0.1 * cfg.tolerance; ++it) {
    Eigen::MatrixXd jac(d - 1, d - 1);
    for (Eigen::Index j = 0; j < d - 1; ++j) {
      const double h = 1e-7;
      Eigen::VectorXd vp = v, vm = v;
      vp[j] += h;
      vm[j] -= h;
      jac.col(j) = (residual(vp) - residual(vm)) / (2.0 * h);
    }
    const Eigen::VectorXd delta = jac.fullPivLu().solve(-r);
    if (!delta.allFinite()) fail("sphere inverse: singular chart Jacobian", point(v), full);
    double alpha = 1.0;
    Eigen::VectorXd trial = v + delta;
    double trial_full = (image(trial) - target).norm();
    while (!(trial_full < full) && alpha > 1e-6) {
      alpha *= 0.5;
      trial = v + alpha * delta;
      trial_full = (image(trial) - target).norm();
    }
    if (!(trial_full < full)) break;
    v = std::move(trial);
    r = residual(v);
    full = trial_full;
  }
  if (!(full <= cfg.tolerance)) fail("sphere inverse: Newton did not converge", point(v), full);
  return x.with_coords(point(v));
}

}  // namespace

State inverse_step(const MapInstance& map, const State& x, const InverseConfig& cfg) {
  map.check_domain(x);
  switch (map.kind()) {
    case MapKind::gd: return invert_gd(map, x, cfg);
    case MapKind::mwu_exp:
    case MapKind::mwu_lin: return invert_mwu(map, x, cfg);
    case MapKind::alt_play:
      return alt_play_inverse(*map.payoff(), map.step_sizes()[0], map.step_sizes()[1], x);
    case MapKind::rgd_sphere: return invert_sphere(map, x, cfg);
  }
  throw DomainError("unknown map kind");
}

const State& OrbitSegment::at(long k) const {
  if (k == 0) return origin;
  if (k > 0) return forward.at(static_cast<std::size_t>(k - 1));
  return backward.at(static_cast<std::size_t>(-k - 1));
}

OrbitSegment orbit(const MapInstance& map, const State& x, std::size_t n_forward,
                   std::size_t n_backward, const OrbitOptions& opts) {
  map.check_domain(x);
  OrbitSegment seg;
  seg.origin = x;
  seg.map_kind = map.kind();
  seg.requested_forward = n_forward;
  seg.requested_backward = n_backward;
  seg.forward.reserve(n_forward);
  seg.backward.reserve(n_backward);

  State current = x;
  for (std::size_t k = 0; k < n_forward; ++k) {
    StepResult r = step_detailed(map, current);
    if (!r.next.coords().allFinite())
      throw NumericalError("non-finite state in forward orbit", static_cast<long>(k + 1));
    seg.max_renorm_defect = std::max(seg.max_renorm_defect, r.renorm_defect);
    if (opts.stop_at_fixed_point &&
        distance(r.next, current) <= opts.fixed_point_tolerance) {
      seg.forward_truncated = true;
      break;
    }
    current = std::move(r.next);
    seg.forward.push_back(current);
  }

  current = x;
  for (std::size_t k = 0; k < n_backward; ++k) {
    if (opts.stop_at_fixed_point &&
        detect_fixed_point(map, current, opts.fixed_point_tolerance)) {
      seg.backward_truncated = true;
      break;
    }
    try {
      current = inverse_step(map, current, opts.inverse);
    } catch (const InversionError& e) {
      throw e.with_index(-static_cast<long>(k + 1));
    }
    seg.backward.push_back(current);
  }
  return seg;
}

bool detect_fixed_point(const MapInstance& map, const State& x, double tol) {
  return distance(step(map, x), x) <= tol;
}

double descent_check(const Objective& obj, const MapInstance& map, const State& x) {
  return obj.value(x.coords()) - obj.value(step(map, x).coords());
}

}  // namespace orbitlab
