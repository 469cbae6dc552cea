#include "orbitlab/objectives.hpp"

#include "orbitlab/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace orbitlab {

Region Region::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size() || (hi - lo).minCoeff() < 0.0)
    throw DomainError("malformed box region");
  Region r;
  r.is_box_ = true;
  r.lo_ = std::move(lo);
  r.hi_ = std::move(hi);
  return r;
}

Region Region::cube(Eigen::Index dim, double half_width) {
  return box(Eigen::VectorXd::Constant(dim, -half_width),
             Eigen::VectorXd::Constant(dim, half_width));
}

Region Region::ball(Eigen::VectorXd center, double radius) {
  if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
  Region r;
  r.is_box_ = false;
  r.lo_ = std::move(center);
  r.radius_ = radius;
  return r;
}

Eigen::Index Region::dim() const { return lo_.size(); }

bool Region::contains(const Eigen::VectorXd& x, double slack) const {
  if (x.size() != lo_.size()) return false;
  if (is_box_)
    return ((x - lo_).array() >= -slack).all() && ((hi_ - x).array() >= -slack).all();
  return (x - lo_).norm() <= radius_ + slack;
}

Eigen::VectorXd Region::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(lo_.size());
  if (is_box_) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = lo_[i] + (hi_[i] - lo_[i]) * unit(rng);
    return x;
  }
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
  const double r = radius_ * std::pow(unit(rng), 1.0 / static_cast<double>(x.size()));
  return lo_ + r * x.normalized();
}

Objective::Objective(Definition def) : def_(std::move(def)) {
  if (def_.dimension <= 0) throw DomainError("objective dimension must be positive");
  if (!def_.value || !def_.gradient) throw DomainError("objective needs value and gradient");
  if (def_.region && def_.region->dim() != def_.dimension)
    throw DomainError("objective region dimension mismatch");
}

Eigen::MatrixXd Objective::hessian(const Eigen::VectorXd& x) const {
  if (def_.hessian) return (*def_.hessian)(x);
  const Eigen::Index d = x.size();
  Eigen::MatrixXd h(d, d);
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    h.col(j) = (gradient(xp) - gradient(xm)) / (2.0 * step);
    xp[j] = xm[j] = x[j];
  }
  return 0.5 * (h + h.transpose());
}

namespace catalog {

ObjectivePtr quadratic(Eigen::Index dim) {
  Objective::Definition def;
  def.name = "quadratic";
  def.dimension = dim;
  def.value = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  def.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  def.hessian = [dim](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Identity(dim, dim);
  };
  def.hessian_entry_bound = 1.0;
  return std::make_shared<const Objective>(std::move(def));
}

ObjectivePtr bilinear(const Eigen::MatrixXd& a) {
  const Eigen::Index k1 = a.rows(), k2 = a.cols();
  Objective::Definition def;
  def.name = "bilinear";
  def.dimension = k1 + k2;
  def.value = [a, k1, k2](const Eigen::VectorXd& z) {
    return z.head(k1).dot(a * z.tail(k2));
  };
  def.gradient = [a, k1, k2](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    Eigen::VectorXd g(k1 + k2);
    g << a * z.tail(k2), a.transpose() * z.head(k1);
    return g;
  };
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k1 + k2, k1 + k2);
  h.topRightCorner(k1, k2) = a;
  h.bottomLeftCorner(k2, k1) = a.transpose();
  def.hessian = [h](const Eigen::VectorXd&) -> Eigen::MatrixXd { return h; };
  def.hessian_entry_bound = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  return std::make_shared<const Objective>(std::move(def));
}

ObjectivePtr double_well(double half_width) {
  if (!(half_width > 0.0)) throw DomainError("double-well half width must be positive");
  Objective::Definition def;
  def.name = "double_well";
  def.dimension = 1;
  def.value = [](const Eigen::VectorXd& x) {
    const double v = x[0];
    return v * v * v * v / 4.0 - v * v / 2.0;
  };
  def.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd g(1);
    g[0] = x[0] * x[0] * x[0] - x[0];
    return g;
  };
  def.hessian = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 3.0 * x[0] * x[0] - 1.0;
    return h;
  };
  // |3x^2 - 1| on [-w, w] peaks at the endpoints or at x = 0.
  def.hessian_entry_bound = std::max(3.0 * half_width * half_width - 1.0, 1.0);
  def.region = Region::cube(1, half_width);
  def.bounded = true;  // only evaluated on the compact region
  return std::make_shared<const Objective>(std::move(def));
}

ObjectivePtr linear(Eigen::VectorXd c) {
  const Eigen::Index dim = c.size();
  Objective::Definition def;
  def.name = "linear";
  def.dimension = dim;
  def.value = [c](const Eigen::VectorXd& x) { return c.dot(x); };
  def.gradient = [c](const Eigen::VectorXd&) -> Eigen::VectorXd { return c; };
  def.hessian = [dim](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Zero(dim, dim);
  };
  def.hessian_entry_bound = 0.0;
  return std::make_shared<const Objective>(std::move(def));
}

ObjectivePtr bump(Eigen::Index dim) {
  Objective::Definition def;
  def.name = "bump";
  def.dimension = dim;
  def.value = [](const Eigen::VectorXd& x) { return -1.0 / (1.0 + x.squaredNorm()); };
  def.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double u = 1.0 + x.squaredNorm();
    return 2.0 * x / (u * u);
  };
  def.hessian = [dim](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double u = 1.0 + x.squaredNorm();
    return 2.0 / (u * u) * Eigen::MatrixXd::Identity(dim, dim) -
           8.0 / (u * u * u) * x * x.transpose();
  };
  // Diagonal entries peak at x = 0 with value 2; off-diagonal ones stay below 0.6.
  def.hessian_entry_bound = 2.0;
  def.bounded = true;
  return std::make_shared<const Objective>(std::move(def));
}

}  // namespace catalog

std::string_view to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::accept: return "accept";
    case VerdictStatus::reject: return "reject";
    case VerdictStatus::unverifiable: return "unverifiable";
  }
  return "unknown";
}

Eigen::VectorXd finite_difference_gradient(const Objective& obj,
                                           const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    g[i] = (obj.value(xp) - obj.value(xm)) / (2.0 * step);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

double estimate_hessian_entry_bound(const Objective& obj, int samples,
                                    std::uint64_t seed) {
  if (!obj.region()) throw DomainError("estimating L needs a declared region");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = obj.region()->sample(rng);
    worst = std::max(worst, obj.hessian(x).cwiseAbs().maxCoeff());
  }
  return 1.25 * worst;
}

namespace {

StepSizeVerdict make_verdict(double eta, double bound, double lipschitz, bool estimated) {
  StepSizeVerdict v;
  v.eta = eta;
  v.bound = bound;
  v.margin = bound - eta;
  v.lipschitz = lipschitz;
  v.estimated = estimated;
  v.status = (eta > 0.0 && eta < bound) ? VerdictStatus::accept : VerdictStatus::reject;
  return v;
}

}  // namespace

StepSizeVerdict validate_step_size_gd(const Objective& obj, double eta) {
  double lipschitz = 0.0;
  bool estimated = false;
  if (obj.hessian_entry_bound()) {
    lipschitz = *obj.hessian_entry_bound();
  } else if (obj.region()) {
    lipschitz = estimate_hessian_entry_bound(obj);
    estimated = true;
  } else {
    StepSizeVerdict v;
    v.eta = eta;
    v.status = VerdictStatus::unverifiable;
    return v;
  }
  const double d = static_cast<double>(obj.dimension());
  const double bound = lipschitz > 0.0 ? 2.0 / (d * lipschitz)
                                       : std::numeric_limits<double>::infinity();
  return make_verdict(eta, bound, lipschitz, estimated);
}

double estimate_pullback_lipschitz(const Objective& obj, int samples, double radius,
                                   std::uint64_t seed) {
  const Eigen::Index d = obj.dimension();
  if (d < 2) throw DomainError("sphere objectives need dimension >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto gaussian = [&] {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
    return v;
  };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = gaussian().normalized();
    const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(d, d) - x * x.transpose();
    Eigen::VectorXd tangent = proj * gaussian();
    if (tangent.norm() == 0.0) continue;
    const double len = radius * (1.0 - unit(rng));  // in (0, radius]
    tangent *= len / tangent.norm();
    const Eigen::VectorXd moved = x + tangent;
    const double scale = moved.norm();
    const Eigen::VectorXd r = moved / scale;
    const Eigen::VectorXd g_s =
        proj * ((obj.gradient(r) - r * r.dot(obj.gradient(r))) / scale);
    const Eigen::VectorXd g_0 = proj * obj.gradient(x);
    worst = std::max(worst, (g_s - g_0).norm() / len);
  }
  return 1.25 * worst;
}

StepSizeVerdict validate_step_size_manifold(const Objective& obj, double eta,
                                            std::optional<double> lipschitz) {
  bool estimated = false;
  if (!lipschitz) {
    lipschitz = estimate_pullback_lipschitz(obj);
    estimated = true;
  }
  if (!(*lipschitz > 0.0)) throw DomainError("manifold Lipschitz constant must be positive");
  return make_verdict(eta, 1.0 / *lipschitz, *lipschitz, estimated);
}

}  // namespace orbitlab
