#include "orbitlab/maps.hpp"

#include "orbitlab/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace orbitlab {

std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::gd: return "gd";
    case MapKind::mwu_exp: return "mwu_exp";
    case MapKind::mwu_lin: return "mwu_lin";
    case MapKind::alt_play: return "alt_play";
    case MapKind::rgd_sphere: return "rgd_sphere";
  }
  return "unknown";
}

MapKind map_kind_from_string(std::string_view name) {
  if (name == "gd") return MapKind::gd;
  if (name == "mwu_exp") return MapKind::mwu_exp;
  if (name == "mwu_lin") return MapKind::mwu_lin;
  if (name == "alt_play") return MapKind::alt_play;
  if (name == "rgd_sphere") return MapKind::rgd_sphere;
  throw DomainError("unknown map kind '" + std::string(name) + "'");
}

std::string_view to_string(InverseStrategy strategy) {
  switch (strategy) {
    case InverseStrategy::closed_form: return "closed_form";
    case InverseStrategy::newton: return "newton";
    case InverseStrategy::unavailable: return "unavailable";
  }
  return "unknown";
}

MapInstance MapInstance::gd(ObjectivePtr objective, double eta) {
  if (!(eta > 0.0)) throw DomainError("gd step size must be positive");
  MapInstance m;
  m.kind_ = MapKind::gd;
  m.verdict_ = validate_step_size_gd(*objective, eta);
  m.validated_ = m.verdict_->accepted();
  m.objective_ = std::move(objective);
  m.step_sizes_ = {eta};
  m.inverse_ = InverseStrategy::newton;
  return m;
}

MapInstance MapInstance::mwu(MapKind kind, ObjectivePtr objective, std::vector<double> eps,
                             std::vector<Eigen::Index> blocks) {
  if (blocks.empty() || eps.size() != blocks.size())
    throw DomainError("mwu needs one learning rate per simplex block");
  for (const double e : eps)
    if (!(e > 0.0)) throw DomainError("mwu learning rates must be positive");
  for (const Eigen::Index b : blocks)
    if (b <= 0) throw DomainError("mwu blocks must be non-empty");
  if (std::accumulate(blocks.begin(), blocks.end(), Eigen::Index{0}) !=
      objective->dimension())
    throw DomainError("mwu blocks do not match the objective dimension");
  MapInstance m;
  m.kind_ = kind;
  m.objective_ = std::move(objective);
  m.step_sizes_ = std::move(eps);
  m.blocks_ = std::move(blocks);
  m.inverse_ = InverseStrategy::newton;
  m.validated_ = mwu_diffeomorphism_check(m).passed;
  return m;
}

MapInstance MapInstance::mwu_exp(ObjectivePtr objective, std::vector<double> eps,
                                 std::vector<Eigen::Index> blocks) {
  return mwu(MapKind::mwu_exp, std::move(objective), std::move(eps), std::move(blocks));
}

MapInstance MapInstance::mwu_lin(ObjectivePtr objective, std::vector<double> eps,
                                 std::vector<Eigen::Index> blocks) {
  return mwu(MapKind::mwu_lin, std::move(objective), std::move(eps), std::move(blocks));
}

MapInstance MapInstance::alt_play(Payoff payoff, double eta1, double eta2) {
  if (!(eta1 > 0.0) || !(eta2 > 0.0))
    throw DomainError("alternating play needs two positive step sizes");
  MapInstance m;
  m.kind_ = MapKind::alt_play;
  m.objective_ = catalog::bilinear(payoff.assembled());
  m.step_sizes_ = {eta1, eta2};
  m.blocks_ = {payoff.x_dim(), payoff.y_dim()};
  m.payoff_ = std::move(payoff);
  m.inverse_ = InverseStrategy::closed_form;
  m.validated_ = true;  // invertible and conserving for every positive pair
  return m;
}

MapInstance MapInstance::rgd_sphere(ObjectivePtr objective, double eta,
                                    std::optional<double> lipschitz) {
  if (!(eta > 0.0)) throw DomainError("rgd step size must be positive");
  if (objective->dimension() < 2) throw DomainError("rgd on the sphere needs dimension >= 2");
  MapInstance m;
  m.kind_ = MapKind::rgd_sphere;
  m.verdict_ = validate_step_size_manifold(*objective, eta, lipschitz);
  m.validated_ = m.verdict_->accepted();
  m.objective_ = std::move(objective);
  m.step_sizes_ = {eta};
  m.inverse_ = InverseStrategy::newton;
  return m;
}

Chart MapInstance::chart() const noexcept {
  switch (kind_) {
    case MapKind::gd: return Chart::euclidean;
    case MapKind::mwu_exp:
    case MapKind::mwu_lin: return Chart::simplex_product;
    case MapKind::alt_play: return Chart::bipartite_pair;
    case MapKind::rgd_sphere: return Chart::sphere;
  }
  return Chart::euclidean;
}

State MapInstance::make_state(Eigen::VectorXd coords) const {
  const Chart c = chart();
  std::vector<Eigen::Index> blocks;
  if (c == Chart::simplex_product || c == Chart::bipartite_pair) blocks = blocks_;
  return State(std::move(coords), c, std::move(blocks));
}

void MapInstance::check_domain(const State& x) const {
  if (x.chart() != chart())
    throw DomainError("state chart '" + std::string(to_string(x.chart())) +
                      "' does not match map '" + std::string(to_string(kind_)) + "'");
  if (x.dim() != dimension()) throw DomainError("state dimension does not match the map");
  if ((chart() == Chart::simplex_product || chart() == Chart::bipartite_pair) &&
      x.blocks() != blocks_)
    throw DomainError("state block layout does not match the map");
  x.validate();
}

Eigen::VectorXd gd_step(const Objective& obj, double eta, const Eigen::VectorXd& x) {
  return x - eta * obj.gradient(x);
}

namespace {

enum class MwuVariant { exponential, linear };

StepResult mwu_step(MwuVariant variant, const Objective& obj, const std::vector<double>& eps,
                    const State& x) {
  if (x.chart() != Chart::simplex_product) throw DomainError("mwu needs a simplex-product state");
  if (eps.size() != x.blocks().size()) throw DomainError("one learning rate per block");
  const Eigen::VectorXd& v = x.coords();
  const Eigen::VectorXd g = obj.gradient(v);
  Eigen::VectorXd out(v.size());
  Eigen::Index off = 0;
  for (std::size_t b = 0; b < x.blocks().size(); ++b) {
    const Eigen::Index size = x.blocks()[b];
    const double e = eps[b];
    if ((v.segment(off, size).array() <= 0.0).all())
      throw DomainError("simplex block " + std::to_string(b) + " is entirely zero");
    if (variant == MwuVariant::exponential) {
      double z = 0.0;
      for (Eigen::Index j = off; j < off + size; ++j) {
        out[j] = v[j] * std::exp(-e * g[j]);
        z += out[j];
      }
      out.segment(off, size) /= z;
    } else {
      double weighted = 0.0;
      for (Eigen::Index j = off; j < off + size; ++j) {
        const double factor = 1.0 - e * g[j];
        if (!(factor > 0.0))
          throw StepSizeError("mwu_lin factor 1 - eps*df/dx is not positive at coordinate " +
                                  std::to_string(j),
                              j);
        out[j] = v[j] * factor;
        weighted += v[j] * g[j];
      }
      out.segment(off, size) /= (1.0 - e * weighted);
    }
    off += size;
  }
  StepResult r;
  r.renorm_defect = renormalize_simplex(out, x.blocks());
  r.next = x.with_coords(std::move(out));
  return r;
}

}  // namespace

StepResult mwu_exp_step(const Objective& obj, const std::vector<double>& eps, const State& x) {
  return mwu_step(MwuVariant::exponential, obj, eps, x);
}

StepResult mwu_lin_step(const Objective& obj, const std::vector<double>& eps, const State& x) {
  return mwu_step(MwuVariant::linear, obj, eps, x);
}

State alt_play_step(const Payoff& payoff, double eta1, double eta2, const State& xy) {
  if (xy.chart() != Chart::bipartite_pair) throw DomainError("alt_play needs a bipartite state");
  const Eigen::MatrixXd& a = payoff.assembled();
  if (xy.blocks()[0] != a.rows() || xy.blocks()[1] != a.cols())
    throw DomainError("bipartite state does not match the payoff dimensions");
  const Eigen::VectorXd x = xy.x_block() + eta1 * (a * xy.y_block());
  const Eigen::VectorXd y = xy.y_block() + eta2 * (a.transpose() * x);
  return State::bipartite(x, y);
}

State alt_play_inverse(const Payoff& payoff, double eta1, double eta2, const State& xy) {
  if (xy.chart() != Chart::bipartite_pair) throw DomainError("alt_play needs a bipartite state");
  const Eigen::MatrixXd& a = payoff.assembled();
  if (xy.blocks()[0] != a.rows() || xy.blocks()[1] != a.cols())
    throw DomainError("bipartite state does not match the payoff dimensions");
  const Eigen::VectorXd x_next = xy.x_block();
  const Eigen::VectorXd y = xy.y_block() - eta2 * (a.transpose() * x_next);
  const Eigen::VectorXd x = x_next - eta1 * (a * y);
  return State::bipartite(x, y);
}

Eigen::VectorXd retract_sphere(const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
  return (x + s).normalized();
}

Eigen::VectorXd riemannian_gradient(const Objective& obj, const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = obj.gradient(x);
  return g - x * x.dot(g);
}

StepResult rgd_sphere_step(const Objective& obj, double eta, const State& x) {
  if (x.chart() != Chart::sphere) throw DomainError("rgd needs a sphere state");
  const Eigen::VectorXd moved = x.coords() - eta * riemannian_gradient(obj, x.coords());
  Eigen::VectorXd out = moved / moved.norm();
  StepResult r;
  const double n = out.norm();
  r.renorm_defect = std::abs(n - 1.0);
  out /= n;
  r.next = x.with_coords(std::move(out));
  return r;
}

StepResult step_detailed(const MapInstance& map, const State& x) {
  map.check_domain(x);
  switch (map.kind()) {
    case MapKind::gd:
      return {x.with_coords(gd_step(map.objective(), map.eta(), x.coords())), 0.0};
    case MapKind::mwu_exp:
      return mwu_exp_step(map.objective(), map.step_sizes(), x);
    case MapKind::mwu_lin:
      return mwu_lin_step(map.objective(), map.step_sizes(), x);
    case MapKind::alt_play:
      return {alt_play_step(*map.payoff(), map.step_sizes()[0], map.step_sizes()[1], x), 0.0};
    case MapKind::rgd_sphere:
      return rgd_sphere_step(map.objective(), map.eta(), x);
  }
  throw DomainError("unknown map kind");
}

State step(const MapInstance& map, const State& x) { return step_detailed(map, x).next; }

Eigen::VectorXd mwu_ambient(const MapInstance& map, const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = map.objective().gradient(x);
  const bool exponential = map.kind() == MapKind::mwu_exp;
  Eigen::VectorXd out(x.size());
  Eigen::Index off = 0;
  for (std::size_t b = 0; b < map.blocks().size(); ++b) {
    const Eigen::Index size = map.blocks()[b];
    const double e = map.step_sizes()[b];
    double z = 0.0;
    for (Eigen::Index j = off; j < off + size; ++j) {
      const double w = exponential ? std::exp(-e * g[j]) : 1.0 - e * g[j];
      out[j] = x[j] * w;
      z += out[j];
    }
    out.segment(off, size) /= z;
    off += size;
  }
  return out;
}

namespace {

Eigen::MatrixXd mwu_jacobian(const MapInstance& map, const Eigen::VectorXd& x) {
  const Objective& obj = map.objective();
  const Eigen::VectorXd g = obj.gradient(x);
  const Eigen::MatrixXd h = obj.hessian(x);
  const bool exponential = map.kind() == MapKind::mwu_exp;
  const Eigen::Index d = x.size();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(d, d);
  Eigen::Index off = 0;
  for (std::size_t b = 0; b < map.blocks().size(); ++b) {
    const Eigen::Index size = map.blocks()[b];
    const double e = map.step_sizes()[b];
    // u_j = x_j w_j, du_j/dx_k = delta_jk w_j + x_j dw_j/dx_k,
    // dw_j/dx_k = -e H_jk (times w_j for the exponential weight).
    Eigen::MatrixXd du(size, d);
    Eigen::VectorXd u(size);
    for (Eigen::Index r = 0; r < size; ++r) {
      const Eigen::Index j = off + r;
      const double w = exponential ? std::exp(-e * g[j]) : 1.0 - e * g[j];
      const double dw_scale = exponential ? w : 1.0;
      u[r] = x[j] * w;
      du.row(r) = -e * dw_scale * x[j] * h.row(j);
      du(r, j) += w;
    }
    const double z = u.sum();
    const Eigen::RowVectorXd dz = du.colwise().sum();
    for (Eigen::Index r = 0; r < size; ++r)
      jac.row(off + r) = (du.row(r) - (u[r] / z) * dz) / z;
    off += size;
  }
  return jac;
}

Eigen::MatrixXd finite_difference_jacobian(const MapInstance& map, const Eigen::VectorXd& x) {
  // Only used for the sphere; perturbations are re-projected by the step
  // formula itself (x is normalized inside the retraction).
  const Eigen::Index d = x.size();
  Eigen::MatrixXd jac(d, d);
  auto raw_step = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::VectorXd g = map.objective().gradient(v);
    const Eigen::VectorXd moved = v - map.eta() * (g - v * v.dot(g));
    return moved / moved.norm();
  };
  Eigen::VectorXd xp = x, xm = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double h = 1e-7;
    xp[j] = x[j] + h;
    xm[j] = x[j] - h;
    jac.col(j) = (raw_step(xp) - raw_step(xm)) / (2.0 * h);
    xp[j] = xm[j] = x[j];
  }
  return jac;
}

}  // namespace

Eigen::MatrixXd jacobian(const MapInstance& map, const Eigen::VectorXd& x) {
  switch (map.kind()) {
    case MapKind::gd:
      return Eigen::MatrixXd::Identity(x.size(), x.size()) - map.eta() * map.objective().hessian(x);
    case MapKind::mwu_exp:
    case MapKind::mwu_lin:
      return mwu_jacobian(map, x);
    case MapKind::alt_play: {
      const Eigen::MatrixXd& a = map.payoff()->assembled();
      const double e1 = map.step_sizes()[0], e2 = map.step_sizes()[1];
      const Eigen::Index nx = a.rows(), ny = a.cols();
      Eigen::MatrixXd jac(nx + ny, nx + ny);
      jac.topLeftCorner(nx, nx).setIdentity();
      jac.topRightCorner(nx, ny) = e1 * a;
      jac.bottomLeftCorner(ny, nx) = e2 * a.transpose();
      jac.bottomRightCorner(ny, ny) =
          Eigen::MatrixXd::Identity(ny, ny) + e1 * e2 * a.transpose() * a;
      return jac;
    }
    case MapKind::rgd_sphere:
      return finite_difference_jacobian(map, x);
  }
  throw DomainError("unknown map kind");
}

Eigen::MatrixXd simplex_tangent_basis(const std::vector<Eigen::Index>& blocks) {
  const Eigen::Index d = std::accumulate(blocks.begin(), blocks.end(), Eigen::Index{0});
  const Eigen::Index cols = d - static_cast<Eigen::Index>(blocks.size());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d, cols);
  Eigen::Index row = 0, col = 0;
  for (const Eigen::Index size : blocks) {
    if (size > 1) {
      const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(size, 1);
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(ones).householderQ();
      basis.block(row, col, size, size - 1) = q.rightCols(size - 1);
    }
    row += size;
    col += size - 1;
  }
  return basis;
}

DiffeomorphismCheck mwu_diffeomorphism_check(const MapInstance& map, int samples,
                                             std::uint64_t seed) {
  DiffeomorphismCheck out;
  out.samples = samples;
  out.min_factor = std::numeric_limits<double>::infinity();
  out.min_determinant = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  const Eigen::MatrixXd basis = simplex_tangent_basis(map.blocks());
  const bool exponential = map.kind() == MapKind::mwu_exp;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(map.dimension());
    Eigen::Index off = 0;
    for (const Eigen::Index size : map.blocks()) {
      for (Eigen::Index j = off; j < off + size; ++j) x[j] = weight(rng);
      x.segment(off, size) /= x.segment(off, size).sum();
      off += size;
    }
    const Eigen::VectorXd g = map.objective().gradient(x);
    off = 0;
    for (std::size_t b = 0; b < map.blocks().size(); ++b) {
      for (Eigen::Index j = off; j < off + map.blocks()[b]; ++j) {
        const double e = map.step_sizes()[b];
        out.min_factor =
            std::min(out.min_factor, exponential ? std::exp(-e * g[j]) : 1.0 - e * g[j]);
      }
      off += map.blocks()[b];
    }
    if (basis.cols() > 0) {
      const Eigen::MatrixXd reduced = basis.transpose() * jacobian(map, x) * basis;
      out.min_determinant = std::min(out.min_determinant, reduced.determinant());
    }
  }
  out.passed = out.min_factor > 0.0 &&
               (basis.cols() == 0 || out.min_determinant > 0.0);
  return out;
}

}  // namespace orbitlab
