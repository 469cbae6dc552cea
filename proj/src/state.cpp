#include "orbitlab/state.hpp"

#include "orbitlab/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace orbitlab {

std::string_view to_string(Chart chart) {
  switch (chart) {
    case Chart::euclidean: return "euclidean";
    case Chart::simplex_product: return "simplex-product";
    case Chart::sphere: return "sphere";
    case Chart::bipartite_pair: return "bipartite-pair";
  }
  return "unknown";
}

Chart chart_from_string(std::string_view name) {
  if (name == "euclidean") return Chart::euclidean;
  if (name == "simplex-product") return Chart::simplex_product;
  if (name == "sphere") return Chart::sphere;
  if (name == "bipartite-pair") return Chart::bipartite_pair;
  throw DomainError("unknown chart '" + std::string(name) + "'");
}

State::State(Eigen::VectorXd coords, Chart chart, std::vector<Eigen::Index> blocks)
    : coords_(std::move(coords)), chart_(chart), blocks_(std::move(blocks)) {}

State State::scalar(double x) {
  Eigen::VectorXd v(1);
  v[0] = x;
  return State(std::move(v));
}

State State::simplex(Eigen::VectorXd coords, std::vector<Eigen::Index> blocks) {
  State s(std::move(coords), Chart::simplex_product, std::move(blocks));
  s.validate();
  return s;
}

State State::sphere(Eigen::VectorXd coords) {
  State s(std::move(coords), Chart::sphere);
  s.validate();
  return s;
}

State State::bipartite(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd v(x.size() + y.size());
  v << x, y;
  return State(std::move(v), Chart::bipartite_pair, {x.size(), y.size()});
}

State State::with_coords(Eigen::VectorXd coords) const {
  return State(std::move(coords), chart_, blocks_);
}

void State::validate() const {
  if (!coords_.allFinite()) throw DomainError("state has non-finite coordinates");
  switch (chart_) {
    case Chart::euclidean:
      return;
    case Chart::sphere: {
      const double n = coords_.norm();
      if (std::abs(n - 1.0) > kSphereNormTolerance)
        throw DomainError("sphere state has norm " + std::to_string(n));
      return;
    }
    case Chart::bipartite_pair:
      if (blocks_.size() != 2 || blocks_[0] < 0 || blocks_[1] < 0 ||
          blocks_[0] + blocks_[1] != coords_.size())
        throw DomainError("bipartite-pair state needs two blocks covering all coordinates");
      return;
    case Chart::simplex_product: {
      const Eigen::Index total =
          std::accumulate(blocks_.begin(), blocks_.end(), Eigen::Index{0});
      if (blocks_.empty() || total != coords_.size())
        throw DomainError("simplex blocks do not cover the coordinates");
      Eigen::Index off = 0;
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        if (blocks_[b] <= 0) throw DomainError("empty simplex block");
        const auto seg = coords_.segment(off, blocks_[b]);
        for (Eigen::Index j = 0; j < seg.size(); ++j) {
          if (seg[j] < -kSimplexNegativeTolerance)
            throw DomainError("simplex coordinate " + std::to_string(off + j) +
                              " is negative");
        }
        if (std::abs(seg.sum() - 1.0) > kSimplexSumTolerance)
          throw DomainError("simplex block " + std::to_string(b) +
                            " does not sum to 1");
        off += blocks_[b];
      }
      return;
    }
  }
}

bool State::is_valid() const noexcept {
  try {
    validate();
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

Eigen::VectorXd State::x_block() const {
  if (chart_ != Chart::bipartite_pair) throw DomainError("x_block on non-bipartite state");
  return coords_.head(blocks_.at(0));
}

Eigen::VectorXd State::y_block() const {
  if (chart_ != Chart::bipartite_pair) throw DomainError("y_block on non-bipartite state");
  return coords_.tail(blocks_.at(1));
}

bool same_layout(const State& a, const State& b) noexcept {
  return a.chart() == b.chart() && a.dim() == b.dim() && a.blocks() == b.blocks();
}

double distance(const State& a, const State& b) {
  if (a.dim() != b.dim()) throw DomainError("distance between states of different dimension");
  return (a.coords() - b.coords()).norm();
}

double renormalize_simplex(Eigen::VectorXd& coords,
                           const std::vector<Eigen::Index>& blocks) {
  double defect = 0.0;
  Eigen::Index off = 0;
  for (const Eigen::Index size : blocks) {
    auto seg = coords.segment(off, size);
    for (Eigen::Index j = 0; j < size; ++j)
      if (seg[j] < 0.0 && seg[j] >= -kSimplexNegativeTolerance) seg[j] = 0.0;
    const double sum = seg.sum();
    defect = std::max(defect, std::abs(sum - 1.0));
    seg /= sum;
    off += size;
  }
  return defect;
}

}  // namespace orbitlab
