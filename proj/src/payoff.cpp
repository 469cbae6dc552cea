#include "orbitlab/payoff.hpp"

#include "orbitlab/errors.hpp"

namespace orbitlab {

Payoff::Payoff(int n, int m, int k1, int k2, std::vector<Eigen::MatrixXd> blocks)
    : n_(n), m_(m), k1_(k1), k2_(k2), blocks_(std::move(blocks)) {
  if (n <= 0 || m <= 0 || k1 <= 0 || k2 <= 0)
    throw DomainError("payoff dimensions must be positive");
  if (blocks_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(m))
    throw DomainError("payoff needs n*m blocks");
  assembled_.resize(x_dim(), y_dim());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const Eigen::MatrixXd& b = blocks_[static_cast<std::size_t>(i * m + j)];
      if (b.rows() != k1 || b.cols() != k2)
        throw DomainError("payoff block (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not k1 x k2");
      if (!b.allFinite()) throw DomainError("payoff block has non-finite entries");
      assembled_.block(Eigen::Index{i} * k1, Eigen::Index{j} * k2, k1, k2) = b;
    }
  }
}

Payoff Payoff::scalar(double a) {
  Eigen::MatrixXd b(1, 1);
  b(0, 0) = a;
  return Payoff(1, 1, 1, 1, {b});
}

Payoff Payoff::two_agent(const Eigen::MatrixXd& a) {
  return Payoff(1, 1, static_cast<int>(a.rows()), static_cast<int>(a.cols()), {a});
}

}  // namespace orbitlab
