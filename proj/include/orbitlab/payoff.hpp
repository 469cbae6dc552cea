#pragma once

#include <Eigen/Core>

#include <vector>

namespace orbitlab {

/// Payoff blocks A^{ij} between group-1 player i (of n) and group-2 player j
/// (of m), each k1 x k2. Blocks are stored row-major in (i, j).
class Payoff {
 public:
  Payoff(int n, int m, int k1, int k2, std::vector<Eigen::MatrixXd> blocks);

  static Payoff scalar(double a);
  static Payoff two_agent(const Eigen::MatrixXd& a);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int k1() const noexcept { return k1_; }
  int k2() const noexcept { return k2_; }
  Eigen::Index x_dim() const noexcept { return Eigen::Index{n_} * k1_; }
  Eigen::Index y_dim() const noexcept { return Eigen::Index{m_} * k2_; }

  const Eigen::MatrixXd& block(int i, int j) const { return blocks_.at(i * m_ + j); }
  const std::vector<Eigen::MatrixXd>& blocks() const noexcept { return blocks_; }
  /// The (n k1) x (m k2) block matrix.
  const Eigen::MatrixXd& assembled() const noexcept { return assembled_; }

 private:
  int n_, m_, k1_, k2_;
  std::vector<Eigen::MatrixXd> blocks_;
  Eigen::MatrixXd assembled_;
};

}  // namespace orbitlab
