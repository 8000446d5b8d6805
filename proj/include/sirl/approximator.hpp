#pragma once

#include <Eigen/Dense>

namespace sirl {

class BasisSet;
class SaturatedCost;

/// Critic weights: V(x) ~= w_c^T phi_c(x).
struct CriticWeights {
  Eigen::VectorXd w_c;
};

/// Actor weights, one column per input channel: v(x) ~= w_a^T phi_a(x).
struct ActorWeights {
  Eigen::MatrixXd w_a;  // N_a x m

  int rows() const { return static_cast<int>(w_a.rows()); }
  int cols() const { return static_cast<int>(w_a.cols()); }
};

// Flattening of an N_a x m actor matrix. Row-major, so that
//   flatten(W)^T kron(phi, r) == phi^T W r
// with the standard Kronecker product (index i*m + j <-> W(i, j)).
Eigen::VectorXd flatten(const Eigen::MatrixXd& w);
Eigen::MatrixXd unflatten(const Eigen::VectorXd& flat, int rows, int cols);

/// Standard Kronecker product of two column vectors.
Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Stacked critic-side vector [w_c; flatten(w_a1)].
class StackedCriticVector {
 public:
  StackedCriticVector() = default;
  StackedCriticVector(int critic_size, int actor_rows, int actor_cols);
  StackedCriticVector(const CriticWeights& critic, const ActorWeights& actor);
  StackedCriticVector(Eigen::VectorXd stacked, int critic_size, int actor_rows, int actor_cols);

  const Eigen::VectorXd& vector() const { return w_; }
  Eigen::VectorXd& vector() { return w_; }
  int size() const { return static_cast<int>(w_.size()); }
  int critic_size() const { return n_c_; }

  CriticWeights critic() const;
  ActorWeights actor() const;

 private:
  Eigen::VectorXd w_;
  int n_c_ = 0;
  int n_a_ = 0;
  int m_ = 0;
};

double value_estimate(const CriticWeights& cw, const BasisSet& critic_basis, const Eigen::VectorXd& x);

/// lambda tanh(w_a^T phi_a(x) / lambda). Strictly inside the bound for finite weights.
Eigen::VectorXd policy_estimate(const ActorWeights& aw, const BasisSet& actor_basis,
                                const SaturatedCost& cost, const Eigen::VectorXd& x);
Eigen::VectorXd saturate(const Eigen::VectorXd& preactivation, double lambda);

Eigen::VectorXd v1_estimate(const ActorWeights& aw, const BasisSet& actor_basis, const Eigen::VectorXd& x);

}  // namespace sirl
