#pragma once

#include <Eigen/Dense>

namespace sirl {

/// Q(x) = x^T Q x, diagonal R and the input bound lambda used by the
/// non-quadratic input penalty
///   U(u) = 2 sum_i int_0^{u_i} lambda r_i atanh(s / lambda) ds.
class SaturatedCost {
 public:
  SaturatedCost(Eigen::MatrixXd state_weight, Eigen::VectorXd r_diag, double lambda);

  double state_cost(const Eigen::VectorXd& x) const { return x.dot(q_ * x); }
  const Eigen::MatrixXd& state_weight() const { return q_; }
  const Eigen::VectorXd& r_diag() const { return r_; }
  double lambda() const { return lambda_; }
  int input_dim() const { return static_cast<int>(r_.size()); }

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd r_;
  double lambda_;
};

/// Closed form  2 lambda u^T R atanh(u/lambda) + lambda^2 Rbar ln(1 - (u/lambda)^2).
/// |u_i| == lambda yields the limit 2 lambda^2 r_i ln 2. Throws DomainError for
/// |u_i| > lambda.
double input_cost(const SaturatedCost& cost, const Eigen::VectorXd& u);

/// Same closed form, with |u_i / lambda| clamped to 1 - 1e-12. Used inside the
/// integrator where stage inputs may graze the bound through rounding.
double input_cost_clamped(const SaturatedCost& cost, const Eigen::VectorXd& u);

/// Adaptive Simpson quadrature of the defining integral, per component, to
/// absolute tolerance `tol` on the total. Requires |u_i| < lambda.
double input_cost_quadrature(const SaturatedCost& cost, const Eigen::VectorXd& u, double tol);

/// Q(x) + U(u).
double running_cost(const SaturatedCost& cost, const Eigen::VectorXd& x, const Eigen::VectorXd& u);

}  // namespace sirl
