#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sirl/approximator.hpp"

namespace sirl {

class BasisSet;
class SaturatedCost;
struct SystemModel;

/// x' = A x + B u with cost x^T Q x + u^T R u.
struct LinearPlant {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
};

struct AreSolution {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;                 // R^-1 B^T P, u = -K x
  int iterations = 0;
  double residual = 0.0;             // ||A^T P + P A - P B R^-1 B^T P + Q||_inf
  std::vector<double> trace_history; // trace(P_k) per Kleinman iterate
};

/// Solves A^T P + P A + M = 0 through the vectorized Kronecker system.
/// Throws NumericError when the system is singular.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M);

Eigen::MatrixXd are_residual(const LinearPlant& p, const Eigen::MatrixXd& P);

bool is_hurwitz(const Eigen::MatrixXd& A);

/// First K = c B^T, c in {0, 1, ..., 64}, with A - B K Hurwitz.
std::optional<Eigen::MatrixXd> find_stabilizing_gain(const LinearPlant& p);

/// Kleinman-Newton iteration from a stabilizing gain (searched when not supplied).
/// Throws NumericError if no stabilizing gain exists or the iteration does not
/// reach `tol` within `max_iter` steps.
AreSolution solve_are(const LinearPlant& p, double tol = 1e-12, int max_iter = 100,
                      const std::optional<Eigen::MatrixXd>& initial_gain = std::nullopt);

/// Stacked [w_c; col{w_a}] reproducing x^T P x and v(x) = -R^-1 B^T P x in the
/// given bases. The critic basis must hold exactly the quadratic monomials and
/// the actor basis exactly the linear ones; throws ConfigError otherwise.
Eigen::VectorXd lqr_reference_weights(const LinearPlant& p, const Eigen::MatrixXd& P,
                                      const BasisSet& critic_basis, const BasisSet& actor_basis);

/// Inverse of the critic half of lqr_reference_weights.
Eigen::MatrixXd quadratic_form_from_weights(const Eigen::VectorXd& w_c, const BasisSet& critic_basis);

struct HjbResidualStats {
  std::vector<double> values;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  double rms = 0.0;
};

/// Pointwise Q(x) + U(u(x)) + (grad phi_c^T w_c)^T (f(x) + g(x) u(x)) with
/// u = lambda tanh(w_a2^T phi_a / lambda). Diagnostic only; needs the model.
HjbResidualStats verify_hjb_residual(const CriticWeights& critic, const ActorWeights& actor,
                                     const SystemModel& model, const BasisSet& critic_basis,
                                     const BasisSet& actor_basis, const SaturatedCost& cost,
                                     const std::vector<Eigen::VectorXd>& states);

}  // namespace sirl
