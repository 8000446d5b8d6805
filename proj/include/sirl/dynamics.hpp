#pragma once

#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace sirl {

class BasisSet;
class SaturatedCost;

/// Input-affine plant  x' = f(x) + g(x) u.
struct SystemModel {
  int n = 0;  // state dimension
  int m = 0;  // input dimension
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> input_gain;
  std::string name;
};

SystemModel make_linear_model(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

/// Two-state plant with a state-dependent input gain g(x) = [0, cos(2 x1) + 2]^T:
///   f(x) = [-x1 + x2, -0.5 (x1 + x2) + 0.5 x2 (cos(2 x1) + 2)^2]^T
SystemModel make_cos_gain_model();

/// f(x) + g(x)(u + e). Throws DivergenceError on a non-finite result.
Eigen::VectorXd derivative(const SystemModel& model, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& u, const Eigen::VectorXd& e,
                           double t = std::numeric_limits<double>::quiet_NaN());

/// Plant state plus the quadrature states carried across one reinforcement interval.
struct AugmentedState {
  Eigen::VectorXd x;
  double rho_acc = 0.0;      // int (Q(x) + U(u)) over the current interval
  Eigen::VectorXd kron_acc;  // int 2 phi_a(x) (x) (R e) over the current interval
  double total_cost = 0.0;   // int (Q(x) + U(u)) since t = 0, never reset

  static AugmentedState at(const Eigen::VectorXd& x, int kron_dim);
  void reset_interval();
};

using Controller = std::function<Eigen::VectorXd(const Eigen::VectorXd& x)>;

/// Exploration input e(t). It may also depend on the state and on the policy
/// output at the same stage (the saturated probe signal does).
using Exploration =
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u)>;

struct Rk4Result {
  AugmentedState state;
  double peak_applied_input = 0.0;  // max over stages of ||u + e||_inf
  double peak_policy_input = 0.0;   // max over stages of ||u||_inf
  bool out_of_bounds = false;       // ||x||_inf > x_max after the step
};

/// One classical RK4 step of the exploration-injected closed loop together with
/// its running-cost and Kronecker quadratures.
Rk4Result rk4_step(const SystemModel& model, const AugmentedState& aug, const Controller& controller,
                   const Exploration& exploration, double t, double h, const SaturatedCost& cost,
                   const BasisSet& actor_basis,
                   double x_max = std::numeric_limits<double>::infinity());

}  // namespace sirl
