#include "sirl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sirl/approximator.hpp"
#include "sirl/basis.hpp"
#include "sirl/cost.hpp"
#include "sirl/errors.hpp"

namespace sirl {

SystemModel make_linear_model(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || B.cols() < 1) {
    throw std::invalid_argument("linear model: A must be n x n and B n x m");
  }
  SystemModel model;
  model.n = static_cast<int>(A.rows());
  model.m = static_cast<int>(B.cols());
  model.drift = [A](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x; };
  model.input_gain = [B](const Eigen::VectorXd&) -> Eigen::MatrixXd { return B; };
  model.name = "linear";
  return model;
}

SystemModel make_cos_gain_model() {
  SystemModel model;
  model.n = 2;
  model.m = 1;
  model.drift = [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double c = std::cos(2.0 * x(0)) + 2.0;
    Eigen::VectorXd f(2);
    f(0) = -x(0) + x(1);
    f(1) = -0.5 * (x(0) + x(1)) + 0.5 * x(1) * c * c;
    return f;
  };
  model.input_gain = [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd g(2, 1);
    g(0, 0) = 0.0;
    g(1, 0) = std::cos(2.0 * x(0)) + 2.0;
    return g;
  };
  model.name = "cos_gain";
  return model;
}

Eigen::VectorXd derivative(const SystemModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& e, double t) {
  Eigen::VectorXd dx = model.drift(x) + model.input_gain(x) * (u + e);
  if (!dx.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite state derivative at t=" << t << ", x=[" << x.transpose() << "]";
    throw DivergenceError(msg.str(), t, x);
  }
  return dx;
}

AugmentedState AugmentedState::at(const Eigen::VectorXd& x, int kron_dim) {
  AugmentedState s;
  s.x = x;
  s.kron_acc = Eigen::VectorXd::Zero(kron_dim);
  return s;
}

void AugmentedState::reset_interval() {
  rho_acc = 0.0;
  kron_acc.setZero();
}

namespace {

struct StageRate {
  Eigen::VectorXd dx;
  double drho = 0.0;
  Eigen::VectorXd dkron;
};

}  // namespace

Rk4Result rk4_step(const SystemModel& model, const AugmentedState& aug, const Controller& controller,
                   const Exploration& exploration, double t, double h, const SaturatedCost& cost,
                   const BasisSet& actor_basis, double x_max) {
  Rk4Result out;
  const Eigen::VectorXd& r = cost.r_diag();

  auto rate = [&](double ts, const Eigen::VectorXd& x) {
    const Eigen::VectorXd u = controller(x);
    const Eigen::VectorXd e = exploration(ts, x, u);
    out.peak_applied_input = std::max(out.peak_applied_input, (u + e).lpNorm<Eigen::Infinity>());
    out.peak_policy_input = std::max(out.peak_policy_input, u.lpNorm<Eigen::Infinity>());
    StageRate k;
    k.dx = derivative(model, x, u, e, ts);
    k.drho = cost.state_cost(x) + input_cost_clamped(cost, u);
    const Eigen::VectorXd re = r.cwiseProduct(e);
    k.dkron = 2.0 * kron(actor_basis.eval(x), re);
    return k;
  };

  const StageRate k1 = rate(t, aug.x);
  const StageRate k2 = rate(t + 0.5 * h, aug.x + 0.5 * h * k1.dx);
  const StageRate k3 = rate(t + 0.5 * h, aug.x + 0.5 * h * k2.dx);
  const StageRate k4 = rate(t + h, aug.x + h * k3.dx);

  const double w = h / 6.0;
  out.state.x = aug.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  const double drho = w * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho);
  out.state.rho_acc = aug.rho_acc + drho;
  out.state.total_cost = aug.total_cost + drho;
  out.state.kron_acc = aug.kron_acc + w * (k1.dkron + 2.0 * k2.dkron + 2.0 * k3.dkron + k4.dkron);

  if (!out.state.x.allFinite()) {
    throw DivergenceError("non-finite state after RK4 step", t + h, out.state.x);
  }
  out.out_of_bounds = out.state.x.lpNorm<Eigen::Infinity>() > x_max;
  return out;
}

}  // namespace sirl
