#pragma once

// Reference computations shared by the unit and acceptance tests. The ARE and
// quadrature oracles are independent of the library; the replay helper at the
// end drives the library integrator with frozen weights.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sirl/approximator.hpp"
#include "sirl/basis.hpp"
#include "sirl/cost.hpp"
#include "sirl/dynamics.hpp"
#include "sirl/exploration.hpp"
#include "sirl/learner.hpp"

namespace sirl::reference {

// Stabilizing ARE solution from the stable invariant subspace of the
// Hamiltonian [[A, -B R^-1 B^T], [-Q, -A^T]]: P = X2 X1^-1.
inline Eigen::MatrixXd hamiltonian_are(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                       const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  Eigen::MatrixXd H(2 * n, 2 * n);
  H << A, -B * R.inverse() * B.transpose(), -Q, -A.transpose();
  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(H);
  Eigen::MatrixXcd stable(2 * n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (es.eigenvalues()(i).real() < 0.0) stable.col(k++) = es.eigenvectors().col(i);
  }
  const Eigen::MatrixXcd X1 = stable.topRows(n);
  const Eigen::MatrixXcd X2 = stable.bottomRows(n);
  const Eigen::MatrixXd P = (X2 * X1.inverse()).real();
  return 0.5 * (P + P.transpose());
}

// Composite 5-point Gauss-Legendre rule for int_a^b f.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  static const double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                              0.9061798459386640};
  static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                              0.2369268850561891, 0.2369268850561891};
  const double step = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * step;
    for (int k = 0; k < 5; ++k) total += w[k] * f(mid + 0.5 * step * x[k]);
  }
  return 0.5 * step * total;
}

// U(u) = 2 sum_i int_0^{u_i} lambda r_i atanh(s/lambda) ds by quadrature.
// The substitution s = lambda (1 - (1 - z)^2) removes the log singularity at
// the bound so the rule stays accurate up to |u_i| = 0.999 lambda.
inline double saturated_cost_by_quadrature(const Eigen::VectorXd& u, const Eigen::VectorXd& r, double lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i)) / lambda;
    const double zmax = 1.0 - std::sqrt(1.0 - a);
    const auto integrand = [](double z) {
      const double s = 1.0 - (1.0 - z) * (1.0 - z);
      return std::atanh(s) * 2.0 * (1.0 - z);
    };
    total += 2.0 * lambda * lambda * r(i) * gauss_legendre(integrand, 0.0, zmax, 400);
  }
  return total;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

// Least-squares slope of log(err) against log(h).
inline double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double lx = std::log(h[i]);
    const double ly = std::log(err[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Per-interval Bellman errors E = W^T delta + rho of frozen weights along an
// explored closed loop, with step h and interval T (T/h integral).
struct FrozenReplay {
  std::vector<double> errors;
  std::vector<double> regressor_norms2;  // delta^T delta per interval
};

inline FrozenReplay replay_frozen(const SystemModel& model, const SaturatedCost& cost, const BasisSet& critic,
                                  const BasisSet& actor, const StackedCriticVector& w_hat, const ActorWeights& w_a2,
                                  const ExplorationSignal& signal, const Eigen::VectorXd& x0, double h, double T,
                                  double t_end) {
  const Controller controller = [&](const Eigen::VectorXd& x) {
    return saturate(w_a2.w_a.transpose() * actor.eval(x), cost.lambda());
  };
  const Exploration exploration = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    return signal.evaluate(t, w_a2.w_a.transpose() * actor.eval(x), u);
  };
  const long per = std::lround(T / h);
  const long steps = std::lround(t_end / h);
  AugmentedState aug = AugmentedState::at(x0, actor.size() * cost.input_dim());
  Eigen::VectorXd phi_start = critic.eval(x0);
  double t_start = 0.0;
  FrozenReplay out;
  for (long k = 0; k < steps; ++k) {
    aug = rk4_step(model, aug, controller, exploration, k * h, h, cost, actor).state;
    if ((k + 1) % per == 0) {
      const Eigen::VectorXd phi_end = critic.eval(aug.x);
      const RegressorSample s = build_regressor(phi_start, phi_end, aug.kron_acc, aug.rho_acc, t_start, (k + 1) * h);
      out.errors.push_back(bellman_error(w_hat, s));
      out.regressor_norms2.push_back(s.delta.squaredNorm());
      aug.reset_interval();
      phi_start = phi_end;
      t_start = (k + 1) * h;
    }
  }
  return out;
}

}  // namespace sirl::reference
