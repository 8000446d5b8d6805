#include "sirl/cost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sirl/errors.hpp"

namespace sirl {

SaturatedCost::SaturatedCost(Eigen::MatrixXd state_weight, Eigen::VectorXd r_diag, double lambda)
    : q_(std::move(state_weight)), r_(std::move(r_diag)), lambda_(lambda) {
  if (q_.rows() != q_.cols()) throw std::invalid_argument("cost: Q must be square");
  if ((q_ - q_.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) {
    throw std::invalid_argument("cost: Q must be symmetric");
  }
  if (q_.llt().info() != Eigen::Success) throw std::invalid_argument("cost: Q must be positive definite");
  if (r_.size() < 1) throw std::invalid_argument("cost: r_diag must be non-empty");
  for (Eigen::Index i = 0; i < r_.size(); ++i) {
    if (!(r_(i) > 0.0)) throw std::invalid_argument("cost: r_diag entries must be positive");
  }
  if (!(lambda_ > 0.0) || !std::isfinite(lambda_)) throw std::invalid_argument("cost: lambda must be positive");
}

namespace {

// 2 lambda r u atanh(z) + lambda^2 r ln(1 - z^2), z = u / lambda, |z| < 1.
double channel_cost(double u, double r, double lambda) {
  const double z = u / lambda;
  return 2.0 * lambda * u * r * std::atanh(z) + lambda * lambda * r * std::log1p(-z * z);
}

double channel_limit(double r, double lambda) { return 2.0 * lambda * lambda * r * std::numbers::ln2; }

void check_dims(const SaturatedCost& cost, const Eigen::VectorXd& u) {
  if (u.size() != cost.input_dim()) throw std::invalid_argument("input cost: dimension mismatch");
}

// Adaptive Simpson on [a, b] with Richardson correction.
template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace

double input_cost(const SaturatedCost& cost, const Eigen::VectorXd& u) {
  check_dims(cost, u);
  const double lambda = cost.lambda();
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i));
    if (!(a <= lambda)) {
      throw DomainError(static_cast<int>(i), "input cost: |u_" + std::to_string(i) + "| = " + std::to_string(a) +
                                                 " exceeds lambda = " + std::to_string(lambda));
    }
    total += (a == lambda) ? channel_limit(cost.r_diag()(i), lambda) : channel_cost(u(i), cost.r_diag()(i), lambda);
  }
  return total;
}

double input_cost_clamped(const SaturatedCost& cost, const Eigen::VectorXd& u) {
  check_dims(cost, u);
  const double lambda = cost.lambda();
  const double cap = (1.0 - 1e-12) * lambda;
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double ui = std::clamp(u(i), -cap, cap);
    total += channel_cost(ui, cost.r_diag()(i), lambda);
  }
  return total;
}

double input_cost_quadrature(const SaturatedCost& cost, const Eigen::VectorXd& u, double tol) {
  check_dims(cost, u);
  const double lambda = cost.lambda();
  double total = 0.0;
  const double per_channel_tol = tol / static_cast<double>(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(std::abs(u(i)) < lambda)) {
      throw DomainError(static_cast<int>(i), "input cost quadrature: |u_" + std::to_string(i) +
                                                 "| must be strictly below lambda");
    }
    // Integrate in the normalized variable z = s / lambda:
    //   2 int_0^u lambda r atanh(s/lambda) ds = 2 lambda^2 r int_0^{u/lambda} atanh(z) dz.
    const double scale = 2.0 * lambda * lambda * cost.r_diag()(i);
    const double upper = u(i) / lambda;
    auto f = [](double z) { return std::atanh(z); };
    total += scale * adaptive_simpson(f, 0.0, upper, per_channel_tol / scale);
  }
  return total;
}

double running_cost(const SaturatedCost& cost, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  return cost.state_cost(x) + input_cost(cost, u);
}

}  // namespace sirl
