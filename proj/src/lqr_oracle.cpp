#include "sirl/lqr_oracle.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "sirl/basis.hpp"
#include "sirl/cost.hpp"
#include "sirl/dynamics.hpp"
#include "sirl/errors.hpp"

namespace sirl {

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& M) {
  const Eigen::Index n = A.rows();
  // Column-major vec: vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P).
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd At = A.transpose();
  Eigen::MatrixXd L(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      L.block(i * n, j * n, n, n) = I(i, j) * At + At(i, j) * I;
    }
  }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(M.data(), n * n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  if (!lu.isInvertible()) throw NumericError("Lyapunov equation is singular (A has eigenvalues summing to zero)");
  const Eigen::VectorXd p = lu.solve(rhs);
  Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(p.data(), n, n);
  return 0.5 * (P + P.transpose());
}

Eigen::MatrixXd are_residual(const LinearPlant& p, const Eigen::MatrixXd& P) {
  return p.A.transpose() * P + P * p.A - P * p.B * p.R.ldlt().solve(p.B.transpose() * P) + p.Q;
}

bool is_hurwitz(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return (es.eigenvalues().real().array() < 0.0).all();
}

std::optional<Eigen::MatrixXd> find_stabilizing_gain(const LinearPlant& p) {
  for (int c = 0; c <= 64; ++c) {
    const Eigen::MatrixXd K = static_cast<double>(c) * p.B.transpose();
    if (is_hurwitz(p.A - p.B * K)) return K;
  }
  return std::nullopt;
}

namespace {

void check_plant(const LinearPlant& p) {
  const Eigen::Index n = p.A.rows();
  if (p.A.cols() != n || p.B.rows() != n || p.Q.rows() != n || p.Q.cols() != n || p.R.rows() != p.B.cols() ||
      p.R.cols() != p.B.cols()) {
    throw ConfigError("plant", "inconsistent A, B, Q, R dimensions");
  }
  if ((p.Q - p.Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) throw ConfigError("plant.Q", "must be symmetric");
  if ((p.R - p.R.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) throw ConfigError("plant.R", "must be symmetric");
  if (p.R.llt().info() != Eigen::Success) throw ConfigError("plant.R", "must be positive definite");
}

}  // namespace

AreSolution solve_are(const LinearPlant& p, double tol, int max_iter, const std::optional<Eigen::MatrixXd>& initial_gain) {
  check_plant(p);
  Eigen::MatrixXd K;
  if (initial_gain) {
    K = *initial_gain;
  } else {
    auto found = find_stabilizing_gain(p);
    if (!found) throw NumericError("no stabilizing initial gain found; (A, B) may not be stabilizable");
    K = *found;
  }
  if (!is_hurwitz(p.A - p.B * K)) throw NumericError("initial gain does not stabilize A - B K");

  const auto R_llt = p.R.llt();
  AreSolution sol;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd Acl = p.A - p.B * K;
    const Eigen::MatrixXd P = solve_lyapunov(Acl, p.Q + K.transpose() * p.R * K);
    sol.trace_history.push_back(P.trace());
    K = R_llt.solve(p.B.transpose() * P);
    sol.P = P;
    sol.K = K;
    sol.iterations = it;
    sol.residual = are_residual(p, P).lpNorm<Eigen::Infinity>();
    if (sol.residual <= tol) return sol;
  }
  std::ostringstream msg;
  msg << "Kleinman iteration did not converge in " << max_iter << " iterations (residual " << sol.residual << ")";
  throw NumericError(msg.str());
}

namespace {

int first_nonzero(const Exponents& e, int from) {
  for (int j = from; j < static_cast<int>(e.size()); ++j) {
    if (e[j] != 0) return j;
  }
  return -1;
}

}  // namespace

Eigen::VectorXd lqr_reference_weights(const LinearPlant& p, const Eigen::MatrixXd& P, const BasisSet& critic_basis,
                                      const BasisSet& actor_basis) {
  const int n = static_cast<int>(p.A.rows());
  const int m = static_cast<int>(p.B.cols());
  if (critic_basis.input_dim() != n || actor_basis.input_dim() != n) {
    throw ConfigError("basis", "input dimension differs from the plant");
  }
  std::vector<std::string> unmatched;
  Eigen::VectorXd w_c(critic_basis.size());
  for (int i = 0; i < critic_basis.size(); ++i) {
    const auto& e = critic_basis.terms()[i];
    if (critic_basis.degree(i) != 2) {
      unmatched.push_back("critic " + critic_basis.describe(i));
      continue;
    }
    const int a = first_nonzero(e, 0);
    const int b = e[a] == 2 ? a : first_nonzero(e, a + 1);
    w_c(i) = a == b ? P(a, a) : 2.0 * P(a, b);
  }
  if (critic_basis.size() != n * (n + 1) / 2) unmatched.push_back("critic basis must hold all n(n+1)/2 quadratics");

  // v(x) = -R^-1 B^T P x, so the actor weight on x_k for channel j is -(R^-1 B^T P)(j, k).
  const Eigen::MatrixXd gain = p.R.llt().solve(p.B.transpose() * P);
  Eigen::MatrixXd w_a(actor_basis.size(), m);
  for (int i = 0; i < actor_basis.size(); ++i) {
    if (actor_basis.degree(i) != 1) {
      unmatched.push_back("actor " + actor_basis.describe(i));
      continue;
    }
    const int k = first_nonzero(actor_basis.terms()[i], 0);
    w_a.row(i) = -gain.col(k).transpose();
  }
  if (actor_basis.size() != n) unmatched.push_back("actor basis must hold all n linear monomials");

  if (!unmatched.empty()) {
    std::string msg = "basis does not match the quadratic/linear LQR structure:";
    for (const auto& u : unmatched) msg += " [" + u + "]";
    throw ConfigError("basis", msg);
  }
  return StackedCriticVector(CriticWeights{w_c}, ActorWeights{w_a}).vector();
}

Eigen::MatrixXd quadratic_form_from_weights(const Eigen::VectorXd& w_c, const BasisSet& critic_basis) {
  const int n = critic_basis.input_dim();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < critic_basis.size(); ++i) {
    if (critic_basis.degree(i) != 2) throw ConfigError("basis.critic", "non-quadratic term " + critic_basis.describe(i));
    const auto& e = critic_basis.terms()[i];
    const int a = first_nonzero(e, 0);
    const int b = e[a] == 2 ? a : first_nonzero(e, a + 1);
    if (a == b) {
      P(a, a) = w_c(i);
    } else {
      P(a, b) = P(b, a) = 0.5 * w_c(i);
    }
  }
  return P;
}

HjbResidualStats verify_hjb_residual(const CriticWeights& critic, const ActorWeights& actor, const SystemModel& model,
                                     const BasisSet& critic_basis, const BasisSet& actor_basis,
                                     const SaturatedCost& cost, const std::vector<Eigen::VectorXd>& states) {
  HjbResidualStats stats;
  double sum_abs = 0.0;
  double sum_sq = 0.0;
  for (const auto& x : states) {
    const Eigen::VectorXd u = policy_estimate(actor, actor_basis, cost, x);
    const Eigen::VectorXd grad_v = critic_basis.jacobian(x).transpose() * critic.w_c;
    const Eigen::VectorXd xdot = model.drift(x) + model.input_gain(x) * u;
    const double r = cost.state_cost(x) + input_cost_clamped(cost, u) + grad_v.dot(xdot);
    stats.values.push_back(r);
    stats.max_abs = std::max(stats.max_abs, std::abs(r));
    sum_abs += std::abs(r);
    sum_sq += r * r;
  }
  if (!states.empty()) {
    stats.mean_abs = sum_abs / static_cast<double>(states.size());
    stats.rms = std::sqrt(sum_sq / static_cast<double>(states.size()));
  }
  return stats;
}

}  // namespace sirl
