#include "sirl/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "sirl/basis.hpp"
#include "sirl/cost.hpp"
#include "sirl/errors.hpp"

namespace sirl {

void LearnerConfig::validate(int actor_flat_size) const {
  if (!(alpha1 > 0.0) || !std::isfinite(alpha1)) throw ConfigError("learner.alpha1", "must be positive");
  if (!(alpha2 > 0.0) || !std::isfinite(alpha2)) throw ConfigError("learner.alpha2", "must be positive");
  if (!(T > 0.0)) throw ConfigError("time.T", "must be positive");
  if (Y.rows() != actor_flat_size || Y.cols() != actor_flat_size) {
    throw ConfigError("learner.Y", "must be " + std::to_string(actor_flat_size) + " x " +
                                       std::to_string(actor_flat_size));
  }
  if ((Y - Y.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) throw ConfigError("learner.Y", "must be symmetric");
  if (Y.llt().info() != Eigen::Success) throw ConfigError("learner.Y", "must be positive definite");
}

RegressorSample build_regressor(const Eigen::VectorXd& phi_c_start, const Eigen::VectorXd& phi_c_end,
                                const Eigen::VectorXd& kron_acc, double rho_acc, double t0, double t1) {
  if (phi_c_start.size() != phi_c_end.size()) {
    throw ConfigError("basis.critic", "critic feature vectors differ in length");
  }
  RegressorSample s;
  s.delta.resize(phi_c_end.size() + kron_acc.size());
  s.delta.head(phi_c_end.size()) = phi_c_end - phi_c_start;
  s.delta.tail(kron_acc.size()) = kron_acc;
  s.rho = rho_acc;
  s.t_start = t0;
  s.t_end = t1;
  return s;
}

double bellman_error(const StackedCriticVector& w_hat, const RegressorSample& s) {
  if (w_hat.size() != s.delta.size()) throw std::invalid_argument("bellman error: dimension mismatch");
  return w_hat.vector().dot(s.delta) + s.rho;
}

Eigen::VectorXd normalized_regressor(const Eigen::VectorXd& delta, Normalization mode) {
  const double ms = 1.0 + delta.squaredNorm();
  return mode == Normalization::Single ? Eigen::VectorXd(delta / ms) : Eigen::VectorXd(delta / (ms * ms));
}

StackedCriticVector critic_update(const StackedCriticVector& w_hat, const RegressorSample& s,
                                  const LearnerConfig& cfg, double dt) {
  const double e = bellman_error(w_hat, s);
  StackedCriticVector next = w_hat;
  next.vector() -= dt * cfg.alpha1 * e * normalized_regressor(s.delta, cfg.normalization);
  return next;
}

double critic_step_gain(const RegressorSample& s, const LearnerConfig& cfg, double dt) {
  const double dtd = s.delta.squaredNorm();
  const double ms = 1.0 + dtd;
  return dt * cfg.alpha1 * dtd / (cfg.normalization == Normalization::Single ? ms : ms * ms);
}

StackedCriticVector critic_update_exponential(const StackedCriticVector& w_hat, const RegressorSample& s,
                                              const LearnerConfig& cfg, double dt) {
  const double dtd = s.delta.squaredNorm();
  if (dtd == 0.0) return w_hat;
  const double e = bellman_error(w_hat, s);
  // -expm1(-g) = 1 - exp(-g), accurate for small g where it reduces to the Euler step.
  const double shrink = -std::expm1(-critic_step_gain(s, cfg, dt));
  StackedCriticVector next = w_hat;
  next.vector() -= (shrink * e / dtd) * s.delta;
  return next;
}

namespace {

Eigen::VectorXd tanh_of(const Eigen::VectorXd& v) { return v.array().tanh().matrix(); }

}  // namespace

Eigen::VectorXd actor_error(const ActorWeights& aw1, const ActorWeights& aw2, const BasisSet& actor_basis,
                            const SaturatedCost& cost, const Eigen::VectorXd& x) {
  const Eigen::VectorXd phi = actor_basis.eval(x);
  const double lambda = cost.lambda();
  const Eigen::VectorXd t2 = tanh_of(aw2.w_a.transpose() * phi / lambda);
  const Eigen::VectorXd t1 = tanh_of(aw1.w_a.transpose() * phi / lambda);
  return lambda * cost.r_diag().cwiseProduct(t2 - t1);
}

Eigen::VectorXd actor_gradient(const ActorWeights& aw2, const Eigen::VectorXd& e_u, const BasisSet& actor_basis,
                               const SaturatedCost& cost, const Eigen::VectorXd& x, const LearnerConfig& cfg) {
  const Eigen::VectorXd phi = actor_basis.eval(x);
  const Eigen::VectorXd t2 = tanh_of(aw2.w_a.transpose() * phi / cost.lambda());
  // E_u (x) phi - (E_u .* tanh^2) (x) phi, grouped per channel.
  const Eigen::VectorXd channel = e_u.cwiseProduct((1.0 - t2.array().square()).matrix());
  const Eigen::MatrixXd outer = phi * channel.transpose();  // N_a x m, entry (i, j) = phi_i * channel_j
  return cfg.Y * flatten(aw2.w_a) + flatten(outer);
}

ActorWeights actor_update(const ActorWeights& aw2, const Eigen::VectorXd& e_u, const BasisSet& actor_basis,
                          const SaturatedCost& cost, const Eigen::VectorXd& x, const LearnerConfig& cfg,
                          double dt) {
  const Eigen::VectorXd flat =
      flatten(aw2.w_a) - dt * cfg.alpha2 * actor_gradient(aw2, e_u, actor_basis, cost, x, cfg);
  return {unflatten(flat, aw2.rows(), aw2.cols())};
}

namespace {

PeEstimate gram_of(const std::deque<Eigen::VectorXd>& dbars, Eigen::Index dim, std::size_t window) {
  PeEstimate est;
  est.gram = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& d : dbars) est.gram.noalias() += d * d.transpose();
  est.partial = dbars.size() < window;
  if (dim > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(est.gram, Eigen::EigenvaluesOnly);
    est.min_eigenvalue = es.eigenvalues()(0);
  }
  return est;
}

}  // namespace

PeEstimate pe_gram(std::span<const RegressorSample> samples, std::size_t window) {
  std::deque<Eigen::VectorXd> dbars;
  const std::size_t first = samples.size() > window ? samples.size() - window : 0;
  Eigen::Index dim = samples.empty() ? 0 : samples.front().delta.size();
  for (std::size_t i = first; i < samples.size(); ++i) {
    dbars.push_back(normalized_regressor(samples[i].delta, Normalization::Single));
  }
  return gram_of(dbars, dim, window);
}

void PeMonitor::push(const RegressorSample& s) {
  buffer_.push_back(normalized_regressor(s.delta, Normalization::Single));
  while (buffer_.size() > window_) buffer_.pop_front();
}

PeEstimate PeMonitor::estimate() const {
  const Eigen::Index dim = buffer_.empty() ? 0 : buffer_.front().size();
  return gram_of(buffer_, dim, window_);
}

}  // namespace sirl
