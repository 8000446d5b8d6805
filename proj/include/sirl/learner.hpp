#pragma once

#include <cstddef>
#include <deque>
#include <span>

#include <Eigen/Dense>

#include "sirl/approximator.hpp"

namespace sirl {

class BasisSet;
class SaturatedCost;

/// Data from one reinforcement interval [t_start, t_end].
struct RegressorSample {
  Eigen::VectorXd delta;  // [phi_c(x(t_end)) - phi_c(x(t_start)); int 2 phi_a (x) (R e)]
  double rho = 0.0;       // int (Q + U(u)) over the interval
  double t_start = 0.0;
  double t_end = 0.0;
};

enum class Normalization { Single, Double };
enum class UpdateCadence { PerStep, PerInterval };
/// How one critic step of length dt is taken. Exponential integrates the critic law
/// exactly with the sample held fixed, which stays stable for any dt * alpha1.
enum class CriticStep { Euler, Exponential };

struct LearnerConfig {
  double alpha1 = 0.0;  // critic learning rate
  double alpha2 = 0.0;  // actor learning rate
  Eigen::MatrixXd Y;    // actor leakage gain, SPD, size N_a*m
  double T = 0.0;       // reinforcement interval [s]
  Normalization normalization = Normalization::Single;
  UpdateCadence cadence = UpdateCadence::PerStep;
  CriticStep critic_step = CriticStep::Euler;

  /// Throws ConfigError naming the offending field.
  void validate(int actor_flat_size) const;
};

RegressorSample build_regressor(const Eigen::VectorXd& phi_c_start, const Eigen::VectorXd& phi_c_end,
                                const Eigen::VectorXd& kron_acc, double rho_acc, double t0, double t1);

/// E = W^T delta + rho.
double bellman_error(const StackedCriticVector& w_hat, const RegressorSample& s);

/// delta / (1 + delta^T delta)^k with k = 1 (Single) or 2 (Double).
Eigen::VectorXd normalized_regressor(const Eigen::VectorXd& delta, Normalization mode);

/// Explicit Euler step of  W' = -alpha1 delta / (1 + delta^T delta) E.
StackedCriticVector critic_update(const StackedCriticVector& w_hat, const RegressorSample& s,
                                  const LearnerConfig& cfg, double dt);

/// Closed-form solution of the critic law over dt with s held fixed: the residual
/// E decays as exp(-dt * alpha1 * delta^T delta / (1 + delta^T delta)^k) and W moves
/// only along delta.
StackedCriticVector critic_update_exponential(const StackedCriticVector& w_hat, const RegressorSample& s,
                                              const LearnerConfig& cfg, double dt);

/// Euler gain dt * alpha1 * delta^T delta / (1 + delta^T delta)^k of a critic step.
double critic_step_gain(const RegressorSample& s, const LearnerConfig& cfg, double dt);

/// E_u = lambda R (tanh(w_a2^T phi_a / lambda) - tanh(w_a1^T phi_a / lambda)).
Eigen::VectorXd actor_error(const ActorWeights& aw1, const ActorWeights& aw2, const BasisSet& actor_basis,
                            const SaturatedCost& cost, const Eigen::VectorXd& x);

/// The bracket of the actor law,
///   Y col{w_a2} + ((E_u .* (1 - tanh^2(w_a2^T phi_a / lambda))) (x) phi_a),
/// flattened with the same convention as flatten().
Eigen::VectorXd actor_gradient(const ActorWeights& aw2, const Eigen::VectorXd& e_u, const BasisSet& actor_basis,
                               const SaturatedCost& cost, const Eigen::VectorXd& x, const LearnerConfig& cfg);

/// Explicit Euler step of  col{w_a2}' = -alpha2 * actor_gradient(...).
ActorWeights actor_update(const ActorWeights& aw2, const Eigen::VectorXd& e_u, const BasisSet& actor_basis,
                          const SaturatedCost& cost, const Eigen::VectorXd& x, const LearnerConfig& cfg,
                          double dt);

struct PeEstimate {
  Eigen::MatrixXd gram;     // sum of dbar dbar^T over the window
  double min_eigenvalue = 0.0;
  bool partial = false;     // fewer samples than requested
};

/// Excitation monitor over the last `window` samples, dbar = delta / (1 + delta^T delta).
PeEstimate pe_gram(std::span<const RegressorSample> samples, std::size_t window);

/// Sliding-window version of pe_gram for use inside a run.
class PeMonitor {
 public:
  explicit PeMonitor(std::size_t window) : window_(window) {}
  void push(const RegressorSample& s);
  PeEstimate estimate() const;
  std::size_t size() const { return buffer_.size(); }

 private:
  std::size_t window_;
  std::deque<Eigen::VectorXd> buffer_;  // normalized regressors
};

}  // namespace sirl
