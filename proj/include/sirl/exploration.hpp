#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace sirl {

enum class ExplorationKind { None, SumOfSines, SaturatedProbe };

/// Uniform double in [lo, hi) from the top 53 bits of a 64-bit Mersenne
/// Twister draw. Unlike std::uniform_real_distribution the result does not
/// depend on the standard library implementation.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// Bounded exploration input injected next to the policy.
///
/// Sum of sines: e_j(t) = scale * sum_k sin(omega_jk t).
/// Saturated probe: the applied input becomes
///   u + e = lambda tanh((scale * sum_k sin(omega_jk t) + w_a2^T phi_a) / lambda),
/// so e depends on the live actor preactivation and the policy output.
/// Both vanish for t >= t_off.
class ExplorationSignal {
 public:
  ExplorationSignal() = default;

  ExplorationKind kind() const { return kind_; }
  int channels() const { return static_cast<int>(omega_.rows()); }
  const Eigen::MatrixXd& frequencies() const { return omega_; }  // m x count, rad/s
  double scale() const { return scale_; }
  double t_off() const { return t_off_; }
  double lambda() const { return lambda_; }

  /// scale * sum_k sin(omega_k t), zero at and after t_off.
  Eigen::VectorXd probe(double t) const;

  /// Exploration e(t) given the actor preactivation w_a2^T phi_a(x) and the
  /// policy output u at the same instant.
  Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& preactivation, const Eigen::VectorXd& u) const;

  /// Declared bound b_e on ||e||_inf.
  double bound() const;

  ExplorationSignal with_t_off(double t_off) const;

  static ExplorationSignal none(int channels);

  friend ExplorationSignal make_sum_of_sines(int channels, int count, double freq_lo, double freq_hi,
                                             std::mt19937_64& rng, double scale);
  friend ExplorationSignal make_saturated_probe(const ExplorationSignal& base, double lambda, double scale);

 private:
  ExplorationKind kind_ = ExplorationKind::None;
  Eigen::MatrixXd omega_;
  double scale_ = 1.0;
  double lambda_ = 0.0;
  double t_off_ = std::numeric_limits<double>::infinity();
};

/// Frequencies are drawn channel by channel, term by term, from `rng`.
ExplorationSignal make_sum_of_sines(int channels, int count, double freq_lo, double freq_hi,
                                    std::mt19937_64& rng, double scale = 1.0);

/// Convenience overload seeding a fresh generator.
ExplorationSignal make_sum_of_sines(int channels, int count, double freq_lo, double freq_hi,
                                    std::uint64_t seed, double scale = 1.0);

/// Wraps the frequencies of `base` into the saturated probe form. The scale
/// replaces the base signal's scale.
ExplorationSignal make_saturated_probe(const ExplorationSignal& base, double lambda, double scale);

}  // namespace sirl
