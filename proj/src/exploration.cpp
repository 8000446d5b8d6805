#include "sirl/exploration.hpp"

#include <cmath>
#include <stdexcept>

namespace sirl {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * unit;
}

ExplorationSignal make_sum_of_sines(int channels, int count, double freq_lo, double freq_hi,
                                    std::mt19937_64& rng, double scale) {
  if (channels < 1 || count < 1) throw std::invalid_argument("sum of sines: channels and count must be >= 1");
  if (!(freq_lo < freq_hi)) throw std::invalid_argument("sum of sines: frequency range must satisfy lo < hi");
  ExplorationSignal s;
  s.kind_ = ExplorationKind::SumOfSines;
  s.omega_.resize(channels, count);
  for (int j = 0; j < channels; ++j) {
    for (int k = 0; k < count; ++k) s.omega_(j, k) = uniform(rng, freq_lo, freq_hi);
  }
  s.scale_ = scale;
  return s;
}

ExplorationSignal make_sum_of_sines(int channels, int count, double freq_lo, double freq_hi, std::uint64_t seed,
                                    double scale) {
  std::mt19937_64 rng(seed);
  return make_sum_of_sines(channels, count, freq_lo, freq_hi, rng, scale);
}

ExplorationSignal make_saturated_probe(const ExplorationSignal& base, double lambda, double scale) {
  if (base.kind() == ExplorationKind::None) throw std::invalid_argument("saturated probe: base signal is empty");
  if (!(lambda > 0.0)) throw std::invalid_argument("saturated probe: lambda must be positive");
  ExplorationSignal s = base;
  s.kind_ = ExplorationKind::SaturatedProbe;
  s.scale_ = scale;
  s.lambda_ = lambda;
  return s;
}

ExplorationSignal ExplorationSignal::none(int channels) {
  ExplorationSignal s;
  s.omega_.resize(channels, 0);
  return s;
}

ExplorationSignal ExplorationSignal::with_t_off(double t_off) const {
  ExplorationSignal s = *this;
  s.t_off_ = t_off;
  return s;
}

Eigen::VectorXd ExplorationSignal::probe(double t) const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(channels());
  if (kind_ == ExplorationKind::None || t >= t_off_) return p;
  for (Eigen::Index j = 0; j < omega_.rows(); ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < omega_.cols(); ++k) acc += std::sin(omega_(j, k) * t);
    p(j) = scale_ * acc;
  }
  return p;
}

Eigen::VectorXd ExplorationSignal::evaluate(double t, const Eigen::VectorXd& preactivation,
                                            const Eigen::VectorXd& u) const {
  switch (kind_) {
    case ExplorationKind::None:
      return Eigen::VectorXd::Zero(u.size());
    case ExplorationKind::SumOfSines:
      return probe(t);
    case ExplorationKind::SaturatedProbe: {
      if (t >= t_off_) return Eigen::VectorXd::Zero(u.size());
      const Eigen::VectorXd arg = (probe(t) + preactivation) / lambda_;
      return (lambda_ * arg.array().tanh()).matrix() - u;
    }
  }
  return Eigen::VectorXd::Zero(u.size());
}

double ExplorationSignal::bound() const {
  switch (kind_) {
    case ExplorationKind::None:
      return 0.0;
    case ExplorationKind::SumOfSines:
      return std::abs(scale_) * static_cast<double>(omega_.cols());
    case ExplorationKind::SaturatedProbe:
      return 2.0 * lambda_;
  }
  return 0.0;
}

}  // namespace sirl
