#include "sirl/approximator.hpp"

#include <cmath>
#include <stdexcept>

#include "sirl/basis.hpp"
#include "sirl/cost.hpp"

namespace sirl {

Eigen::VectorXd flatten(const Eigen::MatrixXd& w) {
  Eigen::VectorXd flat(w.size());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) flat(i * w.cols() + j) = w(i, j);
  }
  return flat;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& flat, int rows, int cols) {
  if (flat.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw std::invalid_argument("unflatten: size mismatch");
  }
  Eigen::MatrixXd w(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) w(i, j) = flat(i * cols + j);
  }
  return w;
}

Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

StackedCriticVector::StackedCriticVector(int critic_size, int actor_rows, int actor_cols)
    : w_(Eigen::VectorXd::Zero(critic_size + actor_rows * actor_cols)),
      n_c_(critic_size),
      n_a_(actor_rows),
      m_(actor_cols) {}

StackedCriticVector::StackedCriticVector(const CriticWeights& critic, const ActorWeights& actor)
    : n_c_(static_cast<int>(critic.w_c.size())), n_a_(actor.rows()), m_(actor.cols()) {
  w_.resize(n_c_ + n_a_ * m_);
  w_.head(n_c_) = critic.w_c;
  w_.tail(n_a_ * m_) = flatten(actor.w_a);
}

StackedCriticVector::StackedCriticVector(Eigen::VectorXd stacked, int critic_size, int actor_rows, int actor_cols)
    : w_(std::move(stacked)), n_c_(critic_size), n_a_(actor_rows), m_(actor_cols) {
  if (w_.size() != critic_size + actor_rows * actor_cols) {
    throw std::invalid_argument("stacked critic vector: size mismatch");
  }
}

CriticWeights StackedCriticVector::critic() const { return {w_.head(n_c_)}; }

ActorWeights StackedCriticVector::actor() const { return {unflatten(w_.tail(n_a_ * m_), n_a_, m_)}; }

double value_estimate(const CriticWeights& cw, const BasisSet& critic_basis, const Eigen::VectorXd& x) {
  return cw.w_c.dot(critic_basis.eval(x));
}

Eigen::VectorXd saturate(const Eigen::VectorXd& preactivation, double lambda) {
  return preactivation.unaryExpr([lambda](double v) { return lambda * std::tanh(v / lambda); });
}

Eigen::VectorXd policy_estimate(const ActorWeights& aw, const BasisSet& actor_basis, const SaturatedCost& cost,
                                const Eigen::VectorXd& x) {
  return saturate(aw.w_a.transpose() * actor_basis.eval(x), cost.lambda());
}

Eigen::VectorXd v1_estimate(const ActorWeights& aw, const BasisSet& actor_basis, const Eigen::VectorXd& x) {
  return aw.w_a.transpose() * actor_basis.eval(x);
}

}  // namespace sirl
