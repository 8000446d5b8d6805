#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sirl/approximator.hpp"
#include "sirl/basis.hpp"
#include "sirl/cost.hpp"
#include "sirl/dynamics.hpp"
#include "sirl/exploration.hpp"
#include "sirl/learner.hpp"

namespace sirl {

enum class ModelKind { Linear, CosGain };

struct ModelSpec {
  ModelKind kind = ModelKind::Linear;
  Eigen::MatrixXd A;  // Linear only
  Eigen::MatrixXd B;  // Linear only
};

SystemModel build_model(const ModelSpec& spec);

struct ExplorationSpec {
  ExplorationKind kind = ExplorationKind::SumOfSines;
  int count = 100;
  double freq_lo = -50.0;
  double freq_hi = 50.0;
  double scale = 1.0;
};

/// Stabilizing: critic zero, both actor estimates hold -K on their linear terms, where K
/// is the first pole-shifting gain that stabilizes the linearization at the origin.
enum class WeightInit { Zero, Uniform, Given, Stabilizing };

// Post-run boundedness thresholds checked over the trailing window.
struct UubSpec {
  double window = 10.0;           // s
  double state_norm_max = 5.0;    // bound on ||x||_2
  double weight_rel_band = 0.5;   // |w(t) - w(t_off)| <= band * max(|w(t_off)|, floor)
  double weight_abs_floor = 0.05;
};

/// Everything a run needs. All fields are explicit in config files.
struct ExperimentConfig {
  std::string name;
  ModelSpec model;
  Eigen::VectorXd omega_lo;  // admissible box, used for resets
  Eigen::VectorXd omega_hi;

  Eigen::MatrixXd Q;
  Eigen::VectorXd r_diag;
  double lambda = 1.0;

  std::vector<Exponents> critic_terms;
  std::vector<Exponents> actor_terms;

  LearnerConfig learner;
  bool freeze_after_t_off = true;
  ExplorationSpec exploration;

  double h = 1e-3;
  double t_off = 180.0;
  double t_final = 200.0;

  Eigen::VectorXd x0;
  WeightInit init = WeightInit::Zero;
  double init_range = 0.0;
  Eigen::VectorXd init_w_hat;  // Given only: [w_c; col{w_a1}]
  Eigen::VectorXd init_w_a2;   // Given only: col{w_a2}

  double x_max = 50.0;
  int max_resets = 100;
  std::uint64_t seed = 1;
  int pe_window = 100;
  int trajectory_every = 10;
  UubSpec uub;

  int state_dim() const { return static_cast<int>(x0.size()); }
  int input_dim() const { return static_cast<int>(r_diag.size()); }
  int steps_per_interval() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct WeightRecord {
  double t = 0.0;
  Eigen::VectorXd w_hat;   // [w_c; col{w_a1}]
  Eigen::VectorXd w_a2;    // col{w_a2}
  bool has_sample = false; // a fresh regressor sample closed at t
  double abs_bellman = 0.0;
  double normalized_bellman = 0.0;  // |E| / (1 + delta^T delta)
  double pe_min_eig = 0.0;
  bool pe_partial = true;
};

struct TrajectoryRecord {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd e;
  double running_cost = 0.0;
};

struct ResetEvent {
  double t = 0.0;
  Eigen::VectorXd x_before;
  Eigen::VectorXd x_after;
};

struct RunResult {
  std::vector<WeightRecord> weights;
  std::vector<TrajectoryRecord> trajectory;
  std::vector<ResetEvent> resets;

  StackedCriticVector initial_w_hat;
  ActorWeights initial_w_a2;
  StackedCriticVector final_w_hat;
  ActorWeights final_w_a2;
  std::optional<StackedCriticVector> t_off_w_hat;
  std::optional<ActorWeights> t_off_w_a2;

  double peak_applied_input = 0.0;  // over every RK4 stage
  double peak_policy_input = 0.0;
  double total_running_cost = 0.0;  // integrated without interval resets
  double interval_rho_sum = 0.0;    // sum of every interval accumulator
  Eigen::VectorXd final_state;
  double t_final = 0.0;
};

/// Actor weights implementing u = -K x on the linear basis terms, K from a pole-shift
/// search on the linearization of `model` at the origin. Throws ConfigError when the
/// actor basis lacks a linear term or no gain stabilizes the linearization.
ActorWeights stabilizing_initial_actor(const SystemModel& model, const BasisSet& actor_basis, const SaturatedCost& cost);

RunResult run_experiment(const ExperimentConfig& cfg);

/// Integral of Q(x) + U(u) along the closed loop x' = f + g u(x) over [0, horizon].
double closed_loop_cost(const SystemModel& model, const SaturatedCost& cost, const Controller& controller,
                        const Eigen::VectorXd& x0, double horizon, double h);

/// Final state of the same closed loop after `horizon` seconds.
Eigen::VectorXd closed_loop_final_state(const SystemModel& model, const SaturatedCost& cost,
                                        const Controller& controller, const Eigen::VectorXd& x0, double horizon,
                                        double h);

struct ReplayOptions {
  double trailing_window = 10.0;  // s
  std::optional<double> window_end;  // Bellman window ends here; default: last record
  double horizon = 10.0;          // s, closed-loop cost
  std::vector<Eigen::VectorXd> initial_states;  // empty: 3^n grid over the omega box minus the origin
};

struct ClosedLoopCost {
  Eigen::VectorXd x0;
  double cost = 0.0;
};

struct ReplaySummary {
  bool insufficient_data = true;
  std::size_t window_samples = 0;
  double max_abs_bellman = 0.0;
  double mean_abs_bellman = 0.0;
  double mean_normalized_bellman = 0.0;
  std::optional<Eigen::VectorXd> weight_error;  // |final - reference| per component
  double max_weight_error = 0.0;
  std::vector<ClosedLoopCost> closed_loop_costs;
};

/// Post-run diagnostics. `reference` is a stacked [w_c; col{w_a1}] vector.
ReplaySummary replay_metrics(const ExperimentConfig& cfg, const RunResult& result,
                             const std::optional<Eigen::VectorXd>& reference, const ReplayOptions& options = {});

/// Bounds over the last uub.window seconds: state norm against uub.state_norm_max and every
/// weight against a band of uub.weight_rel_band * max(|w(t_off)|, uub.weight_abs_floor).
struct UubReport {
  bool pass = true;
  double max_state_norm = 0.0;
  double max_weight_excursion = 0.0;  // relative to the band
};

UubReport check_uub(const ExperimentConfig& cfg, const RunResult& r);

/// The learned policy u(x) = lambda tanh(w_a2^T phi_a(x) / lambda) as a controller.
Controller actor_controller(const ActorWeights& w_a2, const BasisSet& actor_basis, const SaturatedCost& cost);

}  // namespace sirl
