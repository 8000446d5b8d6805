#include "sirl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sirl/errors.hpp"
#include "sirl/lqr_oracle.hpp"

namespace sirl {

SystemModel build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Linear:
      return make_linear_model(spec.A, spec.B);
    case ModelKind::CosGain:
      return make_cos_gain_model();
  }
  throw ConfigError("model.kind", "unknown model");
}

int ExperimentConfig::steps_per_interval() const { return static_cast<int>(std::lround(learner.T / h)); }

void ExperimentConfig::validate() const {
  const int n = state_dim();
  const int m = input_dim();
  if (n < 1) throw ConfigError("init.x0", "state must be non-empty");
  if (m < 1) throw ConfigError("cost.r_diag", "must be non-empty");

  if (model.kind == ModelKind::Linear) {
    if (model.A.rows() != n || model.A.cols() != n) throw ConfigError("model.A", "must be n x n with n = dim(x0)");
    if (model.B.rows() != n || model.B.cols() != m) throw ConfigError("model.B", "must be n x m");
  } else if (n != 2 || m != 1) {
    throw ConfigError("model.kind", "cos_gain model has n = 2, m = 1");
  }
  if (omega_lo.size() != n || omega_hi.size() != n) throw ConfigError("omega", "bounds must have n entries");
  if (((omega_hi - omega_lo).array() <= 0.0).any()) throw ConfigError("omega", "hi must exceed lo");
  if (Q.rows() != n || Q.cols() != n) throw ConfigError("cost.Q", "must be n x n");
  try {
    SaturatedCost probe(Q, r_diag, lambda);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("cost", e.what());
  }
  try {
    BasisSet c(n, critic_terms);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("basis.critic", e.what());
  }
  try {
    BasisSet a(n, actor_terms);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("basis.actor", e.what());
  }
  learner.validate(static_cast<int>(actor_terms.size()) * m);

  if (!(h > 0.0)) throw ConfigError("time.h", "must be positive");
  const double ratio = learner.T / h;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1) {
    throw ConfigError("time.T", "must be an integer multiple of time.h");
  }
  if (t_final < 0.0) throw ConfigError("time.t_final", "must be non-negative");
  if (t_off > t_final) throw ConfigError("time.t_off", "must not exceed time.t_final");
  if (exploration.kind != ExplorationKind::None) {
    if (exploration.count < 1) throw ConfigError("exploration.count", "must be >= 1");
    if (!(exploration.freq_lo < exploration.freq_hi)) throw ConfigError("exploration", "freq_lo must be < freq_hi");
  }
  if (init == WeightInit::Uniform && !(init_range >= 0.0)) throw ConfigError("init.range", "must be >= 0");
  if (init == WeightInit::Given) {
    const auto flat = static_cast<Eigen::Index>(actor_terms.size()) * m;
    if (init_w_hat.size() != static_cast<Eigen::Index>(critic_terms.size()) + flat) {
      throw ConfigError("init.w_hat", "must have N_c + N_a*m entries");
    }
    if (init_w_a2.size() != flat) throw ConfigError("init.w_a2", "must have N_a*m entries");
  }
  if (!(x_max > 0.0)) throw ConfigError("x_max", "must be positive");
  if (max_resets < 0) throw ConfigError("max_resets", "must be >= 0");
  if (pe_window < 1) throw ConfigError("pe_window", "must be >= 1");
  if (trajectory_every < 1) throw ConfigError("logging.trajectory_every", "must be >= 1");

  // Worst-case Euler gain of the critic law is h * alpha1 * sup dtd/(1+dtd)^k < h * alpha1.
  // Above 2 the per-step update can overshoot for large regressors; the run loop
  // checks the realized gain every step instead of rejecting the config here.
}

Controller actor_controller(const ActorWeights& w_a2, const BasisSet& actor_basis, const SaturatedCost& cost) {
  return [w = w_a2.w_a, &actor_basis, lambda = cost.lambda()](const Eigen::VectorXd& x) {
    return saturate(w.transpose() * actor_basis.eval(x), lambda);
  };
}

namespace {

Eigen::VectorXd sample_box(std::mt19937_64& rng, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = uniform(rng, lo(i), hi(i));
  return x;
}

void require_finite(const Eigen::VectorXd& v, const char* what, double t) {
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite " << what << " at t=" << t;
    throw NumericError(msg.str(), t);
  }
}

}  // namespace

ActorWeights stabilizing_initial_actor(const SystemModel& model, const BasisSet& actor_basis,
                                       const SaturatedCost& cost) {
  const int n = model.n;
  const int m = model.m;
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
  LinearPlant plant;
  plant.A.resize(n, n);
  const double step = 1e-6;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd xp = origin;
    Eigen::VectorXd xm = origin;
    xp(k) += step;
    xm(k) -= step;
    plant.A.col(k) = (model.drift(xp) - model.drift(xm)) / (2.0 * step);
  }
  plant.B = model.input_gain(origin);
  plant.Q = cost.state_weight();
  plant.R = cost.r_diag().asDiagonal();
  const auto gain = find_stabilizing_gain(plant);
  if (!gain) throw ConfigError("init.weights", "no pole-shifting gain stabilizes the linearization at the origin");

  ActorWeights aw{Eigen::MatrixXd::Zero(actor_basis.size(), m)};
  for (int k = 0; k < n; ++k) {
    Exponents linear(n, 0);
    linear[k] = 1;
    const auto& terms = actor_basis.terms();
    const auto it = std::find(terms.begin(), terms.end(), linear);
    if (it == terms.end()) throw ConfigError("init.weights", "stabilizing init needs every linear term in basis.actor");
    aw.w_a.row(it - terms.begin()) = -gain->col(k).transpose();
  }
  return aw;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n = cfg.state_dim();
  const int m = cfg.input_dim();

  const SystemModel model = build_model(cfg.model);
  const SaturatedCost cost(cfg.Q, cfg.r_diag, cfg.lambda);
  const BasisSet critic_basis(n, cfg.critic_terms);
  const BasisSet actor_basis(n, cfg.actor_terms);
  const int n_c = critic_basis.size();
  const int n_a = actor_basis.size();
  const LearnerConfig& lc = cfg.learner;

  // Random draws, in order: exploration frequencies, initial weights, reset states.
  std::mt19937_64 rng(cfg.seed);
  ExplorationSignal signal = ExplorationSignal::none(m);
  if (cfg.exploration.kind != ExplorationKind::None) {
    signal = make_sum_of_sines(m, cfg.exploration.count, cfg.exploration.freq_lo, cfg.exploration.freq_hi, rng,
                               cfg.exploration.scale);
    if (cfg.exploration.kind == ExplorationKind::SaturatedProbe) {
      signal = make_saturated_probe(signal, cfg.lambda, cfg.exploration.scale);
    }
  }
  signal = signal.with_t_off(cfg.t_off);

  ActorWeights w_a2{Eigen::MatrixXd::Zero(n_a, m)};
  if (cfg.init == WeightInit::Uniform) {
    for (int i = 0; i < n_a; ++i) {
      for (int j = 0; j < m; ++j) w_a2.w_a(i, j) = uniform(rng, -cfg.init_range, cfg.init_range);
    }
  }
  CriticWeights w_c{Eigen::VectorXd::Zero(n_c)};
  if (cfg.init == WeightInit::Uniform) {
    for (int i = 0; i < n_c; ++i) w_c.w_c(i) = uniform(rng, -cfg.init_range, cfg.init_range);
  }
  // The critic-side actor estimate starts equal to the applied actor.
  StackedCriticVector w_hat(w_c, w_a2);
  if (cfg.init == WeightInit::Stabilizing) {
    w_a2 = stabilizing_initial_actor(model, actor_basis, cost);
    w_hat = StackedCriticVector(w_c, w_a2);
  } else if (cfg.init == WeightInit::Given) {
    w_hat = StackedCriticVector(cfg.init_w_hat, n_c, n_a, m);
    w_a2 = ActorWeights{unflatten(cfg.init_w_a2, n_a, m)};
  }

  RunResult result;
  result.initial_w_hat = w_hat;
  result.initial_w_a2 = w_a2;
  result.t_final = cfg.t_final;

  const double h = cfg.h;
  const long steps = std::lround(cfg.t_final / h);
  const int per_interval = cfg.steps_per_interval();
  const double lambda = cfg.lambda;

  AugmentedState aug = AugmentedState::at(cfg.x0, n_a * m);
  Eigen::VectorXd phi_c_start = critic_basis.eval(aug.x);
  double interval_start = 0.0;
  bool tainted = false;
  std::optional<RegressorSample> latest;
  PeMonitor pe(static_cast<std::size_t>(cfg.pe_window));

  // Current actor weights are read by the controller and exploration closures.
  const Controller controller = [&](const Eigen::VectorXd& x) {
    return saturate(w_a2.w_a.transpose() * actor_basis.eval(x), lambda);
  };
  const Exploration exploration = [&](double t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    if (signal.kind() == ExplorationKind::SaturatedProbe) {
      return signal.evaluate(t, w_a2.w_a.transpose() * actor_basis.eval(x), u);
    }
    return signal.evaluate(t, Eigen::VectorXd(), u);
  };

  auto learn = [&](double t, double dt) {
    if (latest && lc.critic_step == CriticStep::Exponential) {
      w_hat = critic_update_exponential(w_hat, *latest, lc, dt);
    } else if (latest) {
      // Euler on the critic law is stable while the realized gain stays below 2.
      const double gain = critic_step_gain(*latest, lc, dt);
      if (gain >= 2.0) {
        std::ostringstream msg;
        msg << "critic update unstable at t=" << t << ": step gain " << gain
            << " >= 2 (reduce time.h or learner.alpha1, or use learner.critic_step = exponential)";
        throw NumericError(msg.str(), t);
      }
      w_hat = critic_update(w_hat, *latest, lc, dt);
    }
    const ActorWeights w_a1 = w_hat.actor();
    const Eigen::VectorXd e_u = actor_error(w_a1, w_a2, actor_basis, cost, aug.x);
    w_a2 = actor_update(w_a2, e_u, actor_basis, cost, aug.x, lc, dt);
    require_finite(w_hat.vector(), "critic weights", t);
    require_finite(flatten(w_a2.w_a), "actor weights", t);
  };

  bool t_off_recorded = false;
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const bool learning = !(cfg.freeze_after_t_off && t >= cfg.t_off);
    if (!t_off_recorded && t >= cfg.t_off) {
      result.t_off_w_hat = w_hat;
      result.t_off_w_a2 = w_a2;
      t_off_recorded = true;
    }

    if (k % cfg.trajectory_every == 0) {
      TrajectoryRecord rec;
      rec.t = t;
      rec.x = aug.x;
      rec.u = controller(aug.x);
      rec.e = exploration(t, aug.x, rec.u);
      rec.running_cost = cost.state_cost(aug.x) + input_cost_clamped(cost, rec.u);
      result.trajectory.push_back(std::move(rec));
    }

    Rk4Result step = rk4_step(model, aug, controller, exploration, t, h, cost, actor_basis, cfg.x_max);
    aug = std::move(step.state);
    result.peak_applied_input = std::max(result.peak_applied_input, step.peak_applied_input);
    result.peak_policy_input = std::max(result.peak_policy_input, step.peak_policy_input);
    const double t_next = static_cast<double>(k + 1) * h;

    if (step.out_of_bounds) {
      if (static_cast<int>(result.resets.size()) >= cfg.max_resets) {
        std::ostringstream msg;
        msg << "state left ||x||_inf <= " << cfg.x_max << " after " << result.resets.size()
            << " resets (budget exhausted) at t=" << t_next;
        throw DivergenceError(msg.str(), t_next, aug.x);
      }
      ResetEvent ev{t_next, aug.x, sample_box(rng, cfg.omega_lo, cfg.omega_hi)};
      aug.x = ev.x_after;
      result.interval_rho_sum += aug.rho_acc;
      aug.reset_interval();
      tainted = true;  // the partial interval is discarded at the next boundary
      result.resets.push_back(std::move(ev));
    }

    if ((k + 1) % per_interval == 0) {
      WeightRecord rec;
      rec.t = t_next;
      const Eigen::VectorXd phi_c_end = critic_basis.eval(aug.x);
      if (!tainted) {
        RegressorSample s = build_regressor(phi_c_start, phi_c_end, aug.kron_acc, aug.rho_acc, interval_start, t_next);
        const double e = bellman_error(w_hat, s);
        rec.has_sample = true;
        rec.abs_bellman = std::abs(e);
        rec.normalized_bellman = std::abs(e) / (1.0 + s.delta.squaredNorm());
        pe.push(s);
        latest = std::move(s);
      }
      const PeEstimate est = pe.estimate();
      rec.pe_min_eig = est.min_eigenvalue;
      rec.pe_partial = est.partial;

      result.interval_rho_sum += aug.rho_acc;
      aug.reset_interval();
      phi_c_start = phi_c_end;
      interval_start = t_next;
      tainted = false;

      if (lc.cadence == UpdateCadence::PerInterval && learning) learn(t_next, lc.T);
      rec.w_hat = w_hat.vector();
      rec.w_a2 = flatten(w_a2.w_a);
      result.weights.push_back(std::move(rec));
    }

    if (lc.cadence == UpdateCadence::PerStep && learning) learn(t_next, h);
  }

  if (!t_off_recorded) {
    result.t_off_w_hat = w_hat;
    result.t_off_w_a2 = w_a2;
  }
  result.final_w_hat = w_hat;
  result.final_w_a2 = w_a2;
  result.final_state = aug.x;
  result.total_running_cost = aug.total_cost;
  result.interval_rho_sum += aug.rho_acc;
  return result;
}

namespace {

Exploration no_exploration(int m) {
  return [m](double, const Eigen::VectorXd&, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(m); };
}

// Integrates the unexplored closed loop, returning the final augmented state.
AugmentedState integrate_closed_loop(const SystemModel& model, const SaturatedCost& cost,
                                     const Controller& controller, const Eigen::VectorXd& x0, double horizon,
                                     double h) {
  if (!(h > 0.0)) throw std::invalid_argument("closed loop: step must be positive");
  // e = 0, so the Kronecker quadrature stays zero whatever basis is passed.
  const BasisSet linear = BasisSet::homogeneous(model.n, 1);
  AugmentedState aug = AugmentedState::at(x0, model.n * model.m);
  const Exploration none = no_exploration(model.m);
  const long steps = std::lround(horizon / h);
  for (long k = 0; k < steps; ++k) {
    aug = rk4_step(model, aug, controller, none, static_cast<double>(k) * h, h, cost, linear).state;
  }
  return aug;
}

}  // namespace

double closed_loop_cost(const SystemModel& model, const SaturatedCost& cost, const Controller& controller,
                        const Eigen::VectorXd& x0, double horizon, double h) {
  return integrate_closed_loop(model, cost, controller, x0, horizon, h).total_cost;
}

Eigen::VectorXd closed_loop_final_state(const SystemModel& model, const SaturatedCost& cost,
                                        const Controller& controller, const Eigen::VectorXd& x0, double horizon,
                                        double h) {
  return integrate_closed_loop(model, cost, controller, x0, horizon, h).x;
}

UubReport check_uub(const ExperimentConfig& cfg, const RunResult& r) {
  UubReport rep;
  const double t0 = cfg.t_final - cfg.uub.window;
  for (const auto& tr : r.trajectory) {
    if (tr.t < t0) continue;
    rep.max_state_norm = std::max(rep.max_state_norm, tr.x.norm());
    if (!tr.x.allFinite()) rep.pass = false;
  }
  if (r.t_off_w_hat) {
    Eigen::VectorXd ref(r.t_off_w_hat->size() + r.t_off_w_a2->w_a.size());
    ref << r.t_off_w_hat->vector(), flatten(r.t_off_w_a2->w_a);
    for (const auto& w : r.weights) {
      if (w.t < t0) continue;
      Eigen::VectorXd cur(ref.size());
      cur << w.w_hat, w.w_a2;
      if (!cur.allFinite()) rep.pass = false;
      for (Eigen::Index i = 0; i < ref.size(); ++i) {
        const double band = cfg.uub.weight_rel_band * std::max(std::abs(ref(i)), cfg.uub.weight_abs_floor);
        rep.max_weight_excursion = std::max(rep.max_weight_excursion, std::abs(cur(i) - ref(i)) / band);
      }
    }
  }
  if (rep.max_state_norm > cfg.uub.state_norm_max || rep.max_weight_excursion > 1.0) rep.pass = false;
  return rep;
}

ReplaySummary replay_metrics(const ExperimentConfig& cfg, const RunResult& result,
                             const std::optional<Eigen::VectorXd>& reference, const ReplayOptions& options) {
  ReplaySummary summary;

  const double last = result.weights.empty() ? 0.0 : result.weights.back().t;
  const double t_end = options.window_end ? std::min(*options.window_end, last) : last;
  const double t_begin = t_end - options.trailing_window;
  double sum_abs = 0.0;
  double sum_norm = 0.0;
  for (const auto& rec : result.weights) {
    if (!rec.has_sample || rec.t <= t_begin || rec.t > t_end + 1e-9) continue;
    ++summary.window_samples;
    summary.max_abs_bellman = std::max(summary.max_abs_bellman, rec.abs_bellman);
    sum_abs += rec.abs_bellman;
    sum_norm += rec.normalized_bellman;
  }
  summary.insufficient_data = summary.window_samples == 0;
  if (!summary.insufficient_data) {
    summary.mean_abs_bellman = sum_abs / static_cast<double>(summary.window_samples);
    summary.mean_normalized_bellman = sum_norm / static_cast<double>(summary.window_samples);
  }

  if (reference) {
    const Eigen::VectorXd& fin = result.final_w_hat.vector();
    if (reference->size() != fin.size()) {
      throw ConfigError("reference", "has " + std::to_string(reference->size()) + " entries, run has " +
                                         std::to_string(fin.size()));
    }
    summary.weight_error = (fin - *reference).cwiseAbs();
    summary.max_weight_error = summary.weight_error->maxCoeff();
  }

  const int n = cfg.state_dim();
  std::vector<Eigen::VectorXd> starts = options.initial_states;
  if (starts.empty()) {
    // 3^n grid over the omega box (lo, mid, hi per axis), origin excluded.
    const Eigen::VectorXd mid = 0.5 * (cfg.omega_lo + cfg.omega_hi);
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (long idx = 0; idx < total; ++idx) {
      Eigen::VectorXd x(n);
      long r = idx;
      for (int i = 0; i < n; ++i) {
        const int level = static_cast<int>(r % 3);
        r /= 3;
        x(i) = level == 0 ? cfg.omega_lo(i) : (level == 1 ? mid(i) : cfg.omega_hi(i));
      }
      if (x.norm() > 0.0) starts.push_back(x);
    }
  }
  if (options.horizon > 0.0) {
    const SystemModel model = build_model(cfg.model);
    const SaturatedCost cost(cfg.Q, cfg.r_diag, cfg.lambda);
    const BasisSet actor_basis(n, cfg.actor_terms);
    const Controller policy = actor_controller(result.final_w_a2, actor_basis, cost);
    for (const auto& x0 : starts) {
      summary.closed_loop_costs.push_back({x0, closed_loop_cost(model, cost, policy, x0, options.horizon, cfg.h)});
    }
  }
  return summary;
}

}  // namespace sirl
