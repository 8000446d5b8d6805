// Acceptance runner. Prints one [PASS]/[FAIL] line per criterion, preceded by
// the checks it is made of. Lines tagged [INFO] or [SUPP] are diagnostics and
// never change the verdict. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sirl/approximator.hpp"
#include "sirl/basis.hpp"
#include "sirl/config.hpp"
#include "sirl/cost.hpp"
#include "sirl/dynamics.hpp"
#include "sirl/errors.hpp"
#include "sirl/exploration.hpp"
#include "sirl/learner.hpp"
#include "sirl/lqr_oracle.hpp"
#include "sirl/simulator.hpp"
#include "support.hpp"

using namespace sirl;

namespace {

// Optimal Case 1 weights as published.
const double kPrintedWStar[5] = {0.8779, -0.1904, 0.2492, -1.6601, -0.0577};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::string vec_str(const Eigen::VectorXd& v, int digits = 4) {
  std::ostringstream os;
  os << "[" << std::fixed << std::setprecision(digits);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  return os.str() + "]";
}

class Criterion {
 public:
  explicit Criterion(int id) : id_(id) {}

  void check(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    std::cout << "  " << (ok ? "ok   " : "FAIL ") << what << "\n";
  }
  void info(const std::string& what) const { std::cout << "  [INFO] " << what << "\n"; }
  void supplementary(bool ok, const std::string& what) const {
    std::cout << "  [SUPP " << (ok ? "ok" : "FAIL") << "] " << what << "\n";
  }
  bool finish(const std::string& title) const {
    std::cout << (pass_ ? "[PASS]" : "[FAIL]") << " criterion " << id_ << ": " << title << "\n" << std::flush;
    return pass_;
  }

 private:
  int id_;
  bool pass_ = true;
};

bool all_finite(const RunResult& r) {
  for (const auto& w : r.weights) {
    if (!w.w_hat.allFinite() || !w.w_a2.allFinite() || !std::isfinite(w.abs_bellman)) return false;
  }
  for (const auto& t : r.trajectory) {
    if (!t.x.allFinite() || !t.u.allFinite() || !t.e.allFinite() || !std::isfinite(t.running_cost)) return false;
  }
  return r.final_state.allFinite() && std::isfinite(r.total_running_cost);
}

struct TimedRun {
  ExperimentConfig cfg;
  RunResult result;
  double seconds = 0.0;
};

const TimedRun& preset_run(const std::string& name) {
  static std::map<std::string, TimedRun> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  TimedRun t;
  t.cfg = load_preset(name);
  const auto start = std::chrono::steady_clock::now();
  t.result = run_experiment(t.cfg);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cache.emplace(name, std::move(t)).first->second;
}

LinearPlant plant_of(const ExperimentConfig& cfg) {
  return {cfg.model.A, cfg.model.B, cfg.Q, Eigen::MatrixXd(cfg.r_diag.asDiagonal())};
}

void report_zero_init(const Criterion& c, const std::string& name) {
  try {
    const ExperimentConfig cfg = load_preset(name);
    const RunResult r = run_experiment(cfg);
    c.info(name + ": " + std::to_string(r.resets.size()) + " resets, final W_hat = " +
           vec_str(r.final_w_hat.vector()) + ", final |x| = " + fmt(r.final_state.norm()));
  } catch (const DivergenceError& e) {
    c.info(name + ": diverged (" + e.what() + ")");
  } catch (const std::exception& e) {
    c.info(name + ": " + e.what());
  }
}

bool criterion_1() {
  Criterion c(1);
  const TimedRun& run = preset_run("case1");
  const Eigen::VectorXd w = run.result.final_w_hat.vector();
  c.info("final W_hat = " + vec_str(w));
  c.info("final w_a2  = " + vec_str(flatten(run.result.final_w_a2.w_a)));
  c.info("run time " + fmt(run.seconds, 3) + " s, " + std::to_string(run.result.resets.size()) + " resets");
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(w(i) - kPrintedWStar[i]));
  c.check(worst <= 0.05, "max |W_hat - W*| = " + fmt(worst) + " <= 0.05");
  const Eigen::VectorXd wa1 = flatten(run.result.final_w_hat.actor().w_a);
  const Eigen::VectorXd wa2 = flatten(run.result.final_w_a2.w_a);
  const double gap = (wa1 - wa2).lpNorm<Eigen::Infinity>();
  c.check(gap <= 0.02, "max |w_a2 - w_a1| = " + fmt(gap) + " <= 0.02");
  c.check(all_finite(run.result), "all logged quantities finite");
  report_zero_init(c, "case1_zero_init");
  return c.finish("Case 1 weights converge to the Riccati solution");
}

bool criterion_2() {
  Criterion c(2);
  const ExperimentConfig cfg = load_preset("case1");
  const LinearPlant p = plant_of(cfg);
  const AreSolution sol = solve_are(p);
  c.check(sol.residual <= 1e-10, "case 1 ARE residual " + fmt(sol.residual, 3) + " <= 1e-10");
  const Eigen::MatrixXd ham = reference::hamiltonian_are(p.A, p.B, p.Q, p.R);
  c.info("max |P - P_hamiltonian| = " + fmt((sol.P - ham).lpNorm<Eigen::Infinity>(), 3));

  const Eigen::VectorXd w = lqr_reference_weights(p, sol.P, BasisSet(2, cfg.critic_terms), BasisSet(2, cfg.actor_terms));
  c.info("computed W* = " + vec_str(w, 6));
  for (int i = 0; i < 5; ++i) {
    const double err = std::abs(w(i) - kPrintedWStar[i]);
    c.check(err <= 5e-5, "W*[" + std::to_string(i) + "] = " + fmt(w(i), 6) + " matches printed " +
                             fmt(kPrintedWStar[i], 5) + " to 4 decimals (|diff| " + fmt(err, 3) + ")");
  }

  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const LinearPlant scalar{-one, one, one, one};
  const double ps = solve_are(scalar).P(0, 0);
  c.check(std::abs(ps - (std::sqrt(2.0) - 1.0)) <= 1e-10,
          "scalar P = " + fmt(ps, 12) + " vs sqrt(2) - 1 (|diff| " + fmt(std::abs(ps - (std::sqrt(2.0) - 1.0)), 3) +
              ")");
  return c.finish("Riccati oracle correctness");
}

// Adaptive 5-point Gauss-Legendre: split a panel until it agrees with its two
// halves to `density` per unit length.
template <class F>
double adaptive_gauss(const F& f, double a, double b, double density, int depth = 0) {
  const double whole = reference::gauss_legendre(f, a, b, 1);
  const double mid = 0.5 * (a + b);
  const double halves = reference::gauss_legendre(f, a, mid, 1) + reference::gauss_legendre(f, mid, b, 1);
  if (std::abs(whole - halves) <= density * (b - a) || depth >= 30) return halves;
  return adaptive_gauss(f, a, mid, density, depth + 1) + adaptive_gauss(f, mid, b, density, depth + 1);
}

// U(u) = 2 sum_i int_0^{u_i} lambda r_i atanh(s / lambda) ds, with s = lambda (1 - (1 - z)^2)
// to remove the logarithmic growth near the bound.
double input_cost_by_adaptive_quadrature(const Eigen::VectorXd& u, const Eigen::VectorXd& r, double lambda) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i)) / lambda;
    const double zmax = 1.0 - std::sqrt(1.0 - a);
    const auto integrand = [](double z) {
      const double s = 1.0 - (1.0 - z) * (1.0 - z);
      return std::atanh(s) * 2.0 * (1.0 - z);
    };
    const double scale = 2.0 * lambda * lambda * r(i);
    total += scale * adaptive_gauss(integrand, 0.0, zmax, 1e-15);
  }
  return total;
}

bool criterion_3() {
  Criterion c(3);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const int m = 1 + static_cast<int>(uniform(rng, 0.0, 3.0));
    const double lambda = uniform(rng, 0.1, 50.0);
    const Eigen::VectorXd r = reference::random_vector(rng, m, 0.1, 10.0);
    const Eigen::VectorXd u = reference::random_vector(rng, m, -0.999 * lambda, 0.999 * lambda);
    const SaturatedCost cost(Eigen::MatrixXd::Identity(1, 1), r, lambda);
    worst = std::max(worst, std::abs(input_cost(cost, u) - input_cost_by_adaptive_quadrature(u, r, lambda)));
  }
  c.check(worst <= 1e-8, "1000 samples, max |closed form - quadrature| = " + fmt(worst, 3) + " <= 1e-8");
  double worst_end = 0.0;
  for (double lambda : {0.5, 1.0, 30.0}) {
    for (double r : {0.5, 1.0, 2.0}) {
      const SaturatedCost cost(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Constant(1, r), lambda);
      const double expected = 2.0 * lambda * lambda * r * std::log(2.0);
      for (double sign : {-1.0, 1.0}) {
        worst_end = std::max(worst_end, std::abs(input_cost(cost, Eigen::VectorXd::Constant(1, sign * lambda)) - expected) /
                                            expected);
      }
    }
  }
  c.check(worst_end <= 1e-12, "U(+-lambda) = 2 lambda^2 r ln 2, max rel. diff " + fmt(worst_end, 3));
  return c.finish("saturated input cost closed form vs quadrature");
}

bool criterion_4() {
  Criterion c(4);
  const ExperimentConfig cfg = load_preset("case1");
  const LinearPlant p = plant_of(cfg);
  const BasisSet critic(2, cfg.critic_terms);
  const BasisSet actor(2, cfg.actor_terms);
  const StackedCriticVector w(lqr_reference_weights(p, solve_are(p).P, critic, actor), critic.size(), actor.size(), 1);
  const SaturatedCost cost(cfg.Q, cfg.r_diag, cfg.lambda);
  const SystemModel model = build_model(cfg.model);
  const ExplorationSignal signal = make_sum_of_sines(1, cfg.exploration.count, cfg.exploration.freq_lo,
                                                     cfg.exploration.freq_hi, cfg.seed, cfg.exploration.scale);
  const double horizon = 5.0;
  auto replay = [&](double h) {
    return reference::replay_frozen(model, cost, critic, actor, w, w.actor(), signal, cfg.x0, h, cfg.learner.T, horizon);
  };
  const std::vector<double> hs = {1e-3, 5e-4, 2.5e-4};
  std::vector<double> mean_abs, mean_diff;
  for (double h : hs) {
    const auto coarse = replay(h);
    const auto fine = replay(h / 8.0);
    double s = 0.0, d = 0.0;
    for (std::size_t i = 0; i < coarse.errors.size(); ++i) {
      s += std::abs(coarse.errors[i]);
      d += std::abs(coarse.errors[i] - fine.errors[i]);
    }
    mean_abs.push_back(s / static_cast<double>(coarse.errors.size()));
    mean_diff.push_back(d / static_cast<double>(coarse.errors.size()));
    c.info("h = " + fmt(h) + ": mean |E| = " + fmt(mean_abs.back(), 6) + ", mean |E(h) - E(h/8)| = " +
           fmt(mean_diff.back(), 3));
  }
  const double order = reference::fitted_order(hs, mean_abs);
  c.check(order >= 3.5, "fitted order of mean |E| = " + fmt(order, 3) + " >= 3.5");
  const double quad_order = reference::fitted_order(hs, mean_diff);
  c.supplementary(quad_order >= 3.5, "fitted order of the step-size dependent part |E(h) - E(h/8)| = " +
                                         fmt(quad_order, 3) + " >= 3.5 (|E| itself tends to the nonzero "
                                         "saturation floor of the tanh policy)");
  return c.finish("Bellman error of the Riccati weights vanishes at 4th order in h");
}

bool criterion_5() {
  Criterion c(5);
  const TimedRun& run = preset_run("case2");
  const ExperimentConfig& cfg = run.cfg;
  const RunResult& r = run.result;
  c.info("final W_hat = " + vec_str(r.final_w_hat.vector()));
  c.info("run time " + fmt(run.seconds, 3) + " s, " + std::to_string(r.resets.size()) + " resets");

  double peak_logged = 0.0;
  for (const auto& t : r.trajectory) peak_logged = std::max(peak_logged, (t.u + t.e).lpNorm<Eigen::Infinity>());
  c.check(r.peak_applied_input <= cfg.lambda && peak_logged <= cfg.lambda,
          "(a) peak |u+e| over every RK4 stage = " + fmt(r.peak_applied_input, 6) + " <= 0.5");

  ReplayOptions opts;
  opts.trailing_window = 10.0;
  const ReplaySummary tail = replay_metrics(cfg, r, std::nullopt, opts);
  opts.window_end = cfg.t_off;
  const ReplaySummary learning = replay_metrics(cfg, r, std::nullopt, opts);
  c.check(!tail.insufficient_data && tail.mean_normalized_bellman < 1e-2,
          "(b) final 10 s mean |E|/(1+d'd) = " + fmt(tail.mean_normalized_bellman, 3) + " < 1e-2");
  c.check(!learning.insufficient_data && learning.mean_normalized_bellman < 1e-2,
          "(b) last 10 s of learning mean |E|/(1+d'd) = " + fmt(learning.mean_normalized_bellman, 3) + " < 1e-2");

  const SaturatedCost cost(cfg.Q, cfg.r_diag, cfg.lambda);
  const BasisSet actor(cfg.state_dim(), cfg.actor_terms);
  const Eigen::VectorXd x_end = closed_loop_final_state(build_model(cfg.model), cost,
                                                        actor_controller(r.final_w_a2, actor, cost),
                                                        Eigen::Vector2d(1, 1), cfg.t_final - cfg.t_off, cfg.h);
  c.check(x_end.norm() <= 0.05, "(c) frozen policy from (1, 1): |x(" + fmt(cfg.t_final - cfg.t_off) + " s)| = " +
                                    fmt(x_end.norm(), 3) + " <= 0.05");

  int x2sq = -1;
  for (std::size_t i = 0; i < cfg.critic_terms.size(); ++i) {
    if (cfg.critic_terms[i] == Exponents{0, 2}) x2sq = static_cast<int>(i);
  }
  const double w22 = x2sq >= 0 ? r.final_w_hat.vector()(x2sq) : std::nan("");
  c.check(w22 >= 0.7 && w22 <= 1.3, "(d) critic x2^2 weight = " + fmt(w22) + " in [0.7, 1.3]");
  c.check(all_finite(r), "all logged quantities finite");
  report_zero_init(c, "case2_zero_init");
  return c.finish("Case 2 saturation, residual, stabilization and critic weight");
}

bool criterion_6() {
  Criterion c(6);
  std::mt19937_64 rng(6);

  // Basis jacobian vs central differences.
  double jac_err = 0.0;
  for (const BasisSet& b : {BasisSet(2, load_preset("case2").critic_terms), BasisSet::homogeneous(3, 3)}) {
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd x = reference::random_vector(rng, b.input_dim(), -1, 1);
      const Eigen::MatrixXd J = b.jacobian(x);
      for (int j = 0; j < b.input_dim(); ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += 1e-6;
        xm(j) -= 1e-6;
        jac_err = std::max(jac_err, ((b.eval(xp) - b.eval(xm)) / 2e-6 - J.col(j)).lpNorm<Eigen::Infinity>());
      }
    }
  }
  c.check(jac_err <= 1e-6, "basis jacobian vs finite differences, max diff " + fmt(jac_err, 3));

  // Flattening identity with integer data, so both sides are exact.
  std::uniform_int_distribution<int> ints(-9, 9);
  bool exact = true;
  for (int k = 0; k < 100; ++k) {
    Eigen::MatrixXd W(4, 3);
    Eigen::VectorXd phi(4), re(3);
    for (int i = 0; i < 12; ++i) W(i / 3, i % 3) = ints(rng);
    for (int i = 0; i < 4; ++i) phi(i) = ints(rng);
    for (int i = 0; i < 3; ++i) re(i) = ints(rng);
    exact = exact && flatten(W).dot(kron(phi, re)) == phi.dot(W * re);
  }
  c.check(exact, "flatten(W)' kron(phi, r) == phi' W r exactly");

  // Critic step reduces |E| on the sample whenever the gain is below 2.
  LearnerConfig lc;
  lc.alpha1 = 1000.0;
  lc.alpha2 = 20.0;
  lc.T = 0.01;
  lc.Y = 0.001 * Eigen::MatrixXd::Identity(2, 2);
  bool monotone = true;
  for (int k = 0; k < 1000; ++k) {
    RegressorSample s;
    s.delta = reference::random_vector(rng, 5, -2, 2);
    s.rho = uniform(rng, 0.0, 2.0);
    const StackedCriticVector w(reference::random_vector(rng, 5, -2, 2), 3, 2, 1);
    const double dt = uniform(rng, 1e-5, 1e-3);
    if (critic_step_gain(s, lc, dt) >= 2.0) continue;
    const double before = std::abs(bellman_error(w, s));
    const double after = std::abs(bellman_error(critic_update(w, s, lc, dt), s));
    monotone = monotone && after <= before;
  }
  c.check(monotone, "critic step never increases |E| on its own sample (gain < 2)");

  // Actor leakage alone contracts the weights.
  const BasisSet phi_a(2, {{1, 0}, {0, 1}});
  const SaturatedCost cost(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(1), 30.0);
  lc.Y = 0.1 * Eigen::MatrixXd::Identity(2, 2);
  bool contracts = true;
  for (int k = 0; k < 200; ++k) {
    const ActorWeights aw{reference::random_vector(rng, 2, -3, 3)};
    const Eigen::VectorXd x = reference::random_vector(rng, 2, -1, 1);
    const ActorWeights next = actor_update(aw, Eigen::VectorXd::Zero(1), phi_a, cost, x, lc, 1e-3);
    contracts = contracts && next.w_a.norm() < aw.w_a.norm();
  }
  c.check(contracts, "actor leakage step strictly shrinks |w_a2| when E_u = 0");

  // Determinism and accumulator consistency on short runs of both presets.
  for (const char* name : {"case1", "case2"}) {
    ExperimentConfig cfg = load_preset(name);
    cfg.t_final = 20.0;
    cfg.t_off = 15.0;
    const RunResult a = run_experiment(cfg);
    const RunResult b = run_experiment(cfg);
    bool same = a.weights.size() == b.weights.size() && a.final_state == b.final_state &&
                a.total_running_cost == b.total_running_cost;
    for (std::size_t i = 0; same && i < a.weights.size(); ++i) {
      same = a.weights[i].w_hat == b.weights[i].w_hat && a.weights[i].w_a2 == b.weights[i].w_a2;
    }
    c.check(same, std::string(name) + ": reruns are bit-identical");
    const double rel = std::abs(a.interval_rho_sum - a.total_running_cost) / a.total_running_cost;
    c.check(rel <= 1e-8, std::string(name) + ": interval cost sum vs total, rel. diff " + fmt(rel, 3));
  }

  // RK4 order on x' = -x.
  const SystemModel decay = make_linear_model(-Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Ones(1, 1));
  const Controller zero_u = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); };
  const Exploration no_e = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(1).eval();
  };
  const BasisSet lin(1, {{1}});
  const SaturatedCost unit(Eigen::MatrixXd::Identity(1, 1), Eigen::VectorXd::Ones(1), 1.0);
  std::vector<double> hs = {0.1, 0.05, 0.025, 0.0125}, errs;
  for (double h : hs) {
    AugmentedState s = AugmentedState::at(Eigen::VectorXd::Ones(1), 1);
    const int steps = static_cast<int>(std::lround(1.0 / h));
    for (int k = 0; k < steps; ++k) s = rk4_step(decay, s, zero_u, no_e, k * h, h, unit, lin).state;
    errs.push_back(std::abs(s.x(0) - std::exp(-1.0)));
  }
  const double order = reference::fitted_order(hs, errs);
  c.check(std::abs(order - 4.0) <= 0.2, "RK4 fitted order " + fmt(order, 3) + " in [3.8, 4.2]");
  return c.finish("invariant suites");
}

bool criterion_7() {
  Criterion c(7);
  for (const char* name : {"case1", "case2"}) {
    const TimedRun& run = preset_run(name);
    const UubReport u = check_uub(run.cfg, run.result);
    c.check(u.pass, std::string(name) + ": final " + fmt(run.cfg.uub.window) + " s max |x| = " +
                        fmt(u.max_state_norm, 3) + " (<= " + fmt(run.cfg.uub.state_norm_max) +
                        "), max weight excursion = " + fmt(u.max_weight_excursion, 3) + " of band (<= 1)");
    c.check(all_finite(run.result), std::string(name) + ": no NaN/Inf in weights or trajectory");
  }
  return c.finish("uniform ultimate boundedness over the final window");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7};
  std::optional<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: sirl_acceptance [--only N]\n";
      return 2;
    }
  }
  if (only && (*only < 1 || *only > static_cast<int>(criteria.size()))) {
    std::cerr << "no criterion " << *only << "\n";
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != *only) continue;
    bool ok = false;
    try {
      ok = criteria[i]();
    } catch (const std::exception& e) {
      std::cout << "[FAIL] criterion " << i + 1 << ": aborted: " << e.what() << "\n";
    }
    failed += ok ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << "\n";
  return failed == 0 ? 0 : 1;
}
