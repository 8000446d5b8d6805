#include "sirl/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sirl/config.hpp"
#include "sirl/errors.hpp"
#include "sirl/io.hpp"
#include "sirl/lqr_oracle.hpp"
#include "sirl/simulator.hpp"

namespace fs = std::filesystem;

namespace sirl::cli {

namespace {

ExperimentConfig resolve_config(const std::optional<std::string>& preset, const std::optional<fs::path>& path) {
  if (preset && path) throw ConfigError("", "give either --preset or --config, not both");
  if (preset) return load_preset(*preset);
  if (path) return load_config(*path);
  throw ConfigError("", "one of --preset or --config is required");
}

std::string fmt4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  std::string s = os.str();
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string bracket(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt4(v(i));
  return s + "]";
}

std::string csv_list(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  return os.str();
}

LinearPlant plant_of(const ExperimentConfig& cfg) {
  if (cfg.model.kind != ModelKind::Linear) throw ConfigError("model.kind", "the oracle needs a linear model");
  return {cfg.model.A, cfg.model.B, cfg.Q, Eigen::MatrixXd(cfg.r_diag.asDiagonal())};
}

// Reference W* for a linear config, if its bases have the LQR structure.
std::optional<Eigen::VectorXd> oracle_reference(const ExperimentConfig& cfg) {
  if (cfg.model.kind != ModelKind::Linear) return std::nullopt;
  const LinearPlant p = plant_of(cfg);
  const BasisSet c(cfg.state_dim(), cfg.critic_terms);
  const BasisSet a(cfg.state_dim(), cfg.actor_terms);
  try {
    return lqr_reference_weights(p, solve_are(p).P, c, a);
  } catch (const ConfigError&) {
    return std::nullopt;
  }
}


void write_summary(const fs::path& dir, const ExperimentConfig& cfg, const RunResult& r) {
  const BasisSet c(cfg.state_dim(), cfg.critic_terms);
  const BasisSet a(cfg.state_dim(), cfg.actor_terms);
  const int m = cfg.input_dim();
  const auto reference = oracle_reference(cfg);
  ReplayOptions opts;
  opts.trailing_window = cfg.uub.window;
  const ReplaySummary rep = replay_metrics(cfg, r, reference, opts);
  // Same window, but ending where learning stops.
  opts.window_end = std::min(cfg.t_off, cfg.t_final);
  const ReplaySummary learn = replay_metrics(cfg, r, std::nullopt, opts);
  const UubReport uub = check_uub(cfg, r);
  const Eigen::VectorXd w_hat = r.final_w_hat.vector();
  const Eigen::VectorXd w_a2 = flatten(r.final_w_a2.w_a);

  std::ofstream txt(dir / "summary.txt");
  txt << "run: " << cfg.name << " (seed " << cfg.seed << ", t_final " << cfg.t_final << " s)\n";
  txt << "resets: " << r.resets.size() << "\n";
  txt << "peak |u+e|: " << r.peak_applied_input << ", peak |u|: " << r.peak_policy_input
      << " (lambda " << cfg.lambda << ")\n\n";
  txt << "final weights\n";
  txt << std::left << std::setw(8) << "index" << std::setw(16) << "term" << std::setw(12) << "W_hat";
  if (reference) txt << std::setw(12) << "W*" << std::setw(12) << "|err|";
  txt << "w_a2\n";
  for (int i = 0; i < w_hat.size(); ++i) {
    std::string term;
    if (i < c.size()) {
      term = "wc:" + c.describe(i);
    } else {
      const int k = i - c.size();
      term = "wa1:" + a.describe(k / m) + (m > 1 ? "/u" + std::to_string(k % m + 1) : "");
    }
    txt << std::setw(8) << i << std::setw(16) << term << std::setw(12) << fmt4(w_hat(i));
    if (reference) txt << std::setw(12) << fmt4((*reference)(i)) << std::setw(12) << fmt4(rep.weight_error->coeff(i));
    if (i >= c.size()) txt << fmt4(w_a2(i - c.size()));
    txt << "\n";
  }
  txt << "\ntrailing " << cfg.uub.window << " s: mean |E| " << rep.mean_abs_bellman << ", max |E| "
      << rep.max_abs_bellman << ", mean |E|/(1+d'd) " << rep.mean_normalized_bellman
      << (rep.insufficient_data ? " (insufficient data)" : "") << "\n";
  txt << "last " << cfg.uub.window << " s of learning: mean |E| " << learn.mean_abs_bellman << ", max |E| "
      << learn.max_abs_bellman << ", mean |E|/(1+d'd) " << learn.mean_normalized_bellman
      << (learn.insufficient_data ? " (insufficient data)" : "") << "\n";
  txt << "UUB check: " << (uub.pass ? "PASS" : "FAIL") << " (max ||x|| " << uub.max_state_norm << ", weight excursion "
      << uub.max_weight_excursion << " of band)\n";
  txt << "closed-loop cost of final policy over " << 10.0 << " s:\n";
  for (const auto& cl : rep.closed_loop_costs) txt << "  x0 = " << bracket(cl.x0) << ": " << cl.cost << "\n";

  std::ofstream kv(dir / "summary.kv");
  kv << std::setprecision(17);
  kv << "name=" << cfg.name << "\nseed=" << cfg.seed << "\nt_final=" << cfg.t_final << "\nresets=" << r.resets.size()
     << "\npeak_applied_input=" << r.peak_applied_input << "\npeak_policy_input=" << r.peak_policy_input
     << "\ntotal_running_cost=" << r.total_running_cost << "\ninterval_rho_sum=" << r.interval_rho_sum
     << "\nfinal_w_hat=" << csv_list(w_hat) << "\nfinal_w_a2=" << csv_list(w_a2)
     << "\nmean_abs_bellman=" << rep.mean_abs_bellman << "\nmax_abs_bellman=" << rep.max_abs_bellman
     << "\nmean_normalized_bellman=" << rep.mean_normalized_bellman
     << "\nlearning_mean_normalized_bellman=" << learn.mean_normalized_bellman
     << "\ninsufficient_data=" << (rep.insufficient_data ? 1 : 0) << "\nuub_pass=" << (uub.pass ? 1 : 0)
     << "\nuub_max_state_norm=" << uub.max_state_norm << "\n";
  if (reference) kv << "oracle_w=" << csv_list(*reference) << "\noracle_max_weight_error=" << rep.max_weight_error << "\n";
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << " (t=" << e.time() << ", x=[" << e.state().transpose() << "])\n";
    return kDivergence;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
}

}  // namespace

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = resolve_config(manifest.preset, manifest.config_path);
    if (manifest.seed) cfg.seed = *manifest.seed;
    if (manifest.t_final) {
      cfg.t_final = *manifest.t_final;
      cfg.t_off = std::min(cfg.t_off, cfg.t_final);
    }
    if (manifest.freeze_after_t_off) cfg.freeze_after_t_off = *manifest.freeze_after_t_off;
    if (manifest.normalization) {
      if (*manifest.normalization == "single") {
        cfg.learner.normalization = Normalization::Single;
      } else if (*manifest.normalization == "double") {
        cfg.learner.normalization = Normalization::Double;
      } else {
        throw ConfigError("normalization", "expected single or double");
      }
    }
    if (manifest.cadence) {
      if (*manifest.cadence == "per_step") {
        cfg.learner.cadence = UpdateCadence::PerStep;
      } else if (*manifest.cadence == "per_interval") {
        cfg.learner.cadence = UpdateCadence::PerInterval;
      } else {
        throw ConfigError("cadence", "expected per_step or per_interval");
      }
    }
    cfg.validate();

    std::error_code ec;
    fs::create_directories(manifest.out_dir, ec);
    if (ec || !fs::is_directory(manifest.out_dir)) {
      throw ConfigError("out", "cannot create output directory " + manifest.out_dir.string());
    }
    {
      std::ofstream cj(manifest.out_dir / "config.json");
      if (!cj) throw ConfigError("out", "output directory is not writable");
      cj << to_json(cfg).dump(2) << "\n";
    }

    const RunResult r = run_experiment(cfg);

    const int n_c = static_cast<int>(cfg.critic_terms.size());
    const int flat = static_cast<int>(cfg.actor_terms.size()) * cfg.input_dim();
    {
      std::ofstream tf(manifest.out_dir / "trajectory.csv");
      write_trajectory_csv(tf, r, cfg.state_dim(), cfg.input_dim());
      std::ofstream wf(manifest.out_dir / "weights.csv");
      write_weights_csv(wf, r, n_c, flat);
    }
    write_summary(manifest.out_dir, cfg, r);

    out << cfg.name << ": done, " << r.weights.size() << " intervals, " << r.resets.size() << " resets\n";
    out << "W_hat = " << bracket(r.final_w_hat.vector()) << "\n";
    out << "w_a2  = " << bracket(flatten(r.final_w_a2.w_a)) << "\n";
    out << "artifacts in " << manifest.out_dir.string() << "\n";
    return kOk;
  });
}

namespace {

Eigen::MatrixXd parse_matrix(const std::string& text, const std::string& field) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(field, std::string("not a JSON matrix: ") + e.what());
  }
  if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(field, "expected a number or a list of rows");
  if (!j[0].is_array()) {
    // A flat list is a column vector.
    Eigen::MatrixXd v(j.size(), 1);
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i), 0) = j[i].get<double>();
    return v;
  }
  Eigen::MatrixXd mtx(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw ConfigError(field, "rows must have equal length");
    for (std::size_t k = 0; k < j[i].size(); ++k) {
      mtx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return mtx;
}

}  // namespace

int cmd_oracle(const OracleRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    LinearPlant p;
    std::optional<BasisSet> critic, actor;
    if (req.preset || req.config_path) {
      const ExperimentConfig cfg = resolve_config(req.preset, req.config_path);
      p = plant_of(cfg);
      critic.emplace(cfg.state_dim(), cfg.critic_terms);
      actor.emplace(cfg.state_dim(), cfg.actor_terms);
    } else {
      if (!req.A || !req.B) throw ConfigError("", "oracle needs --preset/--config or both --A and --B");
      p.A = parse_matrix(*req.A, "A");
      p.B = parse_matrix(*req.B, "B");
      const Eigen::Index n = p.A.rows();
      const Eigen::Index m = p.B.cols();
      p.Q = req.Q ? parse_matrix(*req.Q, "Q") : Eigen::MatrixXd::Identity(n, n);
      p.R = req.R ? parse_matrix(*req.R, "R") : Eigen::MatrixXd::Identity(m, m);
      if (p.A.cols() != n || p.B.rows() != n) throw ConfigError("A", "A must be n x n and B n x m");
      critic.emplace(BasisSet::homogeneous(static_cast<int>(n), 2));
      actor.emplace(BasisSet::homogeneous(static_cast<int>(n), 1));
    }
    const AreSolution sol = solve_are(p);
    out << "P =\n";
    for (Eigen::Index i = 0; i < sol.P.rows(); ++i) {
      out << "  " << bracket(sol.P.row(i).transpose()) << "\n";
    }
    out << "ARE residual = " << std::scientific << std::setprecision(3) << sol.residual << std::defaultfloat
        << " (" << sol.iterations << " Kleinman iterations)\n";
    const Eigen::VectorXd w = lqr_reference_weights(p, sol.P, *critic, *actor);
    out << "W* = " << bracket(w) << "\n";
    return kOk;
  });
}

namespace {

Eigen::VectorXd stacked_from_table(const WeightsTable& t) {
  const Eigen::VectorXd wc = t.last("wc_");
  const Eigen::VectorXd wa1 = t.last("wa1_");
  Eigen::VectorXd w(wc.size() + wa1.size());
  w << wc, wa1;
  return w;
}

}  // namespace

int cmd_compare(const CompareRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path weights = req.run_dir / "weights.csv";
    const fs::path config = req.run_dir / "config.json";
    if (!fs::exists(weights)) throw ConfigError("run", "missing artifact " + weights.string());
    const Eigen::VectorXd run = stacked_from_table(read_weights_csv(weights));

    Eigen::VectorXd ref;
    if (req.reference == "oracle") {
      if (!fs::exists(config)) throw ConfigError("run", "missing artifact " + config.string());
      const ExperimentConfig cfg = load_config(config);
      const auto r = oracle_reference(cfg);
      if (!r) throw ConfigError("reference", "no oracle for this model/basis (needs linear model, quadratic critic)");
      ref = *r;
    } else {
      fs::path p = req.reference;
      if (fs::is_directory(p)) p /= "weights.csv";
      if (!fs::exists(p)) throw ConfigError("reference", "missing artifact " + p.string());
      ref = stacked_from_table(read_weights_csv(p));
    }
    if (ref.size() != run.size()) {
      throw ConfigError("reference", "dimension mismatch: run has " + std::to_string(run.size()) +
                                         " weights, reference has " + std::to_string(ref.size()));
    }
    bool pass = true;
    out << std::left << std::setw(8) << "index" << std::setw(12) << "run" << std::setw(12) << "reference"
        << std::setw(12) << "|err|" << "status\n";
    for (Eigen::Index i = 0; i < run.size(); ++i) {
      const double e = std::abs(run(i) - ref(i));
      const bool ok = e <= req.tol;
      pass = pass && ok;
      out << std::setw(8) << i << std::setw(12) << fmt4(run(i)) << std::setw(12) << fmt4(ref(i)) << std::setw(12)
          << fmt4(e) << (ok ? "ok" : "FAIL") << "\n";
    }
    out << (pass ? "PASS" : "FAIL") << " (tol " << req.tol << ")\n";
    return pass ? kOk : kFailed;
  });
}

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned jobs = std::max(1u, std::min<unsigned>(req.jobs ? req.jobs : hw, req.runs.size()));
  std::vector<int> codes(req.runs.size(), 0);
  std::vector<std::string> logs(req.runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < req.runs.size(); i = next++) {
      std::ostringstream o, e;
      codes[i] = cmd_run(req.runs[i], o, e);
      logs[i] = o.str() + e.str();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int worst = kOk;
  for (std::size_t i = 0; i < req.runs.size(); ++i) {
    out << "[" << req.runs[i].out_dir.string() << "] exit " << codes[i] << "\n" << logs[i];
    if (codes[i] != kOk) {
      err << "run " << req.runs[i].out_dir.string() << " failed with exit " << codes[i] << "\n";
      worst = std::max(worst, codes[i]);
    }
  }
  return worst;
}

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synchronous integral reinforcement learning for constrained-input control"};
  app.require_subcommand(1);

  RunManifest run;
  std::string run_preset, run_config, run_norm, run_cadence;
  std::uint64_t run_seed = 0;
  double run_tfinal = 0.0;
  bool freeze = false, no_freeze = false;
  auto* run_cmd = app.add_subcommand("run", "run one learning experiment");
  run_cmd->add_option("--preset", run_preset, "case1, case2, case1_zero_init or case2_zero_init");
  run_cmd->add_option("--config", run_config, "experiment config (JSON)");
  run_cmd->add_option("--out", run.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "override the config seed");
  auto* tf_opt = run_cmd->add_option("--t-final", run_tfinal, "override the simulation length [s]");
  run_cmd->add_flag("--freeze", freeze, "freeze learning after t_off");
  run_cmd->add_flag("--no-freeze", no_freeze, "keep learning after t_off");
  run_cmd->add_option("--normalization", run_norm, "single or double");
  run_cmd->add_option("--cadence", run_cadence, "per_step or per_interval");

  OracleRequest oracle;
  std::string or_preset, or_config, or_A, or_B, or_Q, or_R;
  auto* or_cmd = app.add_subcommand("oracle", "solve the ARE and print P and the reference weights");
  or_cmd->add_option("--preset", or_preset, "case1");
  or_cmd->add_option("--config", or_config, "experiment config with a linear model");
  or_cmd->add_option("--A", or_A, "JSON matrix, e.g. [[1,0],[0,-2]]");
  or_cmd->add_option("--B", or_B, "JSON matrix");
  or_cmd->add_option("--Q", or_Q, "JSON matrix (default identity)");
  or_cmd->add_option("--R", or_R, "JSON matrix (default identity)");

  CompareRequest cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "compare final run weights against a reference");
  cmp_cmd->add_option("--run", cmp.run_dir, "run output directory")->required();
  cmp_cmd->add_option("--reference", cmp.reference, "oracle, or a run directory / weights CSV")->capture_default_str();
  cmp_cmd->add_option("--tol", cmp.tol, "absolute per-component tolerance")->capture_default_str();

  std::string sw_preset, sw_config, sw_seeds;
  fs::path sw_out = "sweep";
  unsigned sw_jobs = 0;
  auto* sw_cmd = app.add_subcommand("sweep", "independent runs over several seeds, in parallel");
  sw_cmd->add_option("--preset", sw_preset, "case1, case2, case1_zero_init or case2_zero_init");
  sw_cmd->add_option("--config", sw_config, "experiment config (JSON)");
  sw_cmd->add_option("--seeds", sw_seeds, "comma-separated seeds")->required();
  sw_cmd->add_option("--out", sw_out, "parent output directory")->capture_default_str();
  sw_cmd->add_option("--jobs", sw_jobs, "parallel runs (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  if (*run_cmd) {
    if (!run_preset.empty()) run.preset = run_preset;
    if (!run_config.empty()) run.config_path = run_config;
    if (*seed_opt) run.seed = run_seed;
    if (*tf_opt) run.t_final = run_tfinal;
    if (freeze && no_freeze) {
      err << "config error: --freeze and --no-freeze are exclusive\n";
      return kConfigError;
    }
    if (freeze) run.freeze_after_t_off = true;
    if (no_freeze) run.freeze_after_t_off = false;
    if (!run_norm.empty()) run.normalization = run_norm;
    if (!run_cadence.empty()) run.cadence = run_cadence;
    return cmd_run(run, out, err);
  }
  if (*or_cmd) {
    if (!or_preset.empty()) oracle.preset = or_preset;
    if (!or_config.empty()) oracle.config_path = or_config;
    if (!or_A.empty()) oracle.A = or_A;
    if (!or_B.empty()) oracle.B = or_B;
    if (!or_Q.empty()) oracle.Q = or_Q;
    if (!or_R.empty()) oracle.R = or_R;
    return cmd_oracle(oracle, out, err);
  }
  if (*cmp_cmd) return cmd_compare(cmp, out, err);

  SweepRequest sweep;
  sweep.jobs = sw_jobs;
  std::stringstream ss(sw_seeds);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    RunManifest m;
    if (!sw_preset.empty()) m.preset = sw_preset;
    if (!sw_config.empty()) m.config_path = sw_config;
    try {
      m.seed = std::stoull(tok);
    } catch (const std::exception&) {
      err << "config error: bad seed '" << tok << "'\n";
      return kConfigError;
    }
    m.out_dir = sw_out / ("seed_" + tok);
    sweep.runs.push_back(std::move(m));
  }
  if (sweep.runs.empty()) {
    err << "config error: --seeds is empty\n";
    return kConfigError;
  }
  return cmd_sweep(sweep, out, err);
}

}  // namespace sirl::cli
