#include "sirl/config.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sirl/errors.hpp"

namespace sirl {

using nlohmann::json;

namespace {

// Lookup helpers that report the dotted path of whatever is missing or malformed.
const json& req(const json& obj, const std::string& path, const std::string& key) {
  const std::string full = path.empty() ? key : path + "." + key;
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(full, "missing required field");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

double num(const json& obj, const std::string& path, const std::string& key) {
  const json& v = req(obj, path, key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

std::string str(const json& obj, const std::string& path, const std::string& key) {
  const json& v = req(obj, path, key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& obj, const std::string& path, const std::string& key) {
  const json& v = req(obj, path, key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

Eigen::VectorXd vec(const json& v, const std::string& full) {
  if (!v.is_array()) throw ConfigError(full, "expected an array of numbers");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(full + "[" + std::to_string(i) + "]", "expected a number");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd mat(const json& v, const std::string& full) {
  if (v.is_number()) return Eigen::MatrixXd::Constant(1, 1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError(full, "expected a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw ConfigError(full, "expected an array of non-empty rows");
  Eigen::MatrixXd out(v.size(), cols);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string row = full + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols) throw ConfigError(row, "rows must have equal length");
    out.row(static_cast<Eigen::Index>(i)) = vec(v[i], row).transpose();
  }
  return out;
}

std::vector<Exponents> terms(const json& v, const std::string& full) {
  if (!v.is_array() || v.empty()) throw ConfigError(full, "expected a non-empty list of exponent vectors");
  std::vector<Exponents> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string item = full + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) throw ConfigError(item, "expected an exponent vector");
    Exponents e;
    for (const auto& k : v[i]) {
      if (!k.is_number_integer()) throw ConfigError(item, "exponents must be integers");
      e.push_back(k.get<int>());
    }
    out.push_back(std::move(e));
  }
  return out;
}

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return a;
}

const char* exploration_name(ExplorationKind k) {
  switch (k) {
    case ExplorationKind::None:
      return "none";
    case ExplorationKind::SumOfSines:
      return "sum_of_sines";
    case ExplorationKind::SaturatedProbe:
      return "saturated_probe";
  }
  return "none";
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.name = str(j, "", "name");

  const json& model = req(j, "", "model");
  const std::string kind = str(model, "model", "kind");
  if (kind == "linear") {
    cfg.model.kind = ModelKind::Linear;
    cfg.model.A = mat(req(model, "model", "A"), "model.A");
    cfg.model.B = mat(req(model, "model", "B"), "model.B");
  } else if (kind == "cos_gain") {
    cfg.model.kind = ModelKind::CosGain;
  } else {
    throw ConfigError("model.kind", "unknown model '" + kind + "' (expected linear or cos_gain)");
  }

  const json& omega = req(j, "", "omega");
  cfg.omega_lo = vec(req(omega, "omega", "lo"), "omega.lo");
  cfg.omega_hi = vec(req(omega, "omega", "hi"), "omega.hi");

  const json& cost = req(j, "", "cost");
  cfg.Q = mat(req(cost, "cost", "Q"), "cost.Q");
  cfg.r_diag = vec(req(cost, "cost", "r_diag"), "cost.r_diag");
  cfg.lambda = num(cost, "cost", "lambda");

  const json& basis = req(j, "", "basis");
  cfg.critic_terms = terms(req(basis, "basis", "critic"), "basis.critic");
  cfg.actor_terms = terms(req(basis, "basis", "actor"), "basis.actor");

  const json& learner = req(j, "", "learner");
  cfg.learner.alpha1 = num(learner, "learner", "alpha1");
  cfg.learner.alpha2 = num(learner, "learner", "alpha2");
  const json& y = req(learner, "learner", "Y");
  const int flat = static_cast<int>(cfg.actor_terms.size() * cfg.r_diag.size());
  if (y.is_object()) {
    const double s = num(y, "learner.Y", "scaled_identity");
    cfg.learner.Y = s * Eigen::MatrixXd::Identity(flat, flat);
  } else {
    cfg.learner.Y = mat(y, "learner.Y");
  }
  const std::string norm = str(learner, "learner", "normalization");
  if (norm == "single") {
    cfg.learner.normalization = Normalization::Single;
  } else if (norm == "double") {
    cfg.learner.normalization = Normalization::Double;
  } else {
    throw ConfigError("learner.normalization", "expected 'single' or 'double'");
  }
  const std::string cadence = str(learner, "learner", "update_cadence");
  if (cadence == "per_step") {
    cfg.learner.cadence = UpdateCadence::PerStep;
  } else if (cadence == "per_interval") {
    cfg.learner.cadence = UpdateCadence::PerInterval;
  } else {
    throw ConfigError("learner.update_cadence", "expected 'per_step' or 'per_interval'");
  }
  const std::string step = learner.contains("critic_step") ? str(learner, "learner", "critic_step") : "euler";
  if (step == "euler") {
    cfg.learner.critic_step = CriticStep::Euler;
  } else if (step == "exponential") {
    cfg.learner.critic_step = CriticStep::Exponential;
  } else {
    throw ConfigError("learner.critic_step", "expected 'euler' or 'exponential'");
  }
  cfg.freeze_after_t_off = boolean(learner, "learner", "freeze_after_t_off");

  const json& ex = req(j, "", "exploration");
  const std::string ekind = str(ex, "exploration", "kind");
  if (ekind == "none") {
    cfg.exploration.kind = ExplorationKind::None;
  } else if (ekind == "sum_of_sines") {
    cfg.exploration.kind = ExplorationKind::SumOfSines;
  } else if (ekind == "saturated_probe") {
    cfg.exploration.kind = ExplorationKind::SaturatedProbe;
  } else {
    throw ConfigError("exploration.kind", "expected none, sum_of_sines or saturated_probe");
  }
  if (cfg.exploration.kind != ExplorationKind::None) {
    const double count = num(ex, "exploration", "count");
    if (count != std::floor(count)) throw ConfigError("exploration.count", "must be an integer");
    cfg.exploration.count = static_cast<int>(count);
    cfg.exploration.freq_lo = num(ex, "exploration", "freq_lo");
    cfg.exploration.freq_hi = num(ex, "exploration", "freq_hi");
    cfg.exploration.scale = num(ex, "exploration", "scale");
  }

  const json& time = req(j, "", "time");
  cfg.h = num(time, "time", "h");
  cfg.learner.T = num(time, "time", "T");
  cfg.t_off = num(time, "time", "t_off");
  cfg.t_final = num(time, "time", "t_final");

  const json& init = req(j, "", "init");
  cfg.x0 = vec(req(init, "init", "x0"), "init.x0");
  const std::string w = str(init, "init", "weights");
  if (w == "zero") {
    cfg.init = WeightInit::Zero;
  } else if (w == "uniform") {
    cfg.init = WeightInit::Uniform;
    cfg.init_range = num(init, "init", "range");
  } else if (w == "stabilizing") {
    cfg.init = WeightInit::Stabilizing;
  } else if (w == "given") {
    cfg.init = WeightInit::Given;
    cfg.init_w_hat = vec(req(init, "init", "w_hat"), "init.w_hat");
    cfg.init_w_a2 = vec(req(init, "init", "w_a2"), "init.w_a2");
  } else {
    throw ConfigError("init.weights", "expected 'zero', 'uniform', 'stabilizing' or 'given'");
  }

  cfg.x_max = num(j, "", "x_max");
  cfg.max_resets = static_cast<int>(num(j, "", "max_resets"));
  const json& seed = req(j, "", "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    throw ConfigError("seed", "expected a non-negative integer");
  }
  cfg.seed = seed.get<std::uint64_t>();
  cfg.pe_window = static_cast<int>(num(j, "", "pe_window"));
  cfg.trajectory_every = static_cast<int>(num(req(j, "", "logging"), "logging", "trajectory_every"));

  if (j.contains("uub")) {
    const json& u = j["uub"];
    cfg.uub.window = num(u, "uub", "window");
    cfg.uub.state_norm_max = num(u, "uub", "state_norm_max");
    cfg.uub.weight_rel_band = num(u, "uub", "weight_rel_band");
    cfg.uub.weight_abs_floor = num(u, "uub", "weight_abs_floor");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (cfg.model.kind == ModelKind::Linear) {
    j["model"] = {{"kind", "linear"}, {"A", to_json(cfg.model.A)}, {"B", to_json(cfg.model.B)}};
  } else {
    j["model"] = {{"kind", "cos_gain"}};
  }
  j["omega"] = {{"lo", to_json(cfg.omega_lo)}, {"hi", to_json(cfg.omega_hi)}};
  j["cost"] = {{"Q", to_json(cfg.Q)}, {"r_diag", to_json(cfg.r_diag)}, {"lambda", cfg.lambda}};
  j["basis"] = {{"critic", cfg.critic_terms}, {"actor", cfg.actor_terms}};

  json y;
  const Eigen::Index flat = cfg.learner.Y.rows();
  const double y0 = flat > 0 ? cfg.learner.Y(0, 0) : 0.0;
  if (flat > 0 && cfg.learner.Y == y0 * Eigen::MatrixXd::Identity(flat, flat)) {
    y = {{"scaled_identity", y0}};
  } else {
    y = to_json(cfg.learner.Y);
  }
  j["learner"] = {
      {"alpha1", cfg.learner.alpha1},
      {"alpha2", cfg.learner.alpha2},
      {"Y", y},
      {"normalization", cfg.learner.normalization == Normalization::Single ? "single" : "double"},
      {"update_cadence", cfg.learner.cadence == UpdateCadence::PerStep ? "per_step" : "per_interval"},
      {"critic_step", cfg.learner.critic_step == CriticStep::Euler ? "euler" : "exponential"},
      {"freeze_after_t_off", cfg.freeze_after_t_off},
  };
  json ex = {{"kind", exploration_name(cfg.exploration.kind)}};
  if (cfg.exploration.kind != ExplorationKind::None) {
    ex["count"] = cfg.exploration.count;
    ex["freq_lo"] = cfg.exploration.freq_lo;
    ex["freq_hi"] = cfg.exploration.freq_hi;
    ex["scale"] = cfg.exploration.scale;
  }
  j["exploration"] = ex;
  j["time"] = {{"h", cfg.h}, {"T", cfg.learner.T}, {"t_off", cfg.t_off}, {"t_final", cfg.t_final}};
  j["init"] = {{"x0", to_json(cfg.x0)}};
  switch (cfg.init) {
    case WeightInit::Zero:
      j["init"]["weights"] = "zero";
      break;
    case WeightInit::Uniform:
      j["init"]["weights"] = "uniform";
      j["init"]["range"] = cfg.init_range;
      break;
    case WeightInit::Stabilizing:
      j["init"]["weights"] = "stabilizing";
      break;
    case WeightInit::Given:
      j["init"]["weights"] = "given";
      j["init"]["w_hat"] = to_json(cfg.init_w_hat);
      j["init"]["w_a2"] = to_json(cfg.init_w_a2);
      break;
  }
  j["x_max"] = cfg.x_max;
  j["max_resets"] = cfg.max_resets;
  j["seed"] = cfg.seed;
  j["pe_window"] = cfg.pe_window;
  j["logging"] = {{"trajectory_every", cfg.trajectory_every}};
  j["uub"] = {{"window", cfg.uub.window},
              {"state_norm_max", cfg.uub.state_norm_max},
              {"weight_rel_band", cfg.uub.weight_rel_band},
              {"weight_abs_floor", cfg.uub.weight_abs_floor}};
  return j;
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("SIRL_PRESET_DIR"); env != nullptr && *env != '\0') return env;
#ifdef SIRL_PRESET_DIR
  return SIRL_PRESET_DIR;
#else
  return "presets";
#endif
}

ExperimentConfig load_preset(const std::string& name) {
  static const char* const known[] = {"case1", "case2", "case1_zero_init", "case2_zero_init"};
  if (std::find(std::begin(known), std::end(known), name) == std::end(known)) {
    throw ConfigError("preset", "unknown preset '" + name + "' (case1, case2, case1_zero_init, case2_zero_init)");
  }
  return load_config(preset_dir() / (name + ".json"));
}

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b) {
  auto same_vec = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.size() == y.size() && x == y; };
  auto same_mat = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  const bool model_eq = a.model.kind == b.model.kind &&
                        (a.model.kind != ModelKind::Linear || (same_mat(a.model.A, b.model.A) && same_mat(a.model.B, b.model.B)));
  return a.name == b.name && model_eq && same_vec(a.omega_lo, b.omega_lo) && same_vec(a.omega_hi, b.omega_hi) &&
         same_mat(a.Q, b.Q) && same_vec(a.r_diag, b.r_diag) && a.lambda == b.lambda &&
         a.critic_terms == b.critic_terms && a.actor_terms == b.actor_terms && a.learner.alpha1 == b.learner.alpha1 &&
         a.learner.alpha2 == b.learner.alpha2 && same_mat(a.learner.Y, b.learner.Y) && a.learner.T == b.learner.T &&
         a.learner.normalization == b.learner.normalization && a.learner.cadence == b.learner.cadence &&
         a.learner.critic_step == b.learner.critic_step &&
         a.freeze_after_t_off == b.freeze_after_t_off && a.exploration.kind == b.exploration.kind &&
         a.exploration.count == b.exploration.count && a.exploration.freq_lo == b.exploration.freq_lo &&
         a.exploration.freq_hi == b.exploration.freq_hi && a.exploration.scale == b.exploration.scale && a.h == b.h &&
         a.t_off == b.t_off && a.t_final == b.t_final && same_vec(a.x0, b.x0) && a.init == b.init &&
         a.init_range == b.init_range && same_vec(a.init_w_hat, b.init_w_hat) &&
         same_vec(a.init_w_a2, b.init_w_a2) && a.x_max == b.x_max && a.max_resets == b.max_resets && a.seed == b.seed &&
         a.pe_window == b.pe_window && a.trajectory_every == b.trajectory_every && a.uub.window == b.uub.window &&
         a.uub.state_norm_max == b.uub.state_norm_max && a.uub.weight_rel_band == b.uub.weight_rel_band &&
         a.uub.weight_abs_floor == b.uub.weight_abs_floor;
}

}  // namespace sirl
