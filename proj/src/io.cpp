#include "sirl/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sirl/errors.hpp"

namespace sirl {

namespace {

void put_vec(std::ostream& os, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << v(i);
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const RunResult& result, int n, int m) {
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  for (int i = 1; i <= m; ++i) os << ",u" << i;
  for (int i = 1; i <= m; ++i) os << ",e" << i;
  os << ",running_cost\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : result.trajectory) {
    os << r.t;
    put_vec(os, r.x);
    put_vec(os, r.u);
    put_vec(os, r.e);
    os << ',' << r.running_cost << '\n';
  }
}

void write_weights_csv(std::ostream& os, const RunResult& result, int n_c, int actor_flat) {
  os << "t";
  for (int i = 0; i < n_c; ++i) os << ",wc_" << i;
  for (int i = 0; i < actor_flat; ++i) os << ",wa1_" << i;
  for (int i = 0; i < actor_flat; ++i) os << ",wa2_" << i;
  os << ",abs_E,pe_min_eig\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : result.weights) {
    os << r.t;
    put_vec(os, r.w_hat);
    put_vec(os, r.w_a2);
    os << ',' << r.abs_bellman << ',' << r.pe_min_eig << '\n';
  }
}

Eigen::VectorXd WeightsTable::last(const std::string& prefix) const {
  if (rows.empty()) throw ConfigError("weights.csv", "no rows");
  std::vector<double> vals;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind(prefix, 0) == 0) vals.push_back(rows.back().at(c));
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

WeightsTable read_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  WeightsTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("", path.string() + " is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("", path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != table.header.size()) {
      throw ConfigError("", path.string() + ":" + std::to_string(lineno) + ": column count mismatch");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.empty() || line[0] == '#') continue;
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

}  // namespace sirl
