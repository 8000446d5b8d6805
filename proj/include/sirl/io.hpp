#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sirl/simulator.hpp"

namespace sirl {

// t, x1..xn, u1..um, e1..em, running_cost
void write_trajectory_csv(std::ostream& os, const RunResult& result, int n, int m);
// t, wc_*, wa1_*, wa2_*, abs_E, pe_min_eig
void write_weights_csv(std::ostream& os, const RunResult& result, int n_c, int actor_flat);

struct WeightsTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Columns whose header starts with `prefix`, taken from the last row.
  Eigen::VectorXd last(const std::string& prefix) const;
};

WeightsTable read_weights_csv(const std::filesystem::path& path);

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

}  // namespace sirl
