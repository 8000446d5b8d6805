#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sirl::cli {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,  // a comparison ran and did not pass
  kConfigError = 2,
  kDivergence = 3,
  kNumericFailure = 4,
};

struct RunManifest {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = "run";
  std::optional<std::uint64_t> seed;
  std::optional<double> t_final;
  std::optional<bool> freeze_after_t_off;
  std::optional<std::string> normalization;  // single | double
  std::optional<std::string> cadence;        // per_step | per_interval
};

int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

struct OracleRequest {
  std::optional<std::string> preset;
  std::optional<std::filesystem::path> config_path;
  // JSON matrices, e.g. "[[1,0],[0,-2]]"; a bare number means a 1x1 matrix.
  std::optional<std::string> A, B, Q, R;
};

int cmd_oracle(const OracleRequest& req, std::ostream& out, std::ostream& err);

struct CompareRequest {
  std::filesystem::path run_dir;
  std::string reference = "oracle";  // "oracle" or a path to a weights CSV / run directory
  double tol = 0.05;
};

int cmd_compare(const CompareRequest& req, std::ostream& out, std::ostream& err);

struct SweepRequest {
  std::vector<RunManifest> runs;
  unsigned jobs = 0;  // 0: hardware concurrency
};

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sirl::cli
