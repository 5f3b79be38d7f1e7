#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taeblp::cli {

enum ExitCode : int { kOk = 0, kCheckFailure = 1, kConfigError = 2 };

/// Flat run configuration assembled from a config file, key=value tokens and flags.
struct RunConfig {
  std::string experiment;
  double beta = 1.0;
  std::optional<double> rho;
  std::optional<double> theta;
  int ell = 0;
  int r = 0;
  bool window_given = false;
  std::string boundary = "theta";
  std::vector<double> t_grid;  ///< a single entry for fixed-time experiments
  std::uint64_t replicas = 0;
  std::uint64_t seed = 1;
  std::string out = "results";
  int omega_max = 40;
  double tail_tol = 1e-12;
  int margin = 10;
  double lam = 0.5;
  int z = 0;
  int truncation = 12;
  bool refresh_at_start = true;
};

/// Parse `key=value` lines; blank lines and `#` comments are skipped.
std::map<std::string, std::string> parse_key_values(std::istream& is);

/// Validate and convert; throws ConfigError.
RunConfig make_run_config(const std::map<std::string, std::string>& kv);

/// Entry point shared by the executable and the tests.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace taeblp::cli
