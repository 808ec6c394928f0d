#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace netspectra::cli {

struct RunConfig {
  double alpha = 0.85;
  double lambda_min = 0.1;
  std::size_t krylov_dim = 600;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t max_restarts = 64;
  std::size_t l_max = 30;
  std::size_t fit_lo = 1;
  std::size_t fit_hi = 10;
  std::size_t n_cells = 307;
  std::size_t max_states = 64;
  std::vector<double> thresholds{0.25, 0.1};
};

nlohmann::json config_to_json(const RunConfig& config);

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 iff every requested output was written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netspectra::cli
