#pragma once
/**
 * @file cli.hpp
 * @brief Batch front-end: experiment configuration and the subcommand runner.
 */
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace anisoag {

/// Every key has a command-line flag of the same name with '_' replaced by '-'.
struct ExperimentConfig {
  std::string command;
  nlohmann::json norm = "euclidean";  ///< short form ("lp:3") or a norm object
  int resolution = 1024;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string output;        ///< main artifact; stdout when empty
  std::string field_output;  ///< minimize: binary grid file of the final field

  double theta_minus = 0.1;
  double theta_plus = 0.7;
  int lp_nodes = 512;

  int grid = 64;
  double min_width = 1e-3;
  double max_width = 3.141592653589793;
  int limit_points = 8;

  double tol = 1e-8;

  int cells = 64;
  double cells_per_eps = 8.0;
  int max_iter = 2000;

  std::vector<double> eps_list = {0.1, 0.05, 0.025, 0.0125};

  double xi_theta = 0.0;
  std::vector<double> deltas = {0.2, 0.1, 0.05, 0.025};
  int lambda_nodes = 8192;
  int points = 100;

  bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Throws std::invalid_argument on unknown keys or wrongly typed values.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& s);
/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

/// Subcommands: norm-info, gamma-table, cost, cost-scan, verify-bounds, profile,
/// minimize, vortex-study, entropy-check. Returns 0 on success, 1 on input
/// errors and 2 on numerical failures. The resolved config and κ go to `log`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace anisoag
