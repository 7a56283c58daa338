#pragma once

// Flat "key = value" experiment configuration with command-line overrides.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sevsteps/integrator.hpp"

namespace sevsteps::cli {

struct ExperimentConfig {
  std::string problem = "linear";   ///< linear | nonlinear | custom
  std::string potential = "smooth"; ///< smooth | rough | zero
  double potential_bound = 1.0;
  std::vector<std::string> schemes{"ie", "cn"};
  double sigma = 0.0;
  int K = 32;
  int N_h = 0;                      ///< 0 selects 2K+1
  double lambda_decay = 2.0;
  double noise_scale = 1.0;
  std::string noise_field = "complex";
  std::string u0 = "2";             ///< decay exponent beta, or "rough"
  std::string phi = "zero";
  std::string psi = "identity";
  double T = 1.0;
  double p = 2.0;
  std::size_t M = 200;
  std::uint64_t seed = 1;
  std::vector<double> k_grid;
  double k_ref = 0.0;               ///< 0 selects min(k_grid) / 16
  std::vector<double> m_grid{1, 4, 16, 64, 256};
  double m_fixed = 16.0;
  std::vector<std::size_t> n_grid;  ///< step counts for the stability study
  double rate_min = 0.4;
  double rate_max = 0.6;
  double slack = 0.05;
  double stability_ratio = 2.0;
  std::size_t inequality_paths = 10000;
  std::size_t inequality_steps = 256;
  std::size_t inequality_fine_steps = 1024;
  std::size_t gronwall_cases = 1000;
  bool verify = false;
  std::filesystem::path output = "sevsteps_out";
  unsigned threads = 0;             ///< 0 defers to SEVSTEPS_THREADS, then the hardware

  /// Resolved key = value pairs in a fixed order, for manifests.
  std::vector<std::pair<std::string, std::string>> echo() const;
  /// min(k_grid) / 16 unless set explicitly.
  double reference_step() const;
  unsigned resolved_threads() const;
};

/// Parses "key = value" lines ('#' starts a comment).  Unknown keys and
/// malformed values throw ConfigurationError.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& file);

/// Applies raw pairs on top of the defaults and validates the result.
ExperimentConfig make_config(const std::map<std::string, std::string>& raw);

/// Accepts "0.125", "1/8" or "2^-3".
double parse_step(const std::string& text);

}  // namespace sevsteps::cli
