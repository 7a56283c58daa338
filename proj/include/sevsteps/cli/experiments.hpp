#pragma once

// Experiment drivers behind the CLI commands.  Each returns structured
// results; the commands turn them into files and exit codes.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sevsteps/cli/config.hpp"
#include "sevsteps/error_lab.hpp"
#include "sevsteps/schrodinger.hpp"

namespace sevsteps::cli {

std::shared_ptr<const NoiseModel> build_noise(const ExperimentConfig& config);
StateVector build_initial_value(const ExperimentConfig& config, SpacePtr space);
PotentialSpec build_potential(const ExperimentConfig& config, SpacePtr space);
std::shared_ptr<const SemilinearProblem> build_problem(const ExperimentConfig& config);

/// Coupled Monte Carlo: one fine path per path index drives the reference
/// and every coarse run.  One report per scheme, rows ordered as k_grid.
std::vector<ErrorReport> coupled_error_reports(const SemilinearProblem& problem,
                                               const std::vector<std::string>& schemes,
                                               const std::vector<double>& k_grid, double k_ref,
                                               const ExperimentConfig& config);

/// pointwise <= uniform and uniform <= N^{1/p} pointwise (within two
/// half-widths) on every row.
struct OrderingCheck {
  bool pointwise_below_uniform = true;
  bool naive_bound = true;
};
OrderingCheck check_ordering(const ErrorReport& report);

/// values[i+1] < (1 + slack) values[i] for all i.
bool decreasing_with_slack(const std::vector<double>& values, double slack);
std::vector<double> uniform_values(const ErrorReport& report);

struct SchemeRates {
  ErrorReport report;
  bool exact = false;   ///< every error at round-off level
  bool fitted = false;  ///< at least four step sizes
  RateFit plain;
  RateFit log_corrected;
  RateFit pointwise_plain;
  std::optional<SqrtLogFit> sqrt_log;  ///< splitting scheme only
  bool in_band = true;
};

struct RatesResult {
  std::vector<SchemeRates> schemes;
  bool ordering_ok = true;
  bool passed = true;
};
RatesResult run_rates(const ExperimentConfig& config);

struct QualitativeResult {
  std::vector<ErrorReport> reports;
  std::vector<bool> decreasing;
  bool ordering_ok = true;
  bool passed = true;
};
QualitativeResult run_qualitative(const ExperimentConfig& config);

struct RegularisationRow {
  double m = 0.0;
  Estimate sup_difference;  ///< || sup_t ||U(t) - U_m(t)|| ||_p between references
  double initial_defect = 0.0;
};

struct RegularisationResult {
  std::vector<RegularisationRow> rows;
  int inversions = 0;
  bool monotone_ok = true;
  ErrorReport lifted;  ///< discretisation error of the m_fixed problem
  bool lifted_decreasing = true;
  bool ordering_ok = true;
  bool passed = true;
};
RegularisationResult run_regularisation(const ExperimentConfig& config);

struct InequalityRow {
  std::string name;
  MaximalCheck check;
};

struct InequalitiesResult {
  std::vector<InequalityRow> maximal;
  std::size_t gronwall_cases = 0;
  std::size_t continuous_violations = 0;
  std::size_t discrete_violations = 0;
  std::size_t hypothesis_rejections = 0;
  bool passed = true;
};
InequalitiesResult run_inequalities(const ExperimentConfig& config);

struct StabilityRow {
  std::size_t steps = 0;
  double k = 0.0;
  Estimate moment;  ///< || max_j ||U^j|| ||_p
};

struct SchemeStability {
  std::string scheme;
  std::vector<StabilityRow> rows;
  double ratio = 0.0;  ///< max / min over the step grid
};

struct StabilityResult {
  std::vector<SchemeStability> schemes;
  bool passed = true;
};
StabilityResult run_stability(const ExperimentConfig& config);

/// Random piecewise-linear functions meeting the continuous Gronwall
/// hypothesis with equality at the knots, and sequences meeting the discrete
/// one with equality.
struct GronwallCase {
  std::vector<double> times;
  std::vector<double> phi;
  double alpha = 0.0;
  double beta = 0.0;
};
GronwallCase continuous_gronwall_case(std::uint64_t seed, std::uint64_t index);
GronwallCase discrete_gronwall_case(std::uint64_t seed, std::uint64_t index);

}  // namespace sevsteps::cli
