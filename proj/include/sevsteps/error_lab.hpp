#pragma once

// Monte Carlo strong-error estimators, rate fits, Gronwall checkers and
// empirical maximal-inequality constants.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sevsteps/fit.hpp"
#include "sevsteps/integrator.hpp"

namespace sevsteps {

/// Per-path errors e[m][j] = ||U_m(t_j) - U_m^j|| on a common grid.
struct ErrorSamples {
  std::vector<PathKey> keys;
  std::vector<std::vector<double>> errors;

  std::size_t paths() const noexcept { return errors.size(); }
  std::size_t points() const noexcept { return errors.empty() ? 0 : errors.front().size(); }
};

/// Errors of a coupled pair; throws if keys or grids differ.
std::vector<double> path_errors(const Trajectory& coarse, const Trajectory& reference);
ErrorSamples collect_errors(std::span<const Trajectory> coarse, std::span<const Trajectory> reference);

struct Estimate {
  double value = 0.0;
  double half_width = 0.0;  ///< 95% level; infinite for a single path
};

/// ((1/M) sum_m max_j e^p)^{1/p}
Estimate uniform_strong_error(const ErrorSamples& samples, double p);
/// max_j ((1/M) sum_m e_j^p)^{1/p}
Estimate pointwise_strong_error(const ErrorSamples& samples, double p);

/// (mean x_m)^{1/p} with a 95% half-width: normal approximation with the
/// delta method for M >= 100, percentile bootstrap (200 resamples) below.
Estimate moment_root(std::span<const double> powered, double p, std::uint64_t bootstrap_seed);

struct ErrorRow {
  double k = 0.0;
  std::size_t steps = 0;
  Estimate uniform;
  Estimate pointwise;
  std::size_t paths = 0;
  double p = 2.0;
  std::uint64_t seed = 0;
};

struct ErrorReport {
  std::string scheme;
  double horizon = 1.0;
  std::vector<ErrorRow> rows;
};

enum class RateModel { Plain, LogCorrected };
enum class ErrorKind { Uniform, Pointwise };

struct RateFit {
  RateModel model = RateModel::Plain;
  double rate = 0.0;  ///< slope (plain) or alpha (log-corrected)
  double c3 = 0.0;
  double c4 = 0.0;
  double rms_log_residual = 0.0;
  bool unreliable = false;  ///< errors not decreasing as k decreases
};

/// Needs at least four step sizes.
RateFit fit_rate(const ErrorReport& report, RateModel model, ErrorKind kind = ErrorKind::Uniform);

/// phi sampled at increasing times t_0 = 0 < t_1 < ..., read as a piecewise
/// linear function.  Throws std::invalid_argument if the hypothesis
/// phi(t) <= alpha + beta (int_0^t phi^2)^{1/2} fails at a sample; returns
/// whether phi(t) <= alpha (1 + beta^2 t)^{1/2} exp(1/2 + beta^2 t / 2) holds
/// at every sample.
bool check_continuous_gronwall(std::span<const double> times, std::span<const double> phi, double alpha, double beta);

/// Hypothesis phi_j <= alpha + beta (sum_{i<j} phi_i^2)^{1/2}; conclusion
/// phi_j <= alpha (1 + beta^2 j)^{1/2} exp(1/2 + beta^2 j / 2).
bool check_discrete_gronwall(std::span<const double> phi, double alpha, double beta);

struct MaximalCheck {
  double lhs = 0.0;    ///< (E max_j ||Z_j||^p)^{1/p}
  double rhs = 0.0;    ///< the integrand norm the constant multiplies
  double ratio = 0.0;  ///< lhs / rhs (0 when both vanish)
  double bound = 0.0;  ///< the constant the ratio must not exceed
  bool holds() const noexcept { return ratio <= bound; }
};

/// 10 sqrt(p) for a contraction semigroup on a Hilbert space.
double stochastic_maximal_constant(double p);
/// 10 p^2 / (p - 1) * 10 sqrt(p) + 10 sqrt(p).
double discrete_maximal_constant(double p);

/// Per-noise-mode multipliers q_n of an integrand: Q h = sum_n q_n h_n exp(i f_n x).
using AdaptedIntegrand = std::function<std::vector<Complex>(std::size_t step, const StateVector& partial_sum)>;
using DeterministicIntegrand = std::function<std::vector<Complex>(double t)>;

struct MaximalSetup {
  SpacePtr space;
  std::shared_ptr<const DiagonalGenerator> generator;
  std::shared_ptr<const NoiseModel> noise;  ///< mode layout and field type; eigenvalues unused
  double p = 2.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Z_j = R_k (Z_{j-1} + Q_{j-1} dW_j) over N steps; ratio of
/// (E max_j ||Z_j||^p)^{1/p} to (k sum_i ||Q_i||^2_{L^p(HS)})^{1/2}.
MaximalCheck empirical_discrete_maximal(const MaximalSetup& setup, const AdaptedIntegrand& integrand,
                                        const RationalScheme& scheme, double k, std::size_t steps);

/// Fine-grid Ito sums of int_0^t S(t-s) g(s) dW(s); ratio of
/// (E sup_t ||.||^p)^{1/p} to ||g||_{L^2(0,T;HS)}.
MaximalCheck empirical_stochastic_maximal(const MaximalSetup& setup, const DeterministicIntegrand& integrand,
                                          double horizon, std::size_t steps);

}  // namespace sevsteps
