#pragma once

#include <span>

namespace sevsteps {

/// Unweighted least-squares slope of log(errors) against log(steps).
/// Requires at least two points with positive errors.
double loglog_slope(std::span<const double> steps, std::span<const double> errors);

/// Parameters of the model e(k) = (c3 + c4 log(T/k)) k^alpha.
struct LogCorrectedFit {
  double c3 = 0.0;
  double c4 = 0.0;
  double alpha = 0.0;
  /// Root mean square of the log residuals at the optimum.
  double rms_log_residual = 0.0;
};

/// Minimises the squared log residuals of the log-corrected power law with
/// alpha constrained to (0, 2] and c3, c4 >= 0.  Damped Gauss-Newton started
/// from alpha = initial_alpha.
LogCorrectedFit fit_log_corrected(std::span<const double> steps, std::span<const double> errors, double horizon,
                                  double initial_alpha);

/// Least-squares constant c in e(k) = c (1 + sqrt(log(T/k))) k^{1/2}, with the
/// rms log residual.  Informational fit for the splitting scheme.
struct SqrtLogFit {
  double constant = 0.0;
  double rms_log_residual = 0.0;
};
SqrtLogFit fit_sqrt_log_half(std::span<const double> steps, std::span<const double> errors, double horizon);

}  // namespace sevsteps
