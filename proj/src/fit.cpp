#include "sevsteps/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sevsteps {

double loglog_slope(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  if (steps.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  const auto n = static_cast<double>(steps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || !(errors[i] > 0.0)) throw std::invalid_argument("loglog_slope: non-positive data");
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("loglog_slope: degenerate step sizes");
  return (n * sxy - sx * sy) / denom;
}

namespace {

struct Problem {
  std::vector<double> log_k, log_e, log_ratio;
};

double objective(const Problem& p, const Eigen::Vector3d& theta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.log_k.size(); ++i) {
    const double scale = theta[1] + theta[2] * p.log_ratio[i];
    if (!(scale > 0.0)) return std::numeric_limits<double>::infinity();
    const double r = p.log_e[i] - std::log(scale) - theta[0] * p.log_k[i];
    sum += r * r;
  }
  return sum;
}

void clamp(Eigen::Vector3d& theta) {
  theta[0] = std::clamp(theta[0], 1e-8, 2.0);
  theta[1] = std::max(theta[1], 0.0);
  theta[2] = std::max(theta[2], 0.0);
}

// c3, c4 from a linear fit of e / k^alpha against log(T/k).
Eigen::Vector3d initial_guess(const Problem& p, double alpha) {
  const std::size_t n = p.log_k.size();
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  double log_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    design(static_cast<Eigen::Index>(i), 0) = 1.0;
    design(static_cast<Eigen::Index>(i), 1) = p.log_ratio[i];
    const double y = std::exp(p.log_e[i] - alpha * p.log_k[i]);
    rhs(static_cast<Eigen::Index>(i)) = y;
    log_mean += std::log(y) / static_cast<double>(n);
  }
  Eigen::Vector2d c = design.colPivHouseholderQr().solve(rhs);
  if (c[0] <= 0.0 || c[1] < 0.0) {
    c[0] = std::exp(log_mean);
    c[1] = 0.0;
  }
  return {alpha, c[0], c[1]};
}

Eigen::Vector3d levenberg_marquardt(const Problem& p, Eigen::Vector3d theta) {
  double lambda = 1e-3;
  double current = objective(p, theta);
  const std::size_t n = p.log_k.size();
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::MatrixXd jac(n, 3);
    Eigen::VectorXd res(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double scale = theta[1] + theta[2] * p.log_ratio[i];
      res(row) = p.log_e[i] - std::log(scale) - theta[0] * p.log_k[i];
      jac(row, 0) = -p.log_k[i];
      jac(row, 1) = -1.0 / scale;
      jac(row, 2) = -p.log_ratio[i] / scale;
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d grad = jac.transpose() * res;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::Matrix3d damped = jtj;
      for (int d = 0; d < 3; ++d) damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      Eigen::Vector3d candidate = theta - damped.ldlt().solve(grad);
      clamp(candidate);
      const double value = objective(p, candidate);
      if (value < current) {
        const double gain = current - value;
        theta = candidate;
        current = value;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = gain > 1e-30;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return theta;
}

}  // namespace

LogCorrectedFit fit_log_corrected(std::span<const double> steps, std::span<const double> errors, double horizon,
                                  double initial_alpha) {
  if (steps.size() != errors.size()) throw std::invalid_argument("fit_log_corrected: size mismatch");
  if (steps.size() < 3) throw std::invalid_argument("fit_log_corrected: need at least three points");
  Problem p;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || !(errors[i] > 0.0)) throw std::invalid_argument("fit_log_corrected: non-positive data");
    p.log_k.push_back(std::log(steps[i]));
    p.log_e.push_back(std::log(errors[i]));
    p.log_ratio.push_back(std::log(horizon / steps[i]));
  }

  // Primary start from the plain slope; a coarse ladder of restarts guards
  // against the flat valley between c4 and alpha.
  std::vector<double> starts{std::clamp(initial_alpha, 1e-3, 2.0)};
  for (double a = 0.25; a <= 2.0; a += 0.25) starts.push_back(a);

  Eigen::Vector3d best = initial_guess(p, starts.front());
  double best_value = std::numeric_limits<double>::infinity();
  for (double a : starts) {
    Eigen::Vector3d theta = levenberg_marquardt(p, initial_guess(p, a));
    const double value = objective(p, theta);
    if (value < best_value * (1.0 - 1e-12)) {
      best_value = value;
      best = theta;
    }
  }
  LogCorrectedFit fit;
  fit.alpha = best[0];
  fit.c3 = best[1];
  fit.c4 = best[2];
  fit.rms_log_residual = std::sqrt(best_value / static_cast<double>(steps.size()));
  return fit;
}

SqrtLogFit fit_sqrt_log_half(std::span<const double> steps, std::span<const double> errors, double horizon) {
  if (steps.size() != errors.size() || steps.empty()) throw std::invalid_argument("fit_sqrt_log_half: bad data");
  // log e = log c + log((1 + sqrt(log(T/k))) k^{1/2}); c is the mean offset.
  std::vector<double> offsets;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double shape = (1.0 + std::sqrt(std::max(0.0, std::log(horizon / steps[i])))) * std::sqrt(steps[i]);
    offsets.push_back(std::log(errors[i]) - std::log(shape));
  }
  double mean = 0.0;
  for (double o : offsets) mean += o / static_cast<double>(offsets.size());
  double ss = 0.0;
  for (double o : offsets) ss += (o - mean) * (o - mean);
  return {std::exp(mean), std::sqrt(ss / static_cast<double>(offsets.size()))};
}

}  // namespace sevsteps
