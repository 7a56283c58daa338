#include "sevsteps/error_lab.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sevsteps/parallel.hpp"
#include "sevsteps/philox.hpp"

namespace sevsteps {

std::vector<double> path_errors(const Trajectory& coarse, const Trajectory& reference) {
  if (!(coarse.key == reference.key)) {
    throw std::invalid_argument("path_errors: coarse and reference solutions are driven by different noise paths");
  }
  if (coarse.states.size() != reference.states.size() ||
      std::abs(coarse.step_size - reference.step_size) > 1e-12 * coarse.step_size) {
    throw std::invalid_argument("path_errors: coarse and reference grids differ; subsample the reference first");
  }
  std::vector<double> e(coarse.states.size());
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = norm(coarse.states[j] - reference.states[j]);
  return e;
}

ErrorSamples collect_errors(std::span<const Trajectory> coarse, std::span<const Trajectory> reference) {
  if (coarse.size() != reference.size()) throw std::invalid_argument("collect_errors: path counts differ");
  ErrorSamples out;
  for (std::size_t m = 0; m < coarse.size(); ++m) {
    out.keys.push_back(coarse[m].key);
    out.errors.push_back(path_errors(coarse[m], reference[m]));
  }
  return out;
}

Estimate moment_root(std::span<const double> powered, double p, std::uint64_t bootstrap_seed) {
  if (powered.empty()) throw std::invalid_argument("moment_root: no samples");
  if (!(p >= 1.0)) throw std::invalid_argument("moment_root: p must be >= 1");
  const double count = static_cast<double>(powered.size());
  const double mean = std::accumulate(powered.begin(), powered.end(), 0.0) / count;
  Estimate out{std::pow(mean, 1.0 / p), 0.0};
  if (powered.size() == 1) {
    out.half_width = std::numeric_limits<double>::infinity();
    return out;
  }
  if (mean == 0.0) return out;

  if (powered.size() >= 100) {
    double ss = 0.0;
    for (double x : powered) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (count - 1.0));
    const double hw_mean = 1.96 * sd / std::sqrt(count);
    out.half_width = hw_mean * std::pow(mean, 1.0 / p - 1.0) / p;
    return out;
  }

  constexpr std::uint64_t resamples = 200;
  const Philox4x32 rng = make_generator(bootstrap_seed, RngDomain::Bootstrap);
  std::vector<double> stats;
  stats.reserve(resamples);
  for (std::uint64_t b = 0; b < resamples; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < powered.size(); i += 2) {
      const auto [u1, u2] = rng.uniforms(b, i);
      sum += powered[std::min(powered.size() - 1, static_cast<std::size_t>(u1 * count))];
      if (i + 1 < powered.size()) sum += powered[std::min(powered.size() - 1, static_cast<std::size_t>(u2 * count))];
    }
    stats.push_back(std::pow(sum / count, 1.0 / p));
  }
  std::sort(stats.begin(), stats.end());
  const double lo = stats[static_cast<std::size_t>(0.025 * (resamples - 1) + 0.5)];
  const double hi = stats[static_cast<std::size_t>(0.975 * (resamples - 1) + 0.5)];
  // a degenerate resample spread still leaves a positive width
  out.half_width = std::max(0.5 * (hi - lo), std::numeric_limits<double>::min());
  return out;
}

namespace {

void validate(const ErrorSamples& samples, double p) {
  if (samples.paths() == 0) throw std::invalid_argument("strong error: no paths");
  if (samples.keys.size() != samples.paths()) throw std::invalid_argument("strong error: missing path keys");
  if (!(p >= 1.0)) throw std::invalid_argument("strong error: p must be >= 1");
  for (const auto& row : samples.errors) {
    if (row.size() != samples.points()) throw std::invalid_argument("strong error: ragged error table");
  }
}

std::uint64_t bootstrap_seed(const ErrorSamples& samples) {
  return mix_key(samples.keys.front().seed, samples.points());
}

}  // namespace

Estimate uniform_strong_error(const ErrorSamples& samples, double p) {
  validate(samples, p);
  std::vector<double> powered;
  powered.reserve(samples.paths());
  for (const auto& row : samples.errors) {
    const double worst = row.empty() ? 0.0 : *std::max_element(row.begin(), row.end());
    powered.push_back(std::pow(worst, p));
  }
  return moment_root(powered, p, bootstrap_seed(samples));
}

Estimate pointwise_strong_error(const ErrorSamples& samples, double p) {
  validate(samples, p);
  std::vector<double> powered(samples.paths());
  Estimate best{};
  bool first = true;
  for (std::size_t j = 0; j < samples.points(); ++j) {
    for (std::size_t m = 0; m < samples.paths(); ++m) powered[m] = std::pow(samples.errors[m][j], p);
    const Estimate e = moment_root(powered, p, bootstrap_seed(samples) + j);
    if (first || e.value > best.value) {
      best = e;
      first = false;
    }
  }
  return best;
}

RateFit fit_rate(const ErrorReport& report, RateModel model, ErrorKind kind) {
  if (report.rows.size() < 4) throw std::invalid_argument("fit_rate: need at least four step sizes");
  std::vector<ErrorRow> rows = report.rows;
  std::sort(rows.begin(), rows.end(), [](const ErrorRow& a, const ErrorRow& b) { return a.k > b.k; });
  std::vector<double> ks, es;
  RateFit out;
  out.model = model;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    const double e = kind == ErrorKind::Uniform ? row.uniform.value : row.pointwise.value;
    if (!(e < previous)) out.unreliable = true;
    previous = e;
    if (e > 0.0) {
      ks.push_back(row.k);
      es.push_back(e);
    }
  }
  if (ks.size() < 2) {
    out.unreliable = true;
    out.rate = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double slope = loglog_slope(ks, es);
  if (model == RateModel::Plain) {
    out.rate = slope;
    double ss = 0.0;
    const double mean_lk = std::accumulate(ks.begin(), ks.end(), 0.0, [](double a, double k) { return a + std::log(k); }) /
                           static_cast<double>(ks.size());
    const double mean_le = std::accumulate(es.begin(), es.end(), 0.0, [](double a, double e) { return a + std::log(e); }) /
                           static_cast<double>(es.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double r = std::log(es[i]) - (mean_le + slope * (std::log(ks[i]) - mean_lk));
      ss += r * r;
    }
    out.rms_log_residual = std::sqrt(ss / static_cast<double>(ks.size()));
    out.c3 = std::exp(mean_le - slope * mean_lk);
    return out;
  }
  if (ks.size() < 3) {
    out.unreliable = true;
    out.rate = slope;
    return out;
  }
  const LogCorrectedFit fit = fit_log_corrected(ks, es, report.horizon, std::clamp(slope, 0.05, 2.0));
  out.rate = fit.alpha;
  out.c3 = fit.c3;
  out.c4 = fit.c4;
  out.rms_log_residual = fit.rms_log_residual;
  return out;
}

namespace {

double gronwall_bound(double alpha, double beta, double s) {
  const double b2s = beta * beta * s;
  return alpha * std::sqrt(1.0 + b2s) * std::exp(0.5 + 0.5 * b2s);
}

void check_parameters(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw std::invalid_argument("gronwall: alpha and beta must be >= 0");
}

}  // namespace

bool check_continuous_gronwall(std::span<const double> times, std::span<const double> phi, double alpha, double beta) {
  check_parameters(alpha, beta);
  if (times.size() != phi.size() || times.empty()) throw std::invalid_argument("gronwall: sample size mismatch");
  if (times.front() != 0.0) throw std::invalid_argument("gronwall: samples must start at t = 0");
  double integral = 0.0;
  bool holds = true;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (i > 0) {
      const double dt = times[i] - times[i - 1];
      if (!(dt > 0.0)) throw std::invalid_argument("gronwall: times must increase");
      const double a = phi[i - 1], b = phi[i];
      integral += dt / 3.0 * (a * a + a * b + b * b);
    }
    if (!(phi[i] >= 0.0)) throw std::invalid_argument("gronwall: phi must be non-negative");
    const double hypothesis = alpha + beta * std::sqrt(integral);
    if (phi[i] > hypothesis + 1e-9 * std::max(1.0, hypothesis)) {
      throw std::invalid_argument("gronwall: hypothesis violated at sample " + std::to_string(i));
    }
    if (phi[i] > gronwall_bound(alpha, beta, times[i]) * (1.0 + 1e-12)) holds = false;
  }
  return holds;
}

bool check_discrete_gronwall(std::span<const double> phi, double alpha, double beta) {
  check_parameters(alpha, beta);
  double sum = 0.0;
  bool holds = true;
  for (std::size_t j = 0; j < phi.size(); ++j) {
    if (!(phi[j] >= 0.0)) throw std::invalid_argument("gronwall: phi must be non-negative");
    const double hypothesis = alpha + beta * std::sqrt(sum);
    if (phi[j] > hypothesis + 1e-9 * std::max(1.0, hypothesis)) {
      throw std::invalid_argument("gronwall: hypothesis violated at index " + std::to_string(j));
    }
    if (phi[j] > gronwall_bound(alpha, beta, static_cast<double>(j)) * (1.0 + 1e-12)) holds = false;
    sum += phi[j] * phi[j];
  }
  return holds;
}

double stochastic_maximal_constant(double p) { return 10.0 * std::sqrt(p); }

double discrete_maximal_constant(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("discrete_maximal_constant: p must be > 1");
  return 10.0 * p * p / (p - 1.0) * stochastic_maximal_constant(p) + 10.0 * std::sqrt(p);
}

namespace {

void validate_setup(const MaximalSetup& s) {
  if (!s.space || !s.generator || !s.noise) throw std::invalid_argument("maximal check: incomplete setup");
  if (s.paths == 0) throw std::invalid_argument("maximal check: need at least one path");
  if (!(s.p >= 2.0)) throw std::invalid_argument("maximal check: p must be >= 2");
  if (s.noise->mode_count() > s.space->size()) throw std::invalid_argument("maximal check: too many noise modes");
}

/// Squared HS norm of q into H^sigma.
double hs_squared(const MaximalSetup& s, std::span<const Complex> q) {
  if (q.size() != s.noise->mode_count()) throw std::invalid_argument("maximal check: integrand has wrong mode count");
  double total = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    const double f = s.noise->frequency(n);
    total += std::norm(q[n]) * std::pow(1.0 + f * f, s.space->sigma());
  }
  return total;
}

void inject(const MaximalSetup& s, StateVector& z, std::span<const Complex> q, std::span<const Complex> dW) {
  auto c = z.coeffs();
  const std::size_t offset = static_cast<std::size_t>(s.space->mode_cutoff() + s.noise->frequency(0));
  for (std::size_t n = 0; n < q.size(); ++n) c[offset + n] += q[n] * dW[n];
}

MaximalCheck finish(double lhs, double rhs, double bound) {
  MaximalCheck out{lhs, rhs, 0.0, bound};
  if (rhs > 0.0) {
    out.ratio = lhs / rhs;
  } else if (lhs > 0.0) {
    out.ratio = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace

MaximalCheck empirical_discrete_maximal(const MaximalSetup& setup, const AdaptedIntegrand& integrand,
                                        const RationalScheme& scheme, double k, std::size_t steps) {
  validate_setup(setup);
  if (steps == 0) throw std::invalid_argument("empirical_discrete_maximal: need at least one step");
  const DiagonalOperator rk = build_Rk(scheme, *setup.generator, k);
  if (rk.operator_norm() > 1.0 + kContractivityTolerance) {
    throw std::invalid_argument("empirical_discrete_maximal: scheme is not contractive");
  }
  const double horizon = k * static_cast<double>(steps);
  std::vector<double> max_powered(setup.paths);
  std::vector<std::vector<double>> hs_powered(setup.paths);

  parallel_for(setup.paths, setup.threads, [&](std::size_t m) {
    const NoisePath path = sample_path(*setup.noise, horizon, k, PathKey{setup.seed, m});
    StateVector z(setup.space);
    double worst = 0.0;
    auto& hs = hs_powered[m];
    hs.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
      const std::vector<Complex> q = integrand(i, z);
      hs[i] = std::pow(hs_squared(setup, q), 0.5 * setup.p);
      inject(setup, z, q, path.increment(i));
      rk.apply_in_place(z);
      worst = std::max(worst, norm(z));
    }
    max_powered[m] = std::pow(worst, setup.p);
  });

  const double count = static_cast<double>(setup.paths);
  const double lhs = std::pow(std::accumulate(max_powered.begin(), max_powered.end(), 0.0) / count, 1.0 / setup.p);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    double mean = 0.0;
    for (std::size_t m = 0; m < setup.paths; ++m) mean += hs_powered[m][i];
    sum_sq += std::pow(mean / count, 2.0 / setup.p);
  }
  return finish(lhs, std::sqrt(k * sum_sq), discrete_maximal_constant(setup.p));
}

MaximalCheck empirical_stochastic_maximal(const MaximalSetup& setup, const DeterministicIntegrand& integrand,
                                          double horizon, std::size_t steps) {
  validate_setup(setup);
  if (steps == 0 || !(horizon > 0.0)) throw std::invalid_argument("empirical_stochastic_maximal: empty grid");
  const double k = horizon / static_cast<double>(steps);
  const DiagonalOperator sk = semigroup_at(*setup.generator, k);
  std::vector<std::vector<Complex>> g(steps);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    g[i] = integrand(k * static_cast<double>(i));
    norm_sq += k * hs_squared(setup, g[i]);
  }
  std::vector<double> max_powered(setup.paths);
  parallel_for(setup.paths, setup.threads, [&](std::size_t m) {
    const NoisePath path = sample_path(*setup.noise, horizon, k, PathKey{setup.seed, m});
    StateVector z(setup.space);
    double worst = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      inject(setup, z, g[i], path.increment(i));
      sk.apply_in_place(z);
      worst = std::max(worst, norm(z));
    }
    max_powered[m] = std::pow(worst, setup.p);
  });
  const double lhs = std::pow(
      std::accumulate(max_powered.begin(), max_powered.end(), 0.0) / static_cast<double>(setup.paths), 1.0 / setup.p);
  return finish(lhs, std::sqrt(norm_sq), stochastic_maximal_constant(setup.p));
}

}  // namespace sevsteps
