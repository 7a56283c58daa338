#include "sevsteps/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sevsteps/parallel.hpp"
#include "sevsteps/philox.hpp"
#include "sevsteps/regularise.hpp"

namespace sevsteps::cli {

namespace {

std::size_t ratio_count(double coarse, double fine) {
  return static_cast<std::size_t>(std::llround(coarse / fine));
}

std::vector<RationalScheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<RationalScheme> out;
  for (const auto& n : names) out.push_back(RationalScheme::from_name(n));
  return out;
}

void require_k_grid(const ExperimentConfig& config) {
  if (config.k_grid.empty()) throw ConfigurationError("k_grid must list at least one step size");
}

ErrorRow make_row(const ErrorSamples& samples, double k, double horizon, const ExperimentConfig& config) {
  ErrorRow row;
  row.k = k;
  row.steps = step_count(horizon, k);
  row.uniform = uniform_strong_error(samples, config.p);
  row.pointwise = pointwise_strong_error(samples, config.p);
  row.paths = samples.paths();
  row.p = config.p;
  row.seed = config.seed;
  return row;
}

std::vector<PathKey> path_keys(const ExperimentConfig& config) {
  std::vector<PathKey> keys(config.M);
  for (std::size_t m = 0; m < config.M; ++m) keys[m] = PathKey{config.seed, m};
  return keys;
}

}  // namespace

std::shared_ptr<const NoiseModel> build_noise(const ExperimentConfig& config) {
  const int modes = config.N_h == 0 ? 2 * config.K + 1 : config.N_h;
  const NoiseField field = config.noise_field == "real" ? NoiseField::Real : NoiseField::Complex;
  return std::make_shared<const NoiseModel>(
      NoiseModel::fourier_decay((modes - 1) / 2, config.lambda_decay, config.noise_scale, field));
}

StateVector build_initial_value(const ExperimentConfig& config, SpacePtr space) {
  if (config.u0 == "rough") return rough_initial_data(std::move(space), config.seed);
  return smooth_data(std::move(space), std::stod(config.u0));
}

PotentialSpec build_potential(const ExperimentConfig& config, SpacePtr space) {
  if (config.potential == "rough") return rough_potential(std::move(space), config.seed, config.potential_bound);
  if (config.potential == "zero") return zero_potential(std::move(space));
  return default_smooth_potential(std::move(space));
}

std::shared_ptr<const SemilinearProblem> build_problem(const ExperimentConfig& config) {
  const SpacePtr space = SpectralSpace::make(config.K, config.sigma);
  const auto noise = build_noise(config);
  const StateVector u0 = build_initial_value(config, space);
  const PotentialSpec v = build_potential(config, space);
  if (config.problem == "custom") return std::make_shared<const SemilinearProblem>(build_additive(v, noise, u0, config.T));
  if (config.problem == "nonlinear") {
    return std::make_shared<const SemilinearProblem>(build_nonlinear(
        LipschitzMap::from_name(config.phi), LipschitzMap::from_name(config.psi), v, noise, u0, config.T));
  }
  return std::make_shared<const SemilinearProblem>(build_linear(v, noise, u0, config.T));
}

std::vector<ErrorReport> coupled_error_reports(const SemilinearProblem& problem,
                                               const std::vector<std::string>& scheme_names,
                                               const std::vector<double>& k_grid, double k_ref,
                                               const ExperimentConfig& config) {
  if (k_grid.empty()) throw ConfigurationError("k_grid must list at least one step size");
  const auto schemes = parse_schemes(scheme_names);
  const double k_min = *std::min_element(k_grid.begin(), k_grid.end());
  const std::size_t ref_stride = ratio_count(k_min, k_ref);
  const std::size_t nk = k_grid.size();
  const std::size_t ns = schemes.size();
  const double horizon = problem.horizon();

  // errors[m][s * nk + ki] = per-time errors of path m
  std::vector<std::vector<std::vector<double>>> errors(config.M);
  RunOptions options;
  options.verify_variation_of_constants = config.verify;

  parallel_for(config.M, config.resolved_threads(), [&](std::size_t m) {
    const PathKey key{config.seed, m};
    const NoisePath fine = sample_path(problem.noise(), horizon, k_ref, key);
    const Trajectory reference = run_reference(problem, k_ref, fine, ref_stride);
    auto& slot = errors[m];
    slot.resize(ns * nk);
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const double k = k_grid[ki];
      const NoisePath coarse = fine.coarsen(ratio_count(k, k_ref));
      const Trajectory ref_k = reference.subsample(ratio_count(k, k_min));
      for (std::size_t s = 0; s < ns; ++s) {
        const Trajectory approx = run_discrete(problem, schemes[s], k, coarse, options);
        slot[s * nk + ki] = path_errors(approx, ref_k);
      }
    }
  });

  std::vector<ErrorReport> reports;
  const auto keys = path_keys(config);
  for (std::size_t s = 0; s < ns; ++s) {
    ErrorReport report;
    report.scheme = std::string(schemes[s].name());
    report.horizon = horizon;
    for (std::size_t ki = 0; ki < nk; ++ki) {
      ErrorSamples samples;
      samples.keys = keys;
      samples.errors.reserve(config.M);
      for (std::size_t m = 0; m < config.M; ++m) samples.errors.push_back(std::move(errors[m][s * nk + ki]));
      report.rows.push_back(make_row(samples, k_grid[ki], horizon, config));
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

OrderingCheck check_ordering(const ErrorReport& report) {
  OrderingCheck out;
  for (const auto& r : report.rows) {
    if (r.pointwise.value > r.uniform.value * (1.0 + 1e-12)) out.pointwise_below_uniform = false;
    const double scale = std::pow(static_cast<double>(r.steps), 1.0 / r.p);
    const double slack = 2.0 * (r.uniform.half_width + scale * r.pointwise.half_width);
    if (r.uniform.value > scale * r.pointwise.value + slack) out.naive_bound = false;
  }
  return out;
}

bool decreasing_with_slack(const std::vector<double>& values, double slack) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < (1.0 + slack) * values[i - 1])) return false;
  }
  return true;
}

std::vector<double> uniform_values(const ErrorReport& report) {
  std::vector<double> out;
  for (const auto& r : report.rows) out.push_back(r.uniform.value);
  return out;
}

RatesResult run_rates(const ExperimentConfig& config) {
  require_k_grid(config);
  const auto problem = build_problem(config);
  std::vector<double> ks = config.k_grid;
  std::sort(ks.begin(), ks.end(), std::greater<>());
  const auto reports = coupled_error_reports(*problem, config.schemes, ks, config.reference_step(), config);
  RatesResult result;
  for (const auto& report : reports) {
    SchemeRates s;
    s.report = report;
    s.exact = std::all_of(report.rows.begin(), report.rows.end(), [](const ErrorRow& r) { return r.uniform.value <= 1e-12; });
    s.fitted = !s.exact && report.rows.size() >= 4;
    if (s.fitted) {
      s.plain = fit_rate(report, RateModel::Plain, ErrorKind::Uniform);
      s.log_corrected = fit_rate(report, RateModel::LogCorrected, ErrorKind::Uniform);
      s.pointwise_plain = fit_rate(report, RateModel::Plain, ErrorKind::Pointwise);
      if (report.scheme == "ee") {
        std::vector<double> k, e;
        for (const auto& r : report.rows) {
          k.push_back(r.k);
          e.push_back(r.uniform.value);
        }
        s.sqrt_log = fit_sqrt_log_half(k, e, report.horizon);
      }
      s.in_band = s.plain.rate >= config.rate_min && s.plain.rate <= config.rate_max;
    }
    const OrderingCheck order = check_ordering(report);
    result.ordering_ok = result.ordering_ok && order.pointwise_below_uniform && order.naive_bound;
    result.passed = result.passed && s.in_band;
    result.schemes.push_back(std::move(s));
  }
  result.passed = result.passed && result.ordering_ok;
  return result;
}

QualitativeResult run_qualitative(const ExperimentConfig& config) {
  require_k_grid(config);
  const auto problem = build_problem(config);
  std::vector<double> ks = config.k_grid;
  std::sort(ks.begin(), ks.end(), std::greater<>());
  QualitativeResult result;
  result.reports = coupled_error_reports(*problem, config.schemes, ks, config.reference_step(), config);
  for (const auto& report : result.reports) {
    const bool dec = decreasing_with_slack(uniform_values(report), config.slack);
    result.decreasing.push_back(dec);
    const OrderingCheck order = check_ordering(report);
    result.ordering_ok = result.ordering_ok && order.pointwise_below_uniform && order.naive_bound;
    result.passed = result.passed && dec;
  }
  result.passed = result.passed && result.ordering_ok;
  return result;
}

RegularisationResult run_regularisation(const ExperimentConfig& config) {
  require_k_grid(config);
  if (config.m_grid.empty()) throw ConfigurationError("m_grid must not be empty");
  const auto problem = build_problem(config);
  std::vector<double> ks = config.k_grid;
  std::sort(ks.begin(), ks.end(), std::greater<>());
  const double k_ref = config.reference_step();
  const double k_min = ks.back();
  const std::size_t ref_stride = ratio_count(k_min, k_ref);
  const double horizon = problem->horizon();

  std::vector<std::shared_ptr<const SemilinearProblem>> lifted;
  for (double m : config.m_grid) lifted.push_back(std::make_shared<const SemilinearProblem>(lift_problem(*problem, m)));
  const auto fixed_it = std::find(config.m_grid.begin(), config.m_grid.end(), config.m_fixed);
  const auto fixed_index = static_cast<std::size_t>(fixed_it - config.m_grid.begin());
  const auto fixed = fixed_it != config.m_grid.end() ? lifted[fixed_index]
                                                     : std::make_shared<const SemilinearProblem>(
                                                           lift_problem(*problem, config.m_fixed));
  const RationalScheme scheme = RationalScheme::from_name(config.schemes.front());
  const std::size_t nm = config.m_grid.size();
  const std::size_t nk = ks.size();

  std::vector<std::vector<double>> sup_powered(nm, std::vector<double>(config.M));
  std::vector<std::vector<std::vector<double>>> lifted_errors(config.M);

  parallel_for(config.M, config.resolved_threads(), [&](std::size_t m) {
    const PathKey key{config.seed, m};
    const NoisePath fine = sample_path(problem->noise(), horizon, k_ref, key);
    const Trajectory reference = run_reference(*problem, k_ref, fine, ref_stride);
    std::optional<Trajectory> fixed_reference;
    for (std::size_t i = 0; i < nm; ++i) {
      Trajectory lifted_ref = run_reference(*lifted[i], k_ref, fine, ref_stride);
      const auto diff = path_errors(lifted_ref, reference);
      sup_powered[i][m] = std::pow(*std::max_element(diff.begin(), diff.end()), config.p);
      if (i == fixed_index) fixed_reference = std::move(lifted_ref);
    }
    if (!fixed_reference) fixed_reference = run_reference(*fixed, k_ref, fine, ref_stride);
    auto& slot = lifted_errors[m];
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const NoisePath coarse = fine.coarsen(ratio_count(ks[ki], k_ref));
      const Trajectory approx = run_discrete(*fixed, scheme, ks[ki], coarse);
      slot.push_back(path_errors(approx, fixed_reference->subsample(ratio_count(ks[ki], k_min))));
    }
  });

  RegularisationResult result;
  const StateVector u0 = problem->initial_value(PathKey{config.seed, 0});
  for (std::size_t i = 0; i < nm; ++i) {
    RegularisationRow row;
    row.m = config.m_grid[i];
    row.sup_difference = moment_root(sup_powered[i], config.p, mix_key(config.seed, i));
    row.initial_defect = yosida_defect(u0, problem->generator(), row.m);
    result.rows.push_back(row);
  }
  for (std::size_t i = 1; i < nm; ++i) {
    const auto& prev = result.rows[i - 1].sup_difference;
    const auto& cur = result.rows[i].sup_difference;
    if (cur.value > prev.value) {
      ++result.inversions;
      if (cur.value - prev.value > prev.half_width + cur.half_width) result.monotone_ok = false;
    }
  }
  if (result.inversions > 1) result.monotone_ok = false;

  result.lifted.scheme = std::string(scheme.name());
  result.lifted.horizon = horizon;
  const auto keys = path_keys(config);
  for (std::size_t ki = 0; ki < nk; ++ki) {
    ErrorSamples samples;
    samples.keys = keys;
    for (std::size_t m = 0; m < config.M; ++m) samples.errors.push_back(std::move(lifted_errors[m][ki]));
    result.lifted.rows.push_back(make_row(samples, ks[ki], horizon, config));
  }
  result.lifted_decreasing = decreasing_with_slack(uniform_values(result.lifted), config.slack);
  const OrderingCheck order = check_ordering(result.lifted);
  result.ordering_ok = order.pointwise_below_uniform && order.naive_bound;
  result.passed = result.monotone_ok && result.lifted_decreasing && result.ordering_ok;
  return result;
}

GronwallCase continuous_gronwall_case(std::uint64_t seed, std::uint64_t index) {
  const Philox4x32 rng = make_generator(seed, RngDomain::Probe);
  const std::uint64_t stream = index | (std::uint64_t{1} << 62);
  std::uint64_t counter = 0;
  auto uniform = [&] { return rng.uniforms(stream, counter++).first; };

  GronwallCase c;
  c.alpha = index % 100 == 0 ? 0.0 : 0.1 + 1.9 * uniform();
  const double horizon = 0.05 + 2.95 * uniform();
  c.beta = std::sqrt(2.5 * uniform() / horizon);
  const std::size_t knots = 20 + static_cast<std::size_t>(40 * uniform());
  std::vector<double> cuts{0.0, horizon};
  for (std::size_t i = 0; i + 1 < knots; ++i) cuts.push_back(horizon * uniform());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  c.times = cuts;

  // phi_i solves phi_i = alpha + beta (I_{i-1} + dt/3 (a^2 + a phi_i + phi_i^2))^{1/2}
  c.phi.push_back(c.alpha);
  double integral = 0.0;
  const double b2 = c.beta * c.beta;
  for (std::size_t i = 1; i < c.times.size(); ++i) {
    const double dt = c.times[i] - c.times[i - 1];
    const double a = c.phi.back();
    const double w = b2 * dt / 3.0;
    const double qa = 1.0 - w;
    const double qb = -(2.0 * c.alpha + w * a);
    const double qc = c.alpha * c.alpha - b2 * integral - w * a * a;
    const double x = (-qb + std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc))) / (2.0 * qa);
    integral += dt / 3.0 * (a * a + a * x + x * x);
    c.phi.push_back(x);
  }
  return c;
}

GronwallCase discrete_gronwall_case(std::uint64_t seed, std::uint64_t index) {
  const Philox4x32 rng = make_generator(seed, RngDomain::Probe);
  const std::uint64_t stream = index | (std::uint64_t{3} << 61);
  std::uint64_t counter = 0;
  auto uniform = [&] { return rng.uniforms(stream, counter++).first; };

  GronwallCase c;
  c.alpha = index % 100 == 0 ? 0.0 : 0.1 + 1.9 * uniform();
  c.beta = uniform();
  const std::size_t length = 20 + static_cast<std::size_t>(80 * uniform());
  double sum = 0.0;
  for (std::size_t j = 0; j < length; ++j) {
    const double v = c.alpha + c.beta * std::sqrt(sum);
    c.phi.push_back(v);
    c.times.push_back(static_cast<double>(j));
    sum += v * v;
  }
  return c;
}

InequalitiesResult run_inequalities(const ExperimentConfig& config) {
  const SpacePtr space = SpectralSpace::make(config.K, config.sigma);
  const auto generator = std::make_shared<const DiagonalGenerator>(DiagonalGenerator::schrodinger(space));
  const auto noise = build_noise(config);
  MaximalSetup setup{space, generator, noise, config.p, config.inequality_paths, config.seed, config.resolved_threads()};
  const std::vector<Complex> sqrt_q(noise->sqrt_eigenvalues().begin(), noise->sqrt_eigenvalues().end());

  InequalitiesResult result;
  const double k = config.T / static_cast<double>(config.inequality_steps);
  for (const auto& name : config.schemes) {
    const RationalScheme scheme = RationalScheme::from_name(name);
    result.maximal.push_back({"discrete_maximal_" + std::string(scheme.name()),
                              empirical_discrete_maximal(
                                  setup, [&](std::size_t, const StateVector&) { return sqrt_q; }, scheme, k,
                                  config.inequality_steps)});
  }
  result.maximal.push_back(
      {"discrete_maximal_cn_adapted",
       empirical_discrete_maximal(
           setup,
           [&](std::size_t, const StateVector& partial) {
             std::vector<Complex> q = sqrt_q;
             const double damp = 1.0 / (1.0 + norm(partial));
             for (auto& v : q) v *= damp;
             return q;
           },
           RationalScheme::crank_nicolson(), k, config.inequality_steps)});
  result.maximal.push_back({"stochastic_maximal_constant",
                            empirical_stochastic_maximal(
                                setup, [&](double) { return sqrt_q; }, config.T, config.inequality_fine_steps)});
  result.maximal.push_back({"stochastic_maximal_modulated",
                            empirical_stochastic_maximal(
                                setup,
                                [&](double t) {
                                  std::vector<Complex> q = sqrt_q;
                                  const double w = 1.0 + std::cos(std::numbers::pi * t / config.T);
                                  for (auto& v : q) v *= w;
                                  return q;
                                },
                                config.T, config.inequality_fine_steps)});

  result.gronwall_cases = config.gronwall_cases;
  for (std::size_t i = 0; i < config.gronwall_cases; ++i) {
    try {
      const GronwallCase c = continuous_gronwall_case(config.seed, i);
      if (!check_continuous_gronwall(c.times, c.phi, c.alpha, c.beta)) ++result.continuous_violations;
    } catch (const std::invalid_argument&) {
      ++result.hypothesis_rejections;
    }
    try {
      const GronwallCase c = discrete_gronwall_case(config.seed, i);
      if (!check_discrete_gronwall(c.phi, c.alpha, c.beta)) ++result.discrete_violations;
    } catch (const std::invalid_argument&) {
      ++result.hypothesis_rejections;
    }
  }
  result.passed = result.continuous_violations == 0 && result.discrete_violations == 0 &&
                  result.hypothesis_rejections == 0;
  for (const auto& row : result.maximal) result.passed = result.passed && row.check.holds();
  return result;
}

StabilityResult run_stability(const ExperimentConfig& config) {
  std::vector<std::size_t> grid = config.n_grid;
  if (grid.empty()) {
    for (int e = 4; e <= 12; ++e) grid.push_back(std::size_t{1} << e);
  }
  std::sort(grid.begin(), grid.end());
  const auto problem = build_problem(config);
  const auto schemes = parse_schemes(config.schemes);
  const std::size_t finest = grid.back();
  const double k_fine = config.T / static_cast<double>(finest);
  const std::size_t ns = schemes.size(), nn = grid.size();

  std::vector<std::vector<double>> powered(ns * nn, std::vector<double>(config.M));
  parallel_for(config.M, config.resolved_threads(), [&](std::size_t m) {
    const NoisePath fine = sample_path(problem->noise(), config.T, k_fine, PathKey{config.seed, m});
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const NoisePath coarse = fine.coarsen(finest / grid[ni]);
      const double k = config.T / static_cast<double>(grid[ni]);
      for (std::size_t s = 0; s < ns; ++s) {
        const Trajectory traj = run_discrete(*problem, schemes[s], k, coarse);
        double worst = 0.0;
        for (const auto& u : traj.states) worst = std::max(worst, norm(u));
        powered[s * nn + ni][m] = std::pow(worst, config.p);
      }
    }
  });

  StabilityResult result;
  for (std::size_t s = 0; s < ns; ++s) {
    SchemeStability st;
    st.scheme = std::string(schemes[s].name());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t ni = 0; ni < nn; ++ni) {
      StabilityRow row;
      row.steps = grid[ni];
      row.k = config.T / static_cast<double>(grid[ni]);
      row.moment = moment_root(powered[s * nn + ni], config.p, mix_key(config.seed, ni));
      lo = std::min(lo, row.moment.value);
      hi = std::max(hi, row.moment.value);
      st.rows.push_back(row);
    }
    st.ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    result.passed = result.passed && st.ratio <= config.stability_ratio;
    result.schemes.push_back(std::move(st));
  }
  return result;
}

}  // namespace sevsteps::cli
