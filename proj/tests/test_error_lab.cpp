#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sevsteps/error_lab.hpp"
#include "test_util.hpp"

using namespace sevsteps;

namespace {

ErrorSamples table(std::vector<std::vector<double>> errors) {
  ErrorSamples s;
  for (std::size_t m = 0; m < errors.size(); ++m) s.keys.push_back(PathKey{1, m});
  s.errors = std::move(errors);
  return s;
}

ErrorReport report_from(const std::vector<double>& ks, const std::vector<double>& es) {
  ErrorReport r;
  r.scheme = "test";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ErrorRow row;
    row.k = ks[i];
    row.uniform = {es[i], 0.0};
    row.pointwise = {es[i], 0.0};
    r.rows.push_back(row);
  }
  return r;
}

/// E sup_{t<=1} |B_t|^2 from the series for P(sup |B| < x).
double reflection_second_moment() {
  auto cdf = [](double x) {
    if (x <= 0.0) return 0.0;
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double odd = 2.0 * k + 1.0;
      const double term = std::exp(-odd * odd * std::numbers::pi * std::numbers::pi / (8.0 * x * x)) / odd;
      sum += (k % 2 == 0 ? term : -term);
      if (term < 1e-18) break;
    }
    return 4.0 / std::numbers::pi * sum;
  };
  // E M^2 = int_0^inf 2 x (1 - P(M < x)) dx by the composite Simpson rule
  const int n = 20000;
  const double upper = 10.0;
  const double h = upper / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    const double f = 2.0 * x * (1.0 - cdf(x));
    acc += (i == 0 || i == n ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0)) * f;
  }
  return acc * h / 3.0;
}

std::vector<double> extremal_discrete(double alpha, double beta, std::size_t n) {
  std::vector<double> phi;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    phi.push_back(alpha + beta * std::sqrt(sum));
    sum += phi.back() * phi.back();
  }
  return phi;
}

/// Picard iterates of phi -> alpha + beta (int_0^t phi_pl^2)^{1/2} on the knots,
/// with phi_pl the piecewise linear interpolant.  Starting from alpha the
/// iterates increase, so every iterate satisfies the hypothesis.
std::vector<double> picard_continuous(double alpha, double beta, const std::vector<double>& times, int iterations) {
  std::vector<double> phi(times.size(), alpha);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> next{alpha};
    double integral = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double dt = times[i] - times[i - 1];
      // exact integral of the square of a linear segment
      integral += dt / 3.0 * (phi[i - 1] * phi[i - 1] + phi[i - 1] * phi[i] + phi[i] * phi[i]);
      next.push_back(alpha + beta * std::sqrt(integral));
    }
    phi = std::move(next);
  }
  return phi;
}

}  // namespace

TEST_CASE("strong error estimators") {
  // max errors 1 and 3 give ((1 + 9) / 2)^{1/2}
  const auto s = table({{0.5, 1.0}, {3.0, 2.0}});
  CHECK(uniform_strong_error(s, 2.0).value == doctest::Approx(std::sqrt(5.0)));

  CHECK(uniform_strong_error(table({{0.0, 0.0}, {0.0, 0.0}}), 2.0).value == 0.0);

  // pointwise maximum over times is strictly below the uniform estimate here
  const auto cross = table({{1.0, 0.0}, {0.0, 1.0}});
  CHECK(pointwise_strong_error(cross, 2.0).value == doctest::Approx(std::sqrt(0.5)));
  CHECK(uniform_strong_error(cross, 2.0).value == doctest::Approx(1.0));

  const auto single = table({{0.25, 0.5}});
  const Estimate one = uniform_strong_error(single, 2.0);
  CHECK(one.value == doctest::Approx(0.5));
  CHECK(std::isinf(one.half_width));

  CHECK_THROWS(uniform_strong_error(ErrorSamples{}, 2.0));
  CHECK_THROWS(uniform_strong_error(s, 0.5));
}

TEST_CASE("estimators grow with p and never rank pointwise above uniform") {
  std::vector<std::vector<double>> errors;
  for (int m = 0; m < 150; ++m) {
    std::vector<double> row;
    for (int j = 0; j < 9; ++j) row.push_back(std::abs(testutil::random_state(SpectralSpace::make(0), 50, m * 16 + j).coeff(0)));
    errors.push_back(row);
  }
  const auto s = table(errors);
  double previous = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 8.0}) {
    const double u = uniform_strong_error(s, p).value;
    CHECK(u >= previous);
    previous = u;
    CHECK(pointwise_strong_error(s, p).value <= u * (1.0 + 1e-15));
  }
}

TEST_CASE("confidence half-width shrinks with the sample count") {
  auto half_width = [](int count) {
    std::vector<double> powered;
    for (int m = 0; m < count; ++m) powered.push_back(std::norm(testutil::random_state(SpectralSpace::make(0), 51, m).coeff(0)));
    return moment_root(powered, 2.0, 1).half_width;
  };
  const double small = half_width(40);  // bootstrap branch
  const double medium = half_width(400);
  const double large = half_width(40000);
  CHECK(small > medium);
  CHECK(medium > large);
  CHECK(large == doctest::Approx(medium / 10.0).epsilon(0.25));
}

TEST_CASE("path errors need a common grid and path") {
  const auto space = SpectralSpace::make(1);
  Trajectory a{0.5, "ie", PathKey{1, 0}, {StateVector(space), StateVector::constant(space, 1.0), StateVector(space)}};
  Trajectory b = a;
  b.states[1] = StateVector::constant(space, 3.0);
  const auto e = path_errors(a, b);
  CHECK(e[1] == doctest::Approx(2.0));
  Trajectory other_key = b;
  other_key.key.path_index = 1;
  CHECK_THROWS(path_errors(a, other_key));
  Trajectory other_grid = b;
  other_grid.step_size = 0.25;
  CHECK_THROWS(path_errors(a, other_grid));
}

TEST_CASE("rate fits") {
  std::vector<double> ks, half, logc, flat;
  for (int e = 3; e <= 9; ++e) {
    const double k = std::ldexp(1.0, -e);
    ks.push_back(k);
    half.push_back(3.0 * std::sqrt(k));
    logc.push_back((1.0 + std::log(1.0 / k)) * k);
    flat.push_back(0.2);
  }
  const RateFit plain = fit_rate(report_from(ks, half), RateModel::Plain);
  CHECK(plain.rate == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(plain.c3 == doctest::Approx(3.0));
  CHECK_FALSE(plain.unreliable);
  CHECK(plain.rms_log_residual <= 1e-12);

  const RateFit corrected = fit_rate(report_from(ks, logc), RateModel::LogCorrected);
  CHECK(std::abs(corrected.rate - 1.0) <= 0.02);
  CHECK(fit_rate(report_from(ks, logc), RateModel::Plain).rate < 1.0);

  const RateFit constant = fit_rate(report_from(ks, flat), RateModel::Plain);
  CHECK(std::abs(constant.rate) <= 1e-12);
  CHECK(constant.unreliable);

  CHECK_THROWS(fit_rate(report_from({0.1, 0.05, 0.025}, {1.0, 0.5, 0.25}), RateModel::Plain));
}

TEST_CASE("Gronwall checkers: fixed examples") {
  CHECK(check_discrete_gronwall(std::vector<double>{1.0, 1.0, 1.0}, 1.0, 0.0));
  CHECK(check_discrete_gronwall(std::vector<double>{0.0, 0.0}, 0.0, 3.0));
  CHECK_THROWS_AS(check_discrete_gronwall(std::vector<double>{2.0}, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(check_discrete_gronwall(std::vector<double>{1.0}, -1.0, 1.0), std::invalid_argument);

  const std::vector<double> times{0.0, 0.5, 1.0};
  CHECK(check_continuous_gronwall(times, std::vector<double>{1.0, 1.0, 1.0}, 1.0, 0.0));
  CHECK_THROWS_AS(check_continuous_gronwall(times, std::vector<double>{1.0, 1.5, 1.0}, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_continuous_gronwall(std::vector<double>{0.1, 0.2}, std::vector<double>{1.0, 1.0}, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_continuous_gronwall(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0}, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("Gronwall checkers: extremal and scaled random cases") {
  for (int c = 0; c < 1000; ++c) {
    const double alpha = 0.01 + 2.0 * testutil::uniform(60, 0, c);
    const double beta = 3.0 * testutil::uniform(60, 1, c);
    const double scale = testutil::uniform(60, 2, c);
    const auto n = 1 + static_cast<std::size_t>(40 * testutil::uniform(60, 3, c));
    std::vector<double> phi = extremal_discrete(alpha, beta, n);
    CHECK(check_discrete_gronwall(phi, alpha, beta));
    for (auto& v : phi) v *= scale;
    CHECK(check_discrete_gronwall(phi, alpha, beta));
  }
  for (int c = 0; c < 200; ++c) {
    const double alpha = 0.01 + 2.0 * testutil::uniform(61, 0, c);
    const double beta = 2.0 * testutil::uniform(61, 1, c);
    const double horizon = 0.1 + 2.0 * testutil::uniform(61, 2, c);
    std::vector<double> times{0.0};
    for (int i = 1; i <= 16; ++i) times.push_back(horizon * i / 16.0);
    const int iterations = 1 + static_cast<int>(60 * testutil::uniform(61, 3, c));
    const std::vector<double> phi = picard_continuous(alpha, beta, times, iterations);
    CHECK(check_continuous_gronwall(times, phi, alpha, beta));
  }
}

TEST_CASE("maximal inequality constants") {
  CHECK(stochastic_maximal_constant(2.0) == doctest::Approx(10.0 * std::sqrt(2.0)));
  CHECK(discrete_maximal_constant(2.0) == doctest::Approx(400.0 * std::sqrt(2.0) + 10.0 * std::sqrt(2.0)));
  CHECK(discrete_maximal_constant(2.0) == doctest::Approx(579.8).epsilon(1e-3));
  CHECK_THROWS(discrete_maximal_constant(1.0));
}

TEST_CASE("empirical maximal checks") {
  const auto space = SpectralSpace::make(0);
  MaximalSetup setup;
  setup.space = space;
  setup.generator = std::make_shared<const DiagonalGenerator>(DiagonalGenerator::zero(space));
  setup.noise = std::make_shared<const NoiseModel>(std::vector<double>{1.0}, NoiseField::Real);
  setup.paths = 10000;
  setup.seed = 8;

  SUBCASE("zero integrand") {
    const auto zero = [](std::size_t, const StateVector&) { return std::vector<Complex>{0.0}; };
    const MaximalCheck check = empirical_discrete_maximal(setup, zero, RationalScheme::implicit_euler(), 0.1, 10);
    CHECK(check.lhs == 0.0);
    CHECK(check.ratio == 0.0);
    CHECK(check.holds());
  }
  SUBCASE("one step has the closed form |q| sqrt(k)") {
    const auto constant = [](std::size_t, const StateVector&) { return std::vector<Complex>{Complex(0.0, 2.0)}; };
    const MaximalCheck check = empirical_discrete_maximal(setup, constant, RationalScheme::crank_nicolson(), 0.25, 1);
    CHECK(check.rhs == doctest::Approx(1.0));
    CHECK(check.lhs == doctest::Approx(1.0).epsilon(0.03));
    CHECK(check.bound == doctest::Approx(discrete_maximal_constant(2.0)));
  }
  SUBCASE("reflection principle for a scalar Brownian motion") {
    const auto unit = [](double) { return std::vector<Complex>{1.0}; };
    const MaximalCheck check = empirical_stochastic_maximal(setup, unit, 1.0, 4096);
    CHECK(check.rhs == doctest::Approx(1.0));
    CHECK(check.ratio * check.ratio == doctest::Approx(reflection_second_moment()).epsilon(0.05));
    CHECK(check.holds());
  }
}
