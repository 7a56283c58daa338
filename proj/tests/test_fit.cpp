#include <doctest.h>

#include <cmath>
#include <vector>

#include "sevsteps/fit.hpp"

using namespace sevsteps;

namespace {

std::vector<double> dyadic(int from, int to) {
  std::vector<double> ks;
  for (int e = from; e <= to; ++e) ks.push_back(std::ldexp(1.0, -e));
  return ks;
}

}  // namespace

TEST_CASE("log-log slope") {
  const auto ks = dyadic(2, 10);
  std::vector<double> half, flat;
  for (double k : ks) {
    half.push_back(0.7 * std::sqrt(k));
    flat.push_back(4.0);
  }
  CHECK(loglog_slope(ks, half) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(loglog_slope(ks, flat)) <= 1e-12);
  CHECK_THROWS(loglog_slope(std::vector<double>{0.1}, std::vector<double>{1.0}));
  CHECK_THROWS(loglog_slope(std::vector<double>{0.1, 0.1}, std::vector<double>{1.0, 2.0}));
  CHECK_THROWS(loglog_slope(std::vector<double>{0.1, 0.05}, std::vector<double>{1.0, 0.0}));
}

TEST_CASE("log-corrected power law") {
  const auto ks = dyadic(3, 12);
  for (double alpha : {0.5, 1.0}) {
    std::vector<double> es;
    for (double k : ks) es.push_back((1.0 + std::log(1.0 / k)) * std::pow(k, alpha));
    const LogCorrectedFit fit = fit_log_corrected(ks, es, 1.0, 0.8 * alpha);
    CHECK(fit.alpha == doctest::Approx(alpha).epsilon(0.02));
    CHECK(fit.rms_log_residual <= 1e-3);
    CHECK(fit.c3 >= 0.0);
    CHECK(fit.c4 >= 0.0);
  }
  // without a logarithm the fit reduces to the plain slope
  std::vector<double> plain;
  for (double k : ks) plain.push_back(2.0 * std::pow(k, 0.5));
  const auto fit = fit_log_corrected(ks, plain, 1.0, 0.3);
  CHECK(fit.alpha == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("square-root logarithm fit") {
  const auto ks = dyadic(3, 10);
  std::vector<double> es;
  for (double k : ks) es.push_back(1.5 * (1.0 + std::sqrt(std::log(2.0 / k))) * std::sqrt(k));
  const SqrtLogFit fit = fit_sqrt_log_half(ks, es, 2.0);
  CHECK(fit.constant == doctest::Approx(1.5));
  CHECK(fit.rms_log_residual <= 1e-10);
}
