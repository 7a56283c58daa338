#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sevsteps/spectral.hpp"
#include "test_util.hpp"

using namespace sevsteps;
using testutil::random_state;

namespace {

/// Truncated convolution of two coefficient sequences.
StateVector convolution_oracle(const StateVector& a, const StateVector& b) {
  const int K = a.space().mode_cutoff();
  StateVector out(a.space_ptr());
  for (int n = -K; n <= K; ++n) {
    Complex acc{};
    for (int m = -K; m <= K; ++m) {
      const int r = n - m;
      if (r < -K || r > K) continue;
      acc += a.coeff(m) * b.coeff(r);
    }
    out.coeff(n) = acc;
  }
  return out;
}

double relative_difference(const StateVector& a, const StateVector& b) {
  return norm_sigma(a - b, 0.0) / std::max(1e-300, norm_sigma(b, 0.0));
}

}  // namespace

TEST_CASE("spectral space layout") {
  const auto space = SpectralSpace::make(5);
  CHECK(space->size() == 11);
  CHECK(space->grid_points() == 11);
  CHECK(space->padded_points() >= 3 * 5 + 1);
  CHECK(space->frequency(0) == -5);
  CHECK(space->index(5) == 10);
  CHECK_THROWS_AS(space->index(6), std::out_of_range);
  CHECK(SpectralSpace::make(0)->size() == 1);
  CHECK_THROWS(SpectralSpace(-1));
  CHECK_THROWS(SpectralSpace(3, -0.5));
}

TEST_CASE("forward and backward transforms compose to the identity") {
  for (int K : {0, 1, 4, 16, 33}) {
    const auto space = SpectralSpace::make(K);
    const StateVector u = random_state(space, 1, static_cast<std::uint64_t>(K));
    const StateVector back = StateVector::from_physical(space, u.physical());
    CHECK(relative_difference(back, u) <= 1e-12);
    const auto padded = space->to_padded_physical(u.coeffs());
    const StateVector back2(space, space->from_padded_physical(padded));
    CHECK(relative_difference(back2, u) <= 1e-12);
  }
}

TEST_CASE("physical values agree with direct Fourier sums") {
  const auto space = SpectralSpace::make(3);
  const StateVector u = random_state(space, 2, 0);
  const auto values = u.physical();
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double x = space->grid_point(j);
    Complex direct{};
    for (int n = -3; n <= 3; ++n) direct += u.coeff(n) * std::polar(1.0, n * x);
    CHECK(std::abs(values[j] - direct) <= 1e-12);
  }
}

TEST_CASE("norm_sigma") {
  const auto space = SpectralSpace::make(4);
  for (double s : {0.0, 0.5, 1.0, 3.0}) CHECK(norm_sigma(StateVector::mode(space, 0), s) == doctest::Approx(1.0));
  CHECK(norm_sigma(StateVector::mode(space, 1), 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const StateVector u = random_state(space, 3, 0);
  double euclid = 0.0;
  for (auto c : u.coeffs()) euclid += std::norm(c);
  CHECK(std::abs(norm_sigma(u, 0.0) - std::sqrt(euclid)) <= 1e-12 * std::sqrt(euclid));

  // discrete Parseval on the collocation grid
  double grid = 0.0;
  for (auto v : u.physical()) grid += std::norm(v);
  CHECK(std::sqrt(grid / static_cast<double>(space->grid_points())) == doctest::Approx(norm_sigma(u, 0.0)));

  double previous = 0.0;
  for (double s = 0.0; s <= 3.0; s += 0.25) {
    const double n = norm_sigma(u, s);
    CHECK(n >= previous);
    previous = n;
  }
}

TEST_CASE("semigroup_at") {
  const auto space = SpectralSpace::make(0);
  const DiagonalGenerator a(space, {Complex(0, -1)});
  const auto s = semigroup_at(a, std::numbers::pi);
  CHECK(std::abs(s[0] - Complex(-1, 0)) <= 1e-15);
  CHECK(std::abs(s[0]) == doctest::Approx(1.0));

  const auto big = SpectralSpace::make(6);
  const auto schr = DiagonalGenerator::schrodinger(big);
  const auto id = semigroup_at(schr, 0.0);
  for (auto m : id.multipliers()) CHECK(m == Complex(1.0));

  const DiagonalGenerator decay(space, {Complex(-1, 0)});
  CHECK(semigroup_at(decay, std::log(2.0))[0].real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(semigroup_at(schr, -1e-3), std::invalid_argument);
}

TEST_CASE("semigroup invariants") {
  const auto space = SpectralSpace::make(12);
  const auto heat = DiagonalGenerator::heat(space);
  const auto schr = DiagonalGenerator::schrodinger(space);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector u = random_state(space, 4, trial);
    const double t = 2.0 * testutil::uniform(4, 100, trial);
    const double s = 2.0 * testutil::uniform(4, 101, trial);
    for (const auto* a : {&heat, &schr}) {
      CHECK(norm(semigroup_at(*a, t).apply(u)) <= norm(u) * (1.0 + 1e-14));
      const StateVector ts = semigroup_at(*a, t).apply(semigroup_at(*a, s).apply(u));
      CHECK(relative_difference(ts, semigroup_at(*a, t + s).apply(u)) <= 1e-12);
    }
    for (double sigma : {0.0, 0.3, 1.0, 2.0}) {
      CHECK(norm_sigma(semigroup_at(schr, t).apply(u), sigma) == doctest::Approx(norm_sigma(u, sigma)).epsilon(1e-13));
    }
  }
}

TEST_CASE("resolvent") {
  const auto one = SpectralSpace::make(0);
  CHECK(resolvent(DiagonalGenerator(one, {Complex(0)}), 2.0)[0] == Complex(0.5));
  CHECK(resolvent(DiagonalGenerator(one, {Complex(-3)}), 1.0)[0] == Complex(0.25));
  const auto space = SpectralSpace::make(8);
  const auto schr = DiagonalGenerator::schrodinger(space);
  const auto r = resolvent(schr, 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double n = space->frequency(i);
    CHECK(std::abs(r[i]) == doctest::Approx(1.0 / std::sqrt(1.0 + n * n * n * n)));
    CHECK(std::abs(r[i]) <= 1.0);
  }
  CHECK_THROWS_AS(resolvent(schr, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(resolvent(schr, -1.0), std::invalid_argument);

  for (int trial = 0; trial < 10; ++trial) {
    const StateVector u = random_state(space, 5, trial);
    for (double m : {0.1, 1.0, 7.5, 1e3}) {
      const StateVector ru = resolvent(schr, m).apply(u);
      const StateVector back = ru * Complex(m) - schr.apply(ru);
      CHECK(relative_difference(back, u) <= 1e-10);
      CHECK(norm(ru * Complex(m)) <= norm(u) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("fractional powers of -A") {
  const auto one = SpectralSpace::make(0);
  CHECK(fractional_power_neg_A(DiagonalGenerator(one, {Complex(-4)}), 0.5)[0].real() == doctest::Approx(2.0));
  const auto fi = fractional_power_neg_A(DiagonalGenerator(one, {Complex(0, -1)}), 1.0)[0];
  CHECK(std::abs(fi - Complex(0, 1)) <= 1e-15);
  CHECK(fractional_power_neg_A(DiagonalGenerator(one, {Complex(0)}), 0.7)[0] == Complex(0));

  const auto space = SpectralSpace::make(10);
  const auto schr = DiagonalGenerator::schrodinger(space);
  const StateVector u = random_state(space, 6, 0);
  const StateVector via_power = fractional_power_neg_A(schr, 1.0).apply(u);
  const StateVector direct = schr.apply(u) * Complex(-1.0);
  CHECK(max_coeff_difference(via_power, direct) <= 1e-12);
  CHECK_THROWS_AS(fractional_power_neg_A(schr, 0.0), std::invalid_argument);
}

TEST_CASE("graph norm") {
  const auto space = SpectralSpace::make(6, 0.5);
  const auto schr = DiagonalGenerator::schrodinger(space);
  const StateVector u = random_state(space, 7, 0);
  const double g = graph_norm(schr, u);
  CHECK(g * g == doctest::Approx(norm(u) * norm(u) + norm(schr.apply(u)) * norm(schr.apply(u))));
}

TEST_CASE("pointwise_multiply") {
  const auto space = SpectralSpace::make(6);
  const StateVector b = random_state(space, 8, 0);
  CHECK(max_coeff_difference(pointwise_multiply(StateVector::constant(space, 1.0), b), b) <= 1e-12);

  const StateVector e1 = StateVector::mode(space, 1);
  const StateVector sq = pointwise_multiply(e1, e1);
  CHECK(max_coeff_difference(sq, StateVector::mode(space, 2)) <= 1e-12);

  const StateVector eK = StateVector::mode(space, 6);
  CHECK(norm_sigma(pointwise_multiply(eK, eK), 0.0) <= 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    const StateVector x = random_state(space, 8, 10 + trial);
    const StateVector y = random_state(space, 8, 20 + trial);
    CHECK(max_coeff_difference(pointwise_multiply(x, y), convolution_oracle(x, y)) <= 1e-12);
  }
  CHECK_THROWS(pointwise_multiply(b, StateVector(SpectralSpace::make(5))));
}

TEST_CASE("nemytskij") {
  const auto space = SpectralSpace::make(5);
  const StateVector u = random_state(space, 9, 0);
  CHECK(max_coeff_difference(nemytskij([](Complex z) { return z; }, u), u) <= 1e-12);
  CHECK(norm(nemytskij([](Complex) { return Complex{}; }, u)) == 0.0);
  const Complex c(0.7, -1.3);
  const StateVector out = nemytskij([](Complex z) { return z / (1.0 + std::abs(z)); }, StateVector::constant(space, c));
  CHECK(max_coeff_difference(out, StateVector::constant(space, c / (1.0 + std::abs(c)))) <= 1e-12);
}

TEST_CASE("smooth data") {
  const auto space = SpectralSpace::make(64);
  const StateVector u = smooth_data(space, 2.0);
  CHECK(norm_sigma(u, 0.0) == doctest::Approx(1.0));
  // (-A)^2 u stays bounded as K grows, because |n^4 u_n|^2 ~ n^-2
  const double high = norm_sigma(fractional_power_neg_A(DiagonalGenerator::schrodinger(space), 2.0).apply(u), 0.0);
  const auto small = SpectralSpace::make(16);
  const double low = norm_sigma(
      fractional_power_neg_A(DiagonalGenerator::schrodinger(small), 2.0).apply(smooth_data(small, 2.0)), 0.0);
  CHECK(high < 1.5 * low);
}
