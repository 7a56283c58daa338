#include <doctest.h>

#include <cmath>

#include "sevsteps/schrodinger.hpp"
#include "test_util.hpp"

using namespace sevsteps;

namespace {

std::shared_ptr<const NoiseModel> silent_noise(int modes_half) {
  return std::make_shared<const NoiseModel>(std::vector<double>(2 * modes_half + 1, 0.0));
}

NoisePath path_for(const SemilinearProblem& problem, double k, std::uint64_t index = 0) {
  return sample_path(problem.noise(), problem.horizon(), k, PathKey{77, index});
}

}  // namespace

TEST_CASE("free evolution is reproduced exactly and conserves mass") {
  const auto space = SpectralSpace::make(16);
  const StateVector u0 = rough_initial_data(space, 2);
  const auto problem = build_linear(zero_potential(space), silent_noise(4), u0, 1.0);
  const double k = 1.0 / 64;
  const NoisePath path = path_for(problem, k);
  const Trajectory ee = run_discrete(problem, RationalScheme::exponential_euler(), k, path);
  const Trajectory cn = run_discrete(problem, RationalScheme::crank_nicolson(), k, path);
  const Trajectory ie = run_discrete(problem, RationalScheme::implicit_euler(), k, path);
  const double mass = norm(u0);
  for (std::size_t j = 0; j < ee.states.size(); ++j) {
    const StateVector exact = semigroup_at(problem.generator(), ee.time(j)).apply(u0);
    CHECK(max_coeff_difference(ee.states[j], exact) <= 1e-12);
    CHECK(std::abs(norm(ee.states[j]) - mass) <= 1e-8);
    CHECK(std::abs(norm(cn.states[j]) - mass) <= 1e-8);
  }
  CHECK(norm(ie.states.back()) < mass);
}

TEST_CASE("constant potential multiplies by the explicit Euler factor") {
  const auto space = SpectralSpace::make(6);
  const double c = 0.8;
  const auto potential = smooth_potential(space, {{0, c}});
  CHECK(potential.sup_norm == doctest::Approx(c));
  const StateVector u0 = smooth_data(space, 1.0);
  const auto problem = build_linear(potential, silent_noise(2), u0, 1.0);
  const double k = 1.0 / 32;
  const Trajectory traj = run_discrete(problem, RationalScheme::exponential_euler(), k, path_for(problem, k));
  for (std::size_t j = 0; j < traj.states.size(); ++j) {
    const StateVector oracle =
        semigroup_at(problem.generator(), traj.time(j)).apply(u0) * std::pow(Complex(1.0, -k * c), static_cast<double>(j));
    CHECK(max_coeff_difference(traj.states[j], oracle) <= 1e-12);
  }
}

TEST_CASE("named maps agree with the linear builder") {
  const auto space = SpectralSpace::make(8);
  auto noise = std::make_shared<const NoiseModel>(NoiseModel::fourier_decay(8, 1.0));
  const StateVector u0 = rough_initial_data(space, 5);
  const auto potential = default_smooth_potential(space);
  const auto linear = build_linear(potential, noise, u0, 1.0);
  // generic maps with the same action but without the short cut
  LipschitzMap id{"generic-identity", [](Complex z) { return z; }, 1.0, false};
  LipschitzMap zero{"generic-zero", [](Complex) { return Complex{}; }, 0.0, false};
  const auto generic = build_nonlinear(zero, id, potential, noise, u0, 1.0);
  const double k = 1.0 / 64;
  const NoisePath path = path_for(linear, k, 3);
  const Trajectory a = run_discrete(linear, RationalScheme::crank_nicolson(), k, path);
  const Trajectory b = run_discrete(generic, RationalScheme::crank_nicolson(), k, path);
  CHECK(max_coeff_difference(a.states.back(), b.states.back()) <= 1e-10);
}

TEST_CASE("declared constants bound the observed quotients") {
  const auto space = SpectralSpace::make(10);
  auto noise = std::make_shared<const NoiseModel>(NoiseModel::fourier_decay(6, 1.0));
  const auto potential = rough_potential(space, 4, 1.0);
  const auto problem = build_nonlinear(LipschitzMap::saturate(), LipschitzMap::sine(), potential, noise,
                                       rough_initial_data(space, 1), 1.0);
  CHECK(problem.observed_drift_quotient() <= problem.drift_lipschitz());
  CHECK(problem.observed_diffusion_quotient() <= problem.diffusion_lipschitz());
  CHECK(problem.drift_lipschitz() == doctest::Approx(potential.multiplier_bound(0.0) + 1.0));
  CHECK(problem.diffusion_lipschitz() == doctest::Approx(std::sqrt(2.0 * noise->trace())));

  // random spot checks beyond the construction probe
  for (int trial = 0; trial < 30; ++trial) {
    const StateVector u = testutil::random_state(space, 70, 2 * trial, 0.5);
    const StateVector v = testutil::random_state(space, 70, 2 * trial + 1, 0.5) * Complex(0.1);
    const double d = norm(u - v);
    CHECK(norm(problem.drift(0.0, u) - problem.drift(0.0, v)) <= problem.drift_lipschitz() * d);
    CHECK(hilbert_schmidt_distance(problem.diffusion(0.0, u), problem.diffusion(0.0, v)) <=
          problem.diffusion_lipschitz() * d);
  }
}

TEST_CASE("rough potentials") {
  const auto space = SpectralSpace::make(32);
  const auto a = rough_potential(space, 9, 1.0);
  const auto b = rough_potential(space, 9, 1.0);
  const auto c = rough_potential(space, 10, 1.0);
  CHECK(a.kind == PotentialKind::Rough);
  CHECK(a.sup_norm <= 1.0);
  CHECK(a.sup_norm > 0.5);
  CHECK(max_coeff_difference(a.field, b.field) == 0.0);
  CHECK(max_coeff_difference(a.field, c.field) > 0.0);
  for (auto v : a.field.physical()) {
    CHECK(std::abs(v.imag()) <= 1e-12);
    CHECK(std::abs(v.real()) <= 1.0 + 1e-12);
  }
  CHECK_THROWS(rough_potential(space, 1, 0.0));
  CHECK_THROWS(custom_potential(space, std::vector<double>(3, 1.0)));
}

TEST_CASE("rough initial data has a flat spectrum") {
  const auto space = SpectralSpace::make(256);
  const StateVector u = rough_initial_data(space, 12);
  CHECK(norm_sigma(u, 0.0) == doctest::Approx(1.0));
  double low = 0.0;
  double high = 0.0;
  for (int n = -256; n <= 256; ++n) (std::abs(n) < 128 ? low : high) += std::norm(u.coeff(n));
  // 255 low modes against 258 high modes
  CHECK(high / low == doctest::Approx(258.0 / 255.0).epsilon(0.25));
  CHECK(norm_sigma(u, 1.0) > 50.0);
}

TEST_CASE("builder validation") {
  const auto space = SpectralSpace::make(6, 1.0);
  auto noise = std::make_shared<const NoiseModel>(NoiseModel::fourier_decay(3, 2.0));
  const StateVector u0 = smooth_data(space, 2.0);
  CHECK_THROWS_AS(build_nonlinear(LipschitzMap::saturate(), LipschitzMap::identity(), default_smooth_potential(space),
                                  noise, u0, 1.0),
                  ConfigurationError);
  const auto linear = build_linear(default_smooth_potential(space), noise, u0, 1.0);
  CHECK(linear.sigma() == 1.0);
  LipschitzMap shifted{"shifted", [](Complex z) { return z + 1.0; }, 1.0, false};
  CHECK_THROWS_AS(build_nonlinear(shifted, LipschitzMap::identity(), default_smooth_potential(space), noise, u0, 1.0),
                  ConfigurationError);
  CHECK_THROWS(LipschitzMap::from_name("cubic"));
  const auto wide = std::make_shared<const NoiseModel>(std::vector<double>(15, 1.0));
  CHECK_THROWS_AS(build_linear(default_smooth_potential(space), wide, u0, 1.0), ConfigurationError);
  CHECK(std::isfinite(noise->trace()));
  const auto additive = build_additive(default_smooth_potential(space), noise, u0, 1.0);
  CHECK(additive.diffusion_lipschitz() == 0.0);
}
