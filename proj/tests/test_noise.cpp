#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sevsteps/noise.hpp"
#include "sevsteps/philox.hpp"

using namespace sevsteps;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using Block = Philox4x32::Block;
  CHECK(Philox4x32(0)(Block{0, 0, 0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(0xffffffffffffffffULL)(Block{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(0x299f31d0a4093822ULL)(Block{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("noise model layout") {
  const NoiseModel noise({0.5, 1.0, 0.25});
  CHECK(noise.mode_count() == 3);
  CHECK(noise.frequency(0) == -1);
  CHECK(noise.frequency(2) == 1);
  CHECK(noise.trace() == doctest::Approx(1.75));
  CHECK(noise.sqrt_eigenvalues()[1] == 1.0);
  CHECK(noise.basis_sup_norm() == 1.0);
  CHECK_THROWS(NoiseModel({1.0, 1.0}));
  CHECK_THROWS(NoiseModel({1.0, -1.0, 1.0}));
  const auto decay = NoiseModel::fourier_decay(3, 1.0, 2.0);
  CHECK(decay.mode_count() == 7);
  CHECK(decay.eigenvalues()[decay.mode_count() / 2] == doctest::Approx(2.0));
  CHECK(decay.eigenvalues()[0] == doctest::Approx(0.2));
}

TEST_CASE("increments are standardised Brownian increments") {
  for (NoiseField field : {NoiseField::Complex, NoiseField::Real}) {
    const NoiseModel noise(std::vector<double>(5, 1.0), field);
    const double k = 1.0 / 4096.0;
    const NoisePath path = sample_path(noise, 20000.0 * k, k, PathKey{3, 0});
    double sum_re = 0.0;
    double sum_sq = 0.0;
    double max_im = 0.0;
    for (Complex z : path.data()) {
      sum_re += z.real();
      sum_sq += std::norm(z);
      max_im = std::max(max_im, std::abs(z.imag()));
    }
    const auto count = static_cast<double>(path.data().size());
    CHECK(count >= 1e5);
    CHECK(std::abs(sum_re / count) <= 5.0 * std::sqrt(k / count));
    CHECK(sum_sq / count == doctest::Approx(k).epsilon(0.02));
    if (field == NoiseField::Real) CHECK(max_im == 0.0);
  }
}

TEST_CASE("sampling is a pure function of the key") {
  const auto noise = NoiseModel::fourier_decay(4, 2.0);
  const NoisePath a = sample_path(noise, 1.0, 1.0 / 64, PathKey{7, 3});
  const NoisePath b = sample_path(noise, 1.0, 1.0 / 64, PathKey{7, 3});
  const NoisePath c = sample_path(noise, 1.0, 1.0 / 64, PathKey{7, 4});
  const NoisePath d = sample_path(noise, 1.0, 1.0 / 64, PathKey{8, 3});
  CHECK(a == b);
  CHECK_FALSE(a.data()[0] == c.data()[0]);
  CHECK_FALSE(a.data()[0] == d.data()[0]);
  // a longer path on the same grid starts with the same increments
  const NoisePath longer = sample_path(noise, 2.0, 1.0 / 64, PathKey{7, 3});
  for (std::size_t i = 0; i < a.data().size(); ++i) CHECK(longer.data()[i] == a.data()[i]);
  CHECK_THROWS(sample_path(noise, 1.0, 0.3, PathKey{}));
}

TEST_CASE("coarsen") {
  const NoisePath path(PathKey{1, 0}, 0.25, 4, 1, {1.0, 2.0, 3.0, 4.0});
  const NoisePath two = path.coarsen(2);
  CHECK(two.steps() == 2);
  CHECK(two.step_size() == 0.5);
  CHECK(two.increment(0)[0] == Complex(3.0));
  CHECK(two.increment(1)[0] == Complex(7.0));
  CHECK(path.coarsen(4).increment(0)[0] == Complex(10.0));
  CHECK(path.coarsen(1) == path);
  CHECK_THROWS(path.coarsen(3));
  CHECK_THROWS(path.coarsen(0));

  const auto noise = NoiseModel::fourier_decay(2, 1.0);
  const NoisePath fine = sample_path(noise, 1.0, 1.0 / 256, PathKey{2, 5});
  const NoisePath nested = coarsen(coarsen(fine, 4), 8);
  const NoisePath direct = coarsen(fine, 32);
  REQUIRE(nested.data().size() == direct.data().size());
  for (std::size_t i = 0; i < direct.data().size(); ++i) CHECK(std::abs(nested.data()[i] - direct.data()[i]) <= 1e-14);
  CHECK(direct.key() == fine.key());
  CHECK(direct.horizon() == doctest::Approx(1.0));
}

TEST_CASE("Q-Wiener second moment") {
  SUBCASE("single active mode") {
    std::vector<double> lambda(5, 0.0);
    lambda[0] = 1.0;
    const NoiseModel noise(lambda);
    std::vector<NoisePath> paths;
    for (std::uint64_t m = 0; m < 10000; ++m) paths.push_back(sample_path(noise, 1.0, 0.25, PathKey{11, m}));
    CHECK(std::abs(q_wiener_norm_check(noise, paths, 1.0) - 1.0) <= 0.05);
  }
  SUBCASE("decaying spectrum") {
    std::vector<double> lambda;
    for (int n = -10; n <= 10; ++n) lambda.push_back(n == 0 ? 1.0 : 1.0 / (n * n));
    const NoiseModel noise(lambda);
    std::vector<NoisePath> paths;
    for (std::uint64_t m = 0; m < 4000; ++m) paths.push_back(sample_path(noise, 1.0, 0.5, PathKey{12, m}));
    const double t = 0.5;
    CHECK(q_wiener_norm_check(noise, paths, t) == doctest::Approx(t * noise.trace()).epsilon(0.05));
  }
}

TEST_CASE("Ito isometry for a deterministic scalar integrand") {
  const NoiseModel noise({1.0}, NoiseField::Real);
  const double k = 1.0 / 32;
  double second = 0.0;
  double expected = 0.0;
  for (int j = 0; j < 32; ++j) expected += std::pow(std::sin(j * k), 2) * k;
  const int paths = 20000;
  for (int m = 0; m < paths; ++m) {
    const NoisePath path = sample_path(noise, 1.0, k, PathKey{13, static_cast<std::uint64_t>(m)});
    double integral = 0.0;
    for (std::size_t j = 0; j < path.steps(); ++j) integral += std::sin(j * k) * path.increment(j)[0].real();
    second += integral * integral;
  }
  CHECK(second / paths == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("increments over disjoint blocks are uncorrelated") {
  const NoiseModel noise({1.0, 1.0, 1.0});
  double cross = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
  const int paths = 20000;
  for (int m = 0; m < paths; ++m) {
    const NoisePath path = coarsen(sample_path(noise, 1.0, 0.125, PathKey{14, static_cast<std::uint64_t>(m)}), 4);
    const Complex first = path.increment(0)[1];
    const Complex second = path.increment(1)[1];
    cross += (first * std::conj(second)).real();
    a2 += std::norm(first);
    b2 += std::norm(second);
  }
  CHECK(a2 / paths == doctest::Approx(0.5).epsilon(0.03));
  const double correlation = cross / std::sqrt(a2 * b2);
  CHECK(std::abs(correlation) <= 4.0 / std::sqrt(static_cast<double>(paths)));
}

TEST_CASE("binary round trip") {
  const auto noise = NoiseModel::fourier_decay(3, 1.5);
  const NoisePath path = sample_path(noise, 0.5, 1.0 / 32, PathKey{99, 0});
  std::stringstream buffer;
  write_binary(path, buffer);
  CHECK(buffer.str().size() == 32 + path.data().size() * 16);
  const NoisePath back = read_binary(buffer);
  CHECK(back == path);

  std::stringstream truncated(buffer.str().substr(0, 40));
  CHECK_THROWS(read_binary(truncated));
}
