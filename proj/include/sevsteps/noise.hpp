#pragma once

// Truncated Q-Wiener noise with trace-class covariance
//   Q = sum_n lambda_n (h_n (x) h_n),  h_n = exp(i f_n x),
// sampled as standardised Brownian increments per mode on a fine grid.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sevsteps/spectral.hpp"

namespace sevsteps {

enum class NoiseField { Real, Complex };

class NoiseModel {
 public:
  /// Mode i carries frequency i - (N_h - 1)/2; N_h must be odd.
  NoiseModel(std::vector<double> eigenvalues, NoiseField field = NoiseField::Complex);

  /// lambda_n = scale * (1 + n^2)^{-exponent} for n = -K..K.
  static NoiseModel fourier_decay(int mode_cutoff, double exponent, double scale = 1.0,
                                  NoiseField field = NoiseField::Complex);

  std::size_t mode_count() const noexcept { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }
  const std::vector<double>& sqrt_eigenvalues() const noexcept { return sqrt_eigenvalues_; }
  double trace() const noexcept { return trace_; }
  NoiseField field() const noexcept { return field_; }
  int frequency(std::size_t mode) const noexcept {
    return static_cast<int>(mode) - static_cast<int>(mode_count() / 2);
  }
  std::vector<int> frequencies() const;
  /// sup_n ||h_n||_inf; exp(i n x) has unit sup norm.
  double basis_sup_norm() const noexcept { return 1.0; }

 private:
  std::vector<double> eigenvalues_;
  std::vector<double> sqrt_eigenvalues_;
  double trace_ = 0.0;
  NoiseField field_;
};

struct PathKey {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  friend bool operator==(const PathKey&, const PathKey&) = default;
};

/// Standardised increments Delta B_{j,n} with E|Delta B|^2 = k per mode;
/// Q-weights are applied by the diffusion operator.
class NoisePath {
 public:
  NoisePath(PathKey key, double step_size, std::size_t steps, std::size_t modes, std::vector<Complex> increments);

  PathKey key() const noexcept { return key_; }
  double step_size() const noexcept { return step_size_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t modes() const noexcept { return modes_; }
  double horizon() const noexcept { return step_size_ * static_cast<double>(steps_); }

  /// Increment over (t_j, t_{j+1}], j = 0..steps-1, one entry per mode.
  std::span<const Complex> increment(std::size_t j) const noexcept {
    return {increments_.data() + j * modes_, modes_};
  }
  std::span<Complex> increment(std::size_t j) noexcept { return {increments_.data() + j * modes_, modes_}; }
  std::span<const Complex> data() const noexcept { return increments_; }

  /// Block sums of `factor` consecutive increments.
  NoisePath coarsen(std::size_t factor) const;

  friend bool operator==(const NoisePath&, const NoisePath&) = default;

 private:
  PathKey key_;
  double step_size_;
  std::size_t steps_;
  std::size_t modes_;
  std::vector<Complex> increments_;
};

/// Deterministic in (key, step, mode): each increment comes from its own
/// counter-based draw.
NoisePath sample_path(const NoiseModel& noise, double horizon, double k_fine, PathKey key);
NoisePath coarsen(const NoisePath& path, std::size_t factor);

/// Monte Carlo estimate of E ||W(t)||^2 with W(t) = sum_n sqrt(lambda_n) h_n B_n(t).
double q_wiener_norm_check(const NoiseModel& noise, std::span<const NoisePath> paths, double t);

/// Binary dump: header of four little-endian 8-byte fields
/// (seed: u64, k_fine: f64, steps: u64, modes: u64) followed by
/// steps * modes * 2 little-endian f64 values, step-major, (re, im) per mode.
void write_binary(const NoisePath& path, std::ostream& out);
NoisePath read_binary(std::istream& in);

}  // namespace sevsteps
