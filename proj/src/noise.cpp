#include "sevsteps/noise.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "sevsteps/philox.hpp"
#include "sevsteps/schemes.hpp"

namespace sevsteps {

NoiseModel::NoiseModel(std::vector<double> eigenvalues, NoiseField field)
    : eigenvalues_(std::move(eigenvalues)), field_(field) {
  if (eigenvalues_.empty() || eigenvalues_.size() % 2 == 0) {
    throw std::invalid_argument("NoiseModel: mode count must be odd and positive");
  }
  sqrt_eigenvalues_.reserve(eigenvalues_.size());
  for (double l : eigenvalues_) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("NoiseModel: eigenvalues must be finite and >= 0");
    trace_ += l;
    sqrt_eigenvalues_.push_back(std::sqrt(l));
  }
}

NoiseModel NoiseModel::fourier_decay(int mode_cutoff, double exponent, double scale, NoiseField field) {
  if (mode_cutoff < 0) throw std::invalid_argument("fourier_decay: negative cutoff");
  std::vector<double> lambda;
  for (int n = -mode_cutoff; n <= mode_cutoff; ++n) {
    lambda.push_back(scale * std::pow(1.0 + static_cast<double>(n) * n, -exponent));
  }
  return NoiseModel(std::move(lambda), field);
}

std::vector<int> NoiseModel::frequencies() const {
  std::vector<int> f(mode_count());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = frequency(i);
  return f;
}

NoisePath::NoisePath(PathKey key, double step_size, std::size_t steps, std::size_t modes, std::vector<Complex> increments)
    : key_(key), step_size_(step_size), steps_(steps), modes_(modes), increments_(std::move(increments)) {
  if (!(step_size > 0.0)) throw std::invalid_argument("NoisePath: step size must be > 0");
  if (increments_.size() != steps * modes) throw std::invalid_argument("NoisePath: increment count mismatch");
}

NoisePath NoisePath::coarsen(std::size_t factor) const {
  if (factor == 0 || steps_ % factor != 0) {
    throw std::invalid_argument("coarsen: factor must divide the step count");
  }
  const std::size_t coarse_steps = steps_ / factor;
  std::vector<Complex> out(coarse_steps * modes_);
  for (std::size_t j = 0; j < coarse_steps; ++j) {
    for (std::size_t f = 0; f < factor; ++f) {
      const auto fine = increment(j * factor + f);
      for (std::size_t n = 0; n < modes_; ++n) out[j * modes_ + n] += fine[n];
    }
  }
  return NoisePath(key_, step_size_ * static_cast<double>(factor), coarse_steps, modes_, std::move(out));
}

NoisePath coarsen(const NoisePath& path, std::size_t factor) { return path.coarsen(factor); }

NoisePath sample_path(const NoiseModel& noise, double horizon, double k_fine, PathKey key) {
  const std::size_t steps = step_count(horizon, k_fine);
  const std::size_t modes = noise.mode_count();
  const Philox4x32 rng = make_generator(key.seed, RngDomain::Noise);
  const bool complex_field = noise.field() == NoiseField::Complex;
  const double scale = complex_field ? std::sqrt(0.5 * k_fine) : std::sqrt(k_fine);
  std::vector<Complex> inc(steps * modes);
  for (std::size_t j = 0; j < steps; ++j) {
    for (std::size_t n = 0; n < modes; ++n) {
      const std::uint64_t lo = (static_cast<std::uint64_t>(j) << 24) | static_cast<std::uint64_t>(n);
      const auto [z1, z2] = rng.normals(key.path_index, lo);
      inc[j * modes + n] = complex_field ? Complex(scale * z1, scale * z2) : Complex(scale * z1, 0.0);
    }
  }
  return NoisePath(key, k_fine, steps, modes, std::move(inc));
}

double q_wiener_norm_check(const NoiseModel& noise, std::span<const NoisePath> paths, double t) {
  if (paths.empty()) throw std::invalid_argument("q_wiener_norm_check: no paths");
  double total = 0.0;
  for (const auto& path : paths) {
    if (path.modes() != noise.mode_count()) throw std::invalid_argument("q_wiener_norm_check: mode count mismatch");
    const std::size_t upto = t == 0.0 ? 0 : step_count(t, path.step_size());
    if (upto > path.steps()) throw std::invalid_argument("q_wiener_norm_check: t beyond path horizon");
    double squared = 0.0;
    for (std::size_t n = 0; n < path.modes(); ++n) {
      Complex b{};
      for (std::size_t j = 0; j < upto; ++j) b += path.increment(j)[n];
      squared += noise.eigenvalues()[n] * std::norm(b);
    }
    total += squared;
  }
  return total / static_cast<double>(paths.size());
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <class T>
T get_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw std::runtime_error("read_binary: truncated noise dump");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_binary(const NoisePath& path, std::ostream& out) {
  put_le<std::uint64_t>(out, path.key().seed);
  put_le<double>(out, path.step_size());
  put_le<std::uint64_t>(out, path.steps());
  put_le<std::uint64_t>(out, path.modes());
  for (const Complex& c : path.data()) {
    put_le<double>(out, c.real());
    put_le<double>(out, c.imag());
  }
}

NoisePath read_binary(std::istream& in) {
  const auto seed = get_le<std::uint64_t>(in);
  const auto k = get_le<double>(in);
  const auto steps = get_le<std::uint64_t>(in);
  const auto modes = get_le<std::uint64_t>(in);
  if (modes != 0 && steps > (std::uint64_t{1} << 40) / modes) throw std::runtime_error("read_binary: implausible header");
  std::vector<Complex> inc(steps * modes);
  for (auto& c : inc) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    c = Complex(re, im);
  }
  return NoisePath(PathKey{seed, 0}, k, steps, modes, std::move(inc));
}

}  // namespace sevsteps
