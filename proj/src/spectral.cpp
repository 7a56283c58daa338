#include "sevsteps/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace sevsteps {

// ---------------------------------------------------------------------------
// SpectralSpace

SpectralSpace::SpectralSpace(int mode_cutoff, double sigma) : cutoff_(mode_cutoff), sigma_(sigma) {
  if (mode_cutoff < 0) throw std::invalid_argument("SpectralSpace: mode cutoff must be >= 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("SpectralSpace: sigma must be >= 0");
}

SpacePtr SpectralSpace::make(int mode_cutoff, double sigma) {
  return std::make_shared<const SpectralSpace>(mode_cutoff, sigma);
}

std::size_t SpectralSpace::padded_points() const noexcept { return (3 * size() + 1) / 2; }

std::size_t SpectralSpace::index(int frequency) const {
  if (!contains(frequency)) {
    throw std::out_of_range("frequency " + std::to_string(frequency) + " outside cutoff " + std::to_string(cutoff_));
  }
  return static_cast<std::size_t>(frequency + cutoff_);
}

double SpectralSpace::grid_point(std::size_t j) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(grid_points());
}

namespace {

// Coefficients ordered n = -K..K -> FFT input ordered 0..N-1 with negative
// frequencies wrapped to the top.
void scatter_to_fft_order(std::span<const Complex> coeffs, int cutoff, std::span<Complex> fft_in) {
  std::fill(fft_in.begin(), fft_in.end(), Complex{});
  const auto n_fft = static_cast<int>(fft_in.size());
  for (int n = -cutoff; n <= cutoff; ++n) {
    const int slot = n >= 0 ? n : n + n_fft;
    fft_in[static_cast<std::size_t>(slot)] = coeffs[static_cast<std::size_t>(n + cutoff)];
  }
}

void gather_from_fft_order(std::span<const Complex> fft_out, int cutoff, double scale, std::span<Complex> coeffs) {
  const auto n_fft = static_cast<int>(fft_out.size());
  for (int n = -cutoff; n <= cutoff; ++n) {
    const int slot = n >= 0 ? n : n + n_fft;
    coeffs[static_cast<std::size_t>(n + cutoff)] = fft_out[static_cast<std::size_t>(slot)] * scale;
  }
}

}  // namespace

std::vector<Complex> SpectralSpace::to_physical(std::span<const Complex> coeffs) const {
  if (coeffs.size() != size()) throw std::invalid_argument("to_physical: coefficient count mismatch");
  std::vector<Complex> in(size()), out(size());
  scatter_to_fft_order(coeffs, cutoff_, in);
  detail::fft_backward(in, out);
  return out;
}

std::vector<Complex> SpectralSpace::to_spectral(std::span<const Complex> values) const {
  if (values.size() != grid_points()) throw std::invalid_argument("to_spectral: grid size mismatch");
  std::vector<Complex> out(size()), coeffs(size());
  detail::fft_forward(values, out);
  gather_from_fft_order(out, cutoff_, 1.0 / static_cast<double>(grid_points()), coeffs);
  return coeffs;
}

std::vector<Complex> SpectralSpace::to_padded_physical(std::span<const Complex> coeffs) const {
  if (coeffs.size() != size()) throw std::invalid_argument("to_padded_physical: coefficient count mismatch");
  std::vector<Complex> in(padded_points()), out(padded_points());
  scatter_to_fft_order(coeffs, cutoff_, in);
  detail::fft_backward(in, out);
  return out;
}

std::vector<Complex> SpectralSpace::from_padded_physical(std::span<const Complex> values) const {
  if (values.size() != padded_points()) throw std::invalid_argument("from_padded_physical: grid size mismatch");
  std::vector<Complex> out(padded_points()), coeffs(size());
  detail::fft_forward(values, out);
  gather_from_fft_order(out, cutoff_, 1.0 / static_cast<double>(padded_points()), coeffs);
  return coeffs;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("StateVector: null space");
  coeffs_.assign(space_->size(), Complex{});
}

StateVector::StateVector(SpacePtr space, std::vector<Complex> coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw std::invalid_argument("StateVector: null space");
  if (coeffs_.size() != space_->size()) throw std::invalid_argument("StateVector: coefficient count mismatch");
}

StateVector StateVector::from_physical(SpacePtr space, std::span<const Complex> values) {
  auto coeffs = space->to_spectral(values);
  return StateVector(std::move(space), std::move(coeffs));
}

StateVector StateVector::constant(SpacePtr space, Complex value) {
  StateVector u(std::move(space));
  u.coeff(0) = value;
  return u;
}

StateVector StateVector::mode(SpacePtr space, int frequency, Complex amplitude) {
  StateVector u(std::move(space));
  u.coeff(frequency) = amplitude;
  return u;
}

void require_same_space(const StateVector& a, const StateVector& b) {
  if (a.space_ptr() != b.space_ptr() && !a.space().compatible(b.space())) {
    throw std::invalid_argument("state vectors live in different spectral spaces");
  }
}

StateVector& StateVector::operator+=(const StateVector& other) {
  require_same_space(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  require_same_space(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

StateVector& StateVector::operator*=(Complex scale) noexcept {
  for (auto& c : coeffs_) c *= scale;
  return *this;
}

double norm_sigma(const StateVector& u, double sigma) {
  const auto& space = u.space();
  double sum = 0.0;
  const auto coeffs = u.coeffs();
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double n = space.frequency(i);
    const double weight = sigma == 0.0 ? 1.0 : std::pow(1.0 + n * n, sigma);
    sum += weight * std::norm(coeffs[i]);
  }
  return std::sqrt(sum);
}

double max_coeff_difference(const StateVector& a, const StateVector& b) {
  require_same_space(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return worst;
}

// ---------------------------------------------------------------------------
// DiagonalOperator

StateVector DiagonalOperator::apply(const StateVector& u) const {
  StateVector out = u;
  apply_in_place(out);
  return out;
}

void DiagonalOperator::apply_in_place(StateVector& u) const {
  if (u.size() != multipliers_.size()) throw std::invalid_argument("DiagonalOperator: size mismatch");
  auto c = u.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= multipliers_[i];
}

DiagonalOperator DiagonalOperator::compose(const DiagonalOperator& other) const {
  if (other.size() != size()) throw std::invalid_argument("DiagonalOperator: size mismatch");
  std::vector<Complex> m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = multipliers_[i] * other.multipliers_[i];
  return DiagonalOperator(std::move(m));
}

DiagonalOperator DiagonalOperator::power(unsigned exponent) const {
  std::vector<Complex> m(size(), 1.0);
  for (std::size_t i = 0; i < size(); ++i) {
    // binary powering keeps the roundoff growth logarithmic in the exponent
    Complex base = multipliers_[i];
    Complex acc = 1.0;
    for (unsigned e = exponent; e != 0; e >>= 1) {
      if (e & 1U) acc *= base;
      base *= base;
    }
    m[i] = acc;
  }
  return DiagonalOperator(std::move(m));
}

double DiagonalOperator::operator_norm() const {
  double worst = 0.0;
  for (auto m : multipliers_) worst = std::max(worst, std::abs(m));
  return worst;
}

// ---------------------------------------------------------------------------
// DiagonalGenerator

DiagonalGenerator::DiagonalGenerator(SpacePtr space, std::vector<Complex> eigenvalues)
    : space_(std::move(space)), eigenvalues_(std::move(eigenvalues)) {
  if (!space_) throw std::invalid_argument("DiagonalGenerator: null space");
  if (eigenvalues_.size() != space_->size()) throw std::invalid_argument("DiagonalGenerator: eigenvalue count mismatch");
}

DiagonalGenerator DiagonalGenerator::schrodinger(SpacePtr space) {
  std::vector<Complex> mu(space->size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double n = space->frequency(i);
    mu[i] = Complex(0.0, -n * n);
  }
  return DiagonalGenerator(std::move(space), std::move(mu));
}

DiagonalGenerator DiagonalGenerator::heat(SpacePtr space) {
  std::vector<Complex> mu(space->size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double n = space->frequency(i);
    mu[i] = -n * n;
  }
  return DiagonalGenerator(std::move(space), std::move(mu));
}

DiagonalGenerator DiagonalGenerator::zero(SpacePtr space) {
  std::vector<Complex> mu(space->size(), Complex{});
  return DiagonalGenerator(std::move(space), std::move(mu));
}

bool DiagonalGenerator::generates_contraction_semigroup() const noexcept {
  return std::all_of(eigenvalues_.begin(), eigenvalues_.end(), [](Complex mu) { return mu.real() <= 0.0; });
}

StateVector DiagonalGenerator::apply(const StateVector& u) const { return as_operator().apply(u); }

DiagonalOperator semigroup_at(const DiagonalGenerator& generator, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup_at: t must be >= 0");
  std::vector<Complex> m;
  m.reserve(generator.eigenvalues().size());
  for (auto mu : generator.eigenvalues()) m.push_back(t == 0.0 ? Complex(1.0) : std::exp(t * mu));
  return DiagonalOperator(std::move(m));
}

DiagonalOperator resolvent(const DiagonalGenerator& generator, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("resolvent: m must be > 0");
  if (!generator.generates_contraction_semigroup()) {
    throw std::invalid_argument("resolvent: generator has eigenvalues with positive real part");
  }
  std::vector<Complex> r;
  r.reserve(generator.eigenvalues().size());
  for (auto mu : generator.eigenvalues()) r.push_back(1.0 / (m - mu));
  return DiagonalOperator(std::move(r));
}

DiagonalOperator fractional_power_neg_A(const DiagonalGenerator& generator, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("fractional_power_neg_A: beta must be > 0");
  if (!generator.generates_contraction_semigroup()) {
    throw std::invalid_argument("fractional_power_neg_A: generator has eigenvalues with positive real part");
  }
  std::vector<Complex> r;
  r.reserve(generator.eigenvalues().size());
  for (auto mu : generator.eigenvalues()) {
    if (mu == Complex{}) {
      r.emplace_back(0.0);
    } else if (beta == 1.0) {
      r.push_back(-mu);
    } else {
      r.push_back(std::pow(-mu, beta));
    }
  }
  return DiagonalOperator(std::move(r));
}

double graph_norm(const DiagonalGenerator& generator, const StateVector& u) {
  const double a = norm(u);
  const double b = norm(generator.apply(u));
  return std::sqrt(a * a + b * b);
}

double graph_operator_norm(const DiagonalGenerator& generator, const DiagonalOperator& op) {
  if (op.size() != generator.space().size()) throw std::invalid_argument("graph_operator_norm: size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < op.size(); ++i) {
    const auto e = StateVector::mode(generator.space_ptr(), generator.space().frequency(i));
    worst = std::max(worst, graph_norm(generator, op.apply(e)) / graph_norm(generator, e));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Physical-space operations

StateVector pointwise_multiply(const StateVector& a, const StateVector& b) {
  require_same_space(a, b);
  const auto& space = a.space();
  auto fa = space.to_padded_physical(a.coeffs());
  const auto fb = space.to_padded_physical(b.coeffs());
  for (std::size_t j = 0; j < fa.size(); ++j) fa[j] *= fb[j];
  return StateVector(a.space_ptr(), space.from_padded_physical(fa));
}

StateVector nemytskij(const ScalarFunction& phi, const StateVector& u) {
  auto values = u.physical();
  for (auto& v : values) v = phi(v);
  return StateVector::from_physical(u.space_ptr(), values);
}

StateVector smooth_data(SpacePtr space, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("smooth_data: beta must be >= 0");
  StateVector u(space);
  auto c = u.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double n = space->frequency(i);
    c[i] = std::pow(1.0 + n * n, -(beta + 0.5));
  }
  const double scale = norm_sigma(u, 0.0);
  return u * Complex(1.0 / scale);
}

}  // namespace sevsteps
