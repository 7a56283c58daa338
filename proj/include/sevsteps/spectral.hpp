#pragma once

// Finite Fourier representation of H^sigma on the torus [0, 2*pi) and the
// diagonal operator calculus built on it.
//
// A state u is stored through its Fourier coefficients u_n, n = -K..K, with
// u(x) = sum_n u_n exp(i n x).  Norms are taken with respect to the
// normalised measure dx / (2*pi), so the L^2 norm of u is the l^2 norm of
// its coefficients and the basis functions exp(i n x) are orthonormal with
// unit sup-norm.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace sevsteps {

using Complex = std::complex<double>;

class SpectralSpace;
using SpacePtr = std::shared_ptr<const SpectralSpace>;

/// Frequencies -K..K with 2K+1 equispaced collocation points and a
/// 3/2-padded grid for dealiased products.
class SpectralSpace {
 public:
  /// K = 0 is accepted and gives a one-coefficient (scalar) space.
  SpectralSpace(int mode_cutoff, double sigma = 0.0);

  static SpacePtr make(int mode_cutoff, double sigma = 0.0);

  int mode_cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(2 * cutoff_ + 1); }
  std::size_t grid_points() const noexcept { return size(); }
  /// ceil(3 (2K+1) / 2) points; enough to remove quadratic aliasing.
  std::size_t padded_points() const noexcept;
  double sigma() const noexcept { return sigma_; }

  int frequency(std::size_t index) const noexcept { return static_cast<int>(index) - cutoff_; }
  std::size_t index(int frequency) const;
  bool contains(int frequency) const noexcept { return frequency >= -cutoff_ && frequency <= cutoff_; }
  double grid_point(std::size_t j) const noexcept;

  /// Coefficients -> values on the 2K+1 collocation points.
  std::vector<Complex> to_physical(std::span<const Complex> coeffs) const;
  /// Values on the collocation points -> coefficients.  Exact inverse of to_physical.
  std::vector<Complex> to_spectral(std::span<const Complex> values) const;
  /// Coefficients -> values on the padded grid (zero padding).
  std::vector<Complex> to_padded_physical(std::span<const Complex> coeffs) const;
  /// Padded-grid values -> coefficients, truncated to |n| <= K.
  std::vector<Complex> from_padded_physical(std::span<const Complex> values) const;

  bool compatible(const SpectralSpace& other) const noexcept {
    return cutoff_ == other.cutoff_ && sigma_ == other.sigma_;
  }

 private:
  int cutoff_;
  double sigma_;
};

/// Element of the truncated H^sigma space.
class StateVector {
 public:
  explicit StateVector(SpacePtr space);
  StateVector(SpacePtr space, std::vector<Complex> coeffs);

  static StateVector from_physical(SpacePtr space, std::span<const Complex> values);
  static StateVector constant(SpacePtr space, Complex value);
  /// amplitude * exp(i n x)
  static StateVector mode(SpacePtr space, int frequency, Complex amplitude = 1.0);

  const SpectralSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  Complex coeff(int frequency) const { return coeffs_[space_->index(frequency)]; }
  Complex& coeff(int frequency) { return coeffs_[space_->index(frequency)]; }

  std::vector<Complex> physical() const { return space_->to_physical(coeffs_); }

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex scale) noexcept;

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(StateVector a, Complex s) { return a *= s; }
  friend StateVector operator*(Complex s, StateVector a) { return a *= s; }

 private:
  SpacePtr space_;
  std::vector<Complex> coeffs_;
};

/// (sum_n (1 + n^2)^sigma |u_n|^2)^{1/2}
double norm_sigma(const StateVector& u, double sigma);
/// Norm of the ambient space H^sigma of u.
inline double norm(const StateVector& u) { return norm_sigma(u, u.space().sigma()); }
double max_coeff_difference(const StateVector& a, const StateVector& b);
void require_same_space(const StateVector& a, const StateVector& b);

/// Multiplication by a fixed complex number per Fourier mode.
class DiagonalOperator {
 public:
  DiagonalOperator() = default;
  explicit DiagonalOperator(std::vector<Complex> multipliers) : multipliers_(std::move(multipliers)) {}

  static DiagonalOperator identity(std::size_t size) { return DiagonalOperator(std::vector<Complex>(size, 1.0)); }

  std::size_t size() const noexcept { return multipliers_.size(); }
  std::span<const Complex> multipliers() const noexcept { return multipliers_; }
  Complex operator[](std::size_t i) const noexcept { return multipliers_[i]; }

  StateVector apply(const StateVector& u) const;
  void apply_in_place(StateVector& u) const;
  /// (*this) after (other); diagonal operators commute.
  DiagonalOperator compose(const DiagonalOperator& other) const;
  DiagonalOperator power(unsigned exponent) const;
  /// max_n |multiplier_n|, the operator norm in any weighted l^2 norm.
  double operator_norm() const;

 private:
  std::vector<Complex> multipliers_;
};

/// Generator A acting as multiplication by mu_n on mode n.
class DiagonalGenerator {
 public:
  DiagonalGenerator(SpacePtr space, std::vector<Complex> eigenvalues);

  /// A = -i Delta with mu_n = -i n^2 (physicists' sign convention).
  static DiagonalGenerator schrodinger(SpacePtr space);
  /// A = Delta with mu_n = -n^2.
  static DiagonalGenerator heat(SpacePtr space);
  static DiagonalGenerator zero(SpacePtr space);

  const SpacePtr& space_ptr() const noexcept { return space_; }
  const SpectralSpace& space() const noexcept { return *space_; }
  std::span<const Complex> eigenvalues() const noexcept { return eigenvalues_; }
  Complex eigenvalue(int frequency) const { return eigenvalues_[space_->index(frequency)]; }

  /// Re mu_n <= 0 for every mode.
  bool generates_contraction_semigroup() const noexcept;
  StateVector apply(const StateVector& u) const;
  DiagonalOperator as_operator() const { return DiagonalOperator(eigenvalues_); }

 private:
  SpacePtr space_;
  std::vector<Complex> eigenvalues_;
};

DiagonalOperator semigroup_at(const DiagonalGenerator& generator, double t);
DiagonalOperator resolvent(const DiagonalGenerator& generator, double m);
/// (-A)^beta by the principal branch, with the zero eigenvalue sent to 0.
DiagonalOperator fractional_power_neg_A(const DiagonalGenerator& generator, double beta);

/// (||u||^2 + ||A u||^2)^{1/2} in the ambient norm of u.
double graph_norm(const DiagonalGenerator& generator, const StateVector& u);
/// Operator norm of a diagonal operator on D(A) with the graph norm,
/// evaluated mode by mode on the graph-normalised basis.
double graph_operator_norm(const DiagonalGenerator& generator, const DiagonalOperator& op);

/// Dealiased product of two fields.
StateVector pointwise_multiply(const StateVector& a, const StateVector& b);

using ScalarFunction = std::function<Complex(Complex)>;

/// Applies phi pointwise on the collocation grid.
StateVector nemytskij(const ScalarFunction& phi, const StateVector& u);

/// Deterministic data with u_n = (1 + n^2)^{-(beta + 1/2)}, normalised to unit
/// L^2 norm.  Its image under (-A)^beta has finite norm uniformly in K for any
/// generator with |mu_n| <= C (1 + n^2).
StateVector smooth_data(SpacePtr space, double beta);

}  // namespace sevsteps
