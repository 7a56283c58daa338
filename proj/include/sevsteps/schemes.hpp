#pragma once

// Rational time-discretisation schemes R_k = r(-k A) on diagonal generators.

#include <string>
#include <string_view>
#include <vector>

#include "sevsteps/spectral.hpp"

namespace sevsteps {

enum class SchemeKind { ExponentialEuler, ImplicitEuler, CrankNicolson, CustomRational };

class RationalScheme {
 public:
  static RationalScheme exponential_euler();
  static RationalScheme implicit_euler();
  static RationalScheme crank_nicolson();
  /// r(z) = p(z) / q(z), coefficients in ascending powers of z.  Throws if q
  /// vanishes identically or has a root with Re z >= 0.
  static RationalScheme custom(std::vector<Complex> numerator, std::vector<Complex> denominator);
  /// "ee" | "ie" | "cn" (case-insensitive, long names also accepted)
  static RationalScheme from_name(std::string_view name);

  SchemeKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  /// r(z) for Re z >= 0.
  Complex symbol(Complex z) const;

 private:
  explicit RationalScheme(SchemeKind kind) : kind_(kind) {}
  Complex evaluate(Complex z) const;

  SchemeKind kind_;
  std::vector<Complex> numerator_;
  std::vector<Complex> denominator_;
};

/// Multiplier r(-k mu_n) on each mode.
DiagonalOperator build_Rk(const RationalScheme& scheme, const DiagonalGenerator& generator, double k);

/// max_n |r(-k mu_n)|.
double contractivity_margin(const RationalScheme& scheme, const DiagonalGenerator& generator, double k);

inline constexpr double kContractivityTolerance = 1e-12;

/// Margin within tolerance and, for custom rationals, |r(iy)| <= 1 on 10^4
/// imaginary-axis samples with |y| <= 10^6.
bool is_contractive(const RationalScheme& scheme, const DiagonalGenerator& generator, double k);

struct OrderMeasurement {
  std::vector<double> steps;
  std::vector<double> errors;  ///< max_j ||(S(jk) - R_k^j) u||
  double slope = 0.0;          ///< NaN when exact
  bool exact = false;          ///< every error at round-off level
};

/// Deterministic order of R against S on data u over [0, T].
OrderMeasurement deterministic_order(const RationalScheme& scheme, const DiagonalGenerator& generator,
                                     const StateVector& u, const std::vector<double>& steps, double horizon);

/// T / k as an integer, or throws if k does not divide T.
std::size_t step_count(double horizon, double k);

}  // namespace sevsteps
