#include "sevsteps/schemes.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sevsteps/fit.hpp"

namespace sevsteps {

RationalScheme RationalScheme::exponential_euler() { return RationalScheme(SchemeKind::ExponentialEuler); }
RationalScheme RationalScheme::implicit_euler() { return RationalScheme(SchemeKind::ImplicitEuler); }
RationalScheme RationalScheme::crank_nicolson() { return RationalScheme(SchemeKind::CrankNicolson); }

RationalScheme RationalScheme::custom(std::vector<Complex> numerator, std::vector<Complex> denominator) {
  while (!denominator.empty() && denominator.back() == Complex{}) denominator.pop_back();
  while (!numerator.empty() && numerator.back() == Complex{}) numerator.pop_back();
  if (denominator.empty()) throw std::invalid_argument("custom scheme: zero denominator");
  if (numerator.empty()) numerator.push_back(0.0);
  if (denominator.size() > 1) {
    Eigen::VectorXcd coeffs(static_cast<Eigen::Index>(denominator.size()));
    for (std::size_t i = 0; i < denominator.size(); ++i) coeffs(static_cast<Eigen::Index>(i)) = denominator[i];
    Eigen::PolynomialSolver<Complex, Eigen::Dynamic> solver(coeffs);
    for (const auto& root : solver.roots()) {
      if (root.real() >= 0.0) {
        throw std::invalid_argument("custom scheme: denominator has a root in the closed right half-plane");
      }
    }
  }
  RationalScheme scheme(SchemeKind::CustomRational);
  scheme.numerator_ = std::move(numerator);
  scheme.denominator_ = std::move(denominator);
  return scheme;
}

RationalScheme RationalScheme::from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ee" || lower == "exponential_euler" || lower == "splitting") return exponential_euler();
  if (lower == "ie" || lower == "implicit_euler") return implicit_euler();
  if (lower == "cn" || lower == "crank_nicolson") return crank_nicolson();
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view RationalScheme::name() const noexcept {
  switch (kind_) {
    case SchemeKind::ExponentialEuler: return "ee";
    case SchemeKind::ImplicitEuler: return "ie";
    case SchemeKind::CrankNicolson: return "cn";
    case SchemeKind::CustomRational: return "custom";
  }
  return "custom";
}

Complex RationalScheme::evaluate(Complex z) const {
  switch (kind_) {
    case SchemeKind::ExponentialEuler: return std::exp(-z);
    case SchemeKind::ImplicitEuler: return 1.0 / (1.0 + z);
    case SchemeKind::CrankNicolson: return (2.0 - z) / (2.0 + z);
    case SchemeKind::CustomRational: {
      auto horner = [z](const std::vector<Complex>& c) {
        Complex acc{};
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
        return acc;
      };
      return horner(numerator_) / horner(denominator_);
    }
  }
  return {};
}

Complex RationalScheme::symbol(Complex z) const {
  if (z.real() < 0.0) throw std::domain_error("scheme symbol evaluated outside the closed right half-plane");
  return evaluate(z);
}

DiagonalOperator build_Rk(const RationalScheme& scheme, const DiagonalGenerator& generator, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("build_Rk: k must be > 0");
  std::vector<Complex> m;
  m.reserve(generator.eigenvalues().size());
  for (auto mu : generator.eigenvalues()) {
    // -k mu with mu = 0 gives -0.0 real parts; normalise the sign.
    Complex z = -k * mu;
    if (z.real() == 0.0) z.real(0.0);
    m.push_back(scheme.symbol(z));
  }
  return DiagonalOperator(std::move(m));
}

double contractivity_margin(const RationalScheme& scheme, const DiagonalGenerator& generator, double k) {
  return build_Rk(scheme, generator, k).operator_norm();
}

bool is_contractive(const RationalScheme& scheme, const DiagonalGenerator& generator, double k) {
  if (contractivity_margin(scheme, generator, k) > 1.0 + kContractivityTolerance) return false;
  if (scheme.kind() == SchemeKind::CustomRational) {
    constexpr int samples = 10000;
    constexpr double reach = 1e6;
    for (int s = 0; s < samples; ++s) {
      // symmetric samples on [-reach, reach], denser near the origin
      const double u = -1.0 + 2.0 * s / (samples - 1);
      const double y = std::copysign(reach * u * u, u);
      if (std::abs(scheme.symbol(Complex(0.0, y))) > 1.0 + kContractivityTolerance) return false;
    }
  }
  return true;
}

std::size_t step_count(double horizon, double k) {
  if (!(k > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("step_count: non-positive horizon or step");
  const double ratio = horizon / k;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("step size " + std::to_string(k) + " does not divide horizon " + std::to_string(horizon));
  }
  return static_cast<std::size_t>(rounded);
}

OrderMeasurement deterministic_order(const RationalScheme& scheme, const DiagonalGenerator& generator,
                                     const StateVector& u, const std::vector<double>& steps, double horizon) {
  if (steps.size() < 3) throw std::invalid_argument("deterministic_order: need at least three step sizes");
  OrderMeasurement out;
  out.steps = steps;
  for (double k : steps) {
    const std::size_t n_steps = step_count(horizon, k);
    const DiagonalOperator rk = build_Rk(scheme, generator, k);
    StateVector approx = u;
    double worst = 0.0;
    for (std::size_t j = 1; j <= n_steps; ++j) {
      rk.apply_in_place(approx);
      const StateVector exact = semigroup_at(generator, static_cast<double>(j) * k).apply(u);
      worst = std::max(worst, norm(exact - approx));
    }
    out.errors.push_back(worst);
  }

  // Points at the round-off floor carry no rate information.
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, norm(u));
  std::vector<double> ks, es;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (out.errors[i] > floor) {
      ks.push_back(steps[i]);
      es.push_back(out.errors[i]);
    }
  }
  const bool all_tiny = std::all_of(out.errors.begin(), out.errors.end(), [](double e) { return e <= 1e-12; });
  if (all_tiny || ks.size() < 2) {
    out.exact = true;
    out.slope = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.slope = loglog_slope(ks, es);
  }
  return out;
}

}  // namespace sevsteps
