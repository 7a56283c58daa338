#include "sevsteps/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sevsteps/philox.hpp"

namespace sevsteps {

double PotentialSpec::multiplier_bound(double sigma) const {
  double total = 0.0;
  const auto c = field.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double m = field.space().frequency(i);
    total += std::abs(c[i]) * std::pow(1.0 + m * m, 0.5 * sigma);
  }
  return std::pow(2.0, 0.5 * sigma) * total;
}

namespace {

double fine_sup_norm(const StateVector& v) {
  const std::size_t points = 64 * v.size();
  double sup = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double x = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(points);
    Complex value{};
    for (std::size_t i = 0; i < v.size(); ++i) {
      value += v.coeffs()[i] * std::polar(1.0, v.space().frequency(i) * x);
    }
    sup = std::max(sup, std::abs(value));
  }
  return sup;
}

PotentialSpec from_grid(SpacePtr space, std::vector<double> values, PotentialKind kind) {
  if (values.size() != space->grid_points()) throw std::invalid_argument("potential: wrong number of grid values");
  std::vector<Complex> complex_values(values.begin(), values.end());
  PotentialSpec out{kind, StateVector::from_physical(space, complex_values), 0.0};
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("potential: non-finite value");
    out.sup_norm = std::max(out.sup_norm, std::abs(v));
  }
  return out;
}

}  // namespace

PotentialSpec smooth_potential(SpacePtr space, const std::map<int, Complex>& coefficients) {
  StateVector v(space);
  for (const auto& [n, c] : coefficients) {
    if (!space->contains(n)) throw std::invalid_argument("smooth_potential: mode beyond the cutoff");
    v.coeff(n) = c;
  }
  const double sup = fine_sup_norm(v);
  return PotentialSpec{PotentialKind::Smooth, std::move(v), sup};
}

PotentialSpec default_smooth_potential(SpacePtr space) {
  std::map<int, Complex> c{{0, 0.5}};
  if (space->contains(1)) c[1] = c[-1] = 0.25;
  if (space->contains(2)) c[2] = c[-2] = 0.1;
  return smooth_potential(std::move(space), c);
}

PotentialSpec rough_potential(SpacePtr space, std::uint64_t seed, double sup_bound) {
  if (!(sup_bound > 0.0)) throw std::invalid_argument("rough_potential: bound must be > 0");
  const Philox4x32 rng = make_generator(seed, RngDomain::Potential);
  std::vector<double> values(space->grid_points());
  for (std::size_t j = 0; j < values.size(); j += 2) {
    const auto [a, b] = rng.uniforms(0, j / 2);
    values[j] = sup_bound * (2.0 * a - 1.0);
    if (j + 1 < values.size()) values[j + 1] = sup_bound * (2.0 * b - 1.0);
  }
  return from_grid(std::move(space), std::move(values), PotentialKind::Rough);
}

PotentialSpec custom_potential(SpacePtr space, std::span<const double> grid_values) {
  return from_grid(std::move(space), std::vector<double>(grid_values.begin(), grid_values.end()), PotentialKind::Custom);
}

PotentialSpec zero_potential(SpacePtr space) {
  return PotentialSpec{PotentialKind::Smooth, StateVector(std::move(space)), 0.0};
}

LipschitzMap LipschitzMap::zero() {
  return {"zero", [](Complex) { return Complex{}; }, 0.0, true};
}

LipschitzMap LipschitzMap::identity() {
  return {"identity", [](Complex z) { return z; }, 1.0, true};
}

LipschitzMap LipschitzMap::saturate() {
  return {"saturate", [](Complex z) { return z / (1.0 + std::abs(z)); }, 1.0, false};
}

LipschitzMap LipschitzMap::sine() {
  return {"sine", [](Complex z) { return Complex(std::sin(z.real()), std::sin(z.imag())); }, 1.0, false};
}

LipschitzMap LipschitzMap::from_name(const std::string& name) {
  if (name == "zero") return zero();
  if (name == "identity") return identity();
  if (name == "saturate") return saturate();
  if (name == "sine") return sine();
  throw std::invalid_argument("unknown Lipschitz map '" + name + "' (zero|identity|saturate|sine)");
}

namespace {

constexpr Complex kMinusI{0.0, -1.0};

/// Applies a map on the collocation grid, short-circuiting the linear builtins.
StateVector apply_map(const LipschitzMap& map, const StateVector& u) {
  if (map.name == "identity") return u;
  if (map.name == "zero") return StateVector(u.space_ptr());
  return nemytskij(map.f, u);
}

void require_origin_fixed(const LipschitzMap& map) {
  if (!map.f || std::abs(map.f(Complex{})) > 1e-14) {
    throw ConfigurationError("nonlinearity '" + map.name + "' must vanish at 0");
  }
}

void require_matching(const PotentialSpec& v, const StateVector& u0, const NoiseModel& noise) {
  if (v.field.space().mode_cutoff() != u0.space().mode_cutoff()) {
    throw ConfigurationError("potential and initial value use different cutoffs");
  }
  if (noise.mode_count() > u0.space().size()) throw ConfigurationError("noise mode count N_h exceeds 2K+1");
}

/// Lipschitz constant of u -> -i M_u Q^{1/2} in the Hilbert-Schmidt norm on H^sigma.
double multiplicative_noise_bound(const NoiseModel& noise, double sigma) {
  if (sigma == 0.0) return std::sqrt(2.0 * noise.trace()) * noise.basis_sup_norm();
  double total = 0.0;
  for (std::size_t i = 0; i < noise.mode_count(); ++i) {
    const double f = noise.frequency(i);
    total += noise.eigenvalues()[i] * std::pow(1.0 + f * f, sigma);
  }
  return std::sqrt(std::pow(2.0, sigma) * total);
}

std::shared_ptr<const DiagonalGenerator> schrodinger_generator(const StateVector& u0) {
  return std::make_shared<const DiagonalGenerator>(DiagonalGenerator::schrodinger(u0.space_ptr()));
}

/// V re-expressed on the space of u0, so that products see the same sigma.
StateVector potential_on(const PotentialSpec& v, const StateVector& u0) {
  return StateVector(u0.space_ptr(), std::vector<Complex>(v.field.coeffs().begin(), v.field.coeffs().end()));
}

}  // namespace

SemilinearProblem build_nonlinear(const LipschitzMap& phi, const LipschitzMap& psi, const PotentialSpec& potential,
                                  std::shared_ptr<const NoiseModel> noise, const StateVector& u0, double horizon) {
  require_origin_fixed(phi);
  require_origin_fixed(psi);
  require_matching(potential, u0, *noise);
  const double sigma = u0.space().sigma();
  if (sigma != 0.0 && !(phi.linear && psi.linear)) {
    throw ConfigurationError(
        "nonlinear Nemytskij maps are only supported on L^2 (sigma = 0); the available error analysis does not "
        "extend to sigma > 0");
  }
  const StateVector v = potential_on(potential, u0);
  ProblemSpec spec;
  spec.generator = schrodinger_generator(u0);
  spec.drift = [v, phi](double, const StateVector& u) {
    StateVector out = pointwise_multiply(v, u);
    if (phi.name != "zero") out += apply_map(phi, u);
    return out * kMinusI;
  };
  spec.diffusion = [noise, psi](double, const StateVector& u) {
    return NoiseOperator(noise, apply_map(psi, u) * kMinusI);
  };
  spec.drift_lipschitz = potential.multiplier_bound(sigma) + phi.lipschitz;
  spec.diffusion_lipschitz = psi.lipschitz * multiplicative_noise_bound(*noise, sigma);
  spec.initial_value = u0;
  spec.horizon = horizon;
  spec.noise = std::move(noise);
  spec.label = "schrodinger(phi=" + phi.name + ", psi=" + psi.name + ")";
  return SemilinearProblem(std::move(spec));
}

SemilinearProblem build_linear(const PotentialSpec& potential, std::shared_ptr<const NoiseModel> noise,
                               const StateVector& u0, double horizon) {
  return build_nonlinear(LipschitzMap::zero(), LipschitzMap::identity(), potential, std::move(noise), u0, horizon);
}

SemilinearProblem build_additive(const PotentialSpec& potential, std::shared_ptr<const NoiseModel> noise,
                                 const StateVector& u0, double horizon) {
  require_matching(potential, u0, *noise);
  const StateVector v = potential_on(potential, u0);
  const NoiseOperator additive(noise, StateVector::constant(u0.space_ptr(), 1.0));
  ProblemSpec spec;
  spec.generator = schrodinger_generator(u0);
  spec.drift = [v](double, const StateVector& u) { return pointwise_multiply(v, u) * kMinusI; };
  spec.diffusion = [additive](double, const StateVector&) { return additive; };
  spec.drift_lipschitz = potential.multiplier_bound(u0.space().sigma());
  spec.diffusion_lipschitz = 0.0;
  spec.initial_value = u0;
  spec.horizon = horizon;
  spec.noise = std::move(noise);
  spec.label = "schrodinger(additive)";
  return SemilinearProblem(std::move(spec));
}

StateVector rough_initial_data(SpacePtr space, std::uint64_t seed) {
  const Philox4x32 rng = make_generator(seed, RngDomain::InitialData);
  StateVector u(space);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [a, b] = rng.normals(0, i);
    u.coeffs()[i] = Complex(a, b);
  }
  return u * Complex(1.0 / norm_sigma(u, 0.0));
}

}  // namespace sevsteps
