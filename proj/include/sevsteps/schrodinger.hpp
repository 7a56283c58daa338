#pragma once

// Stochastic Schroedinger problems on the torus:
//   du = -i (Delta u + V u + phi(u)) dt - i psi(u) dW
// with A = -i Delta, F(u) = -i (V u + phi(u)), G(u) = -i M_{psi(u)} Q^{1/2}.

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "sevsteps/integrator.hpp"

namespace sevsteps {

enum class PotentialKind { Smooth, Rough, Custom };

struct PotentialSpec {
  PotentialKind kind = PotentialKind::Smooth;
  StateVector field;           ///< Fourier coefficients of V
  double sup_norm = 0.0;       ///< max |V| over the evaluation grid
  /// Lipschitz constant of u -> P_K(V u) on H^sigma:
  /// 2^{sigma/2} sum_m |V_m| (1 + m^2)^{sigma/2}.
  double multiplier_bound(double sigma) const;
};

/// V(x) = sum_n c_n exp(i n x) for the given coefficients; sup_norm is taken
/// on a grid 64 times finer than the collocation grid.
PotentialSpec smooth_potential(SpacePtr space, const std::map<int, Complex>& coefficients);
/// The five-mode real potential 0.5 + 0.5 cos x + 0.2 cos 2x.
PotentialSpec default_smooth_potential(SpacePtr space);
/// i.i.d. uniform values in [-bound, bound] on the collocation grid.
PotentialSpec rough_potential(SpacePtr space, std::uint64_t seed, double sup_bound);
/// Real values on the collocation grid.
PotentialSpec custom_potential(SpacePtr space, std::span<const double> grid_values);
PotentialSpec zero_potential(SpacePtr space);

/// Scalar map with a declared global Lipschitz constant.
struct LipschitzMap {
  std::string name;
  ScalarFunction f;
  double lipschitz = 0.0;
  bool linear = false;

  static LipschitzMap zero();
  static LipschitzMap identity();
  /// z / (1 + |z|)
  static LipschitzMap saturate();
  /// sin(Re z) + i sin(Im z)
  static LipschitzMap sine();
  /// by name: zero | identity | saturate | sine
  static LipschitzMap from_name(const std::string& name);
};

/// Linear multiplicative noise (psi = identity, phi = 0).  Works on the H^sigma
/// space of u0.
SemilinearProblem build_linear(const PotentialSpec& potential, std::shared_ptr<const NoiseModel> noise,
                               const StateVector& u0, double horizon);

/// Nonlinear variant.  Requires phi(0) = psi(0) = 0 and, unless both maps
/// are linear, sigma = 0.
SemilinearProblem build_nonlinear(const LipschitzMap& phi, const LipschitzMap& psi, const PotentialSpec& potential,
                                  std::shared_ptr<const NoiseModel> noise, const StateVector& u0, double horizon);

/// Additive noise with the linear drift -i V u:  du = -i(Delta u + V u) dt + dW.
SemilinearProblem build_additive(const PotentialSpec& potential, std::shared_ptr<const NoiseModel> noise,
                                 const StateVector& u0, double horizon);

/// Flat random spectrum normalised to unit L^2 norm (no decay beyond L^2).
StateVector rough_initial_data(SpacePtr space, std::uint64_t seed);

}  // namespace sevsteps
