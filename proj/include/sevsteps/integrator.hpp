#pragma once

// Semilinear stochastic evolution problems dU = (AU + F(t,U)) dt + G(t,U) dW
// and their time discretisation U^j = R_k (U^{j-1} + k F + G dW_j).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sevsteps/noise.hpp"
#include "sevsteps/schemes.hpp"
#include "sevsteps/spectral.hpp"

namespace sevsteps {

/// Raised for inconsistent problem or experiment set-ups.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The operator h -> post( P_K( field * sum_i d_i h_i exp(i f_i x) ) ) from
/// the noise coordinates into the state space, with d_i = sqrt(lambda_i).
class NoiseOperator {
 public:
  NoiseOperator(std::shared_ptr<const NoiseModel> noise, StateVector field);

  const StateVector& field() const noexcept { return field_; }
  const NoiseModel& noise() const noexcept { return *noise_; }
  const std::optional<DiagonalOperator>& post() const noexcept { return post_; }

  /// G dW for one increment vector (one entry per noise mode).
  StateVector apply(std::span<const Complex> dW) const;
  /// Image of the i-th noise coordinate vector.
  StateVector column(std::size_t mode) const;
  /// The same operator followed by a diagonal operator.
  NoiseOperator post_composed(const DiagonalOperator& op) const;

  /// Hilbert-Schmidt norm into the ambient H^sigma of the field.
  double hilbert_schmidt_norm() const;
  friend double hilbert_schmidt_distance(const NoiseOperator& a, const NoiseOperator& b);

 private:
  std::shared_ptr<const NoiseModel> noise_;
  StateVector field_;
  std::optional<DiagonalOperator> post_;
};

using Drift = std::function<StateVector(double t, const StateVector& u)>;
using Diffusion = std::function<NoiseOperator(double t, const StateVector& u)>;
using InitialSampler = std::function<StateVector(PathKey)>;

struct ProblemSpec {
  std::shared_ptr<const DiagonalGenerator> generator;
  Drift drift;
  Diffusion diffusion;
  double drift_lipschitz = 0.0;
  double diffusion_lipschitz = 0.0;
  /// Either a fixed initial value or a per-path sampler.
  std::optional<StateVector> initial_value;
  InitialSampler initial_sampler;
  double horizon = 1.0;
  std::shared_ptr<const NoiseModel> noise;
  std::string label;
};

/// Validated problem.  Construction checks finiteness at zero and probes the
/// declared Lipschitz constants of F and G on 100 random pairs; a violation
/// throws ConfigurationError.
class SemilinearProblem {
 public:
  explicit SemilinearProblem(ProblemSpec spec, std::uint64_t probe_seed = 0);

  const DiagonalGenerator& generator() const noexcept { return *spec_.generator; }
  const std::shared_ptr<const DiagonalGenerator>& generator_ptr() const noexcept { return spec_.generator; }
  const SpacePtr& space_ptr() const noexcept { return spec_.generator->space_ptr(); }
  double sigma() const noexcept { return spec_.generator->space().sigma(); }
  double horizon() const noexcept { return spec_.horizon; }
  const NoiseModel& noise() const noexcept { return *spec_.noise; }
  const std::shared_ptr<const NoiseModel>& noise_ptr() const noexcept { return spec_.noise; }
  double drift_lipschitz() const noexcept { return spec_.drift_lipschitz; }
  double diffusion_lipschitz() const noexcept { return spec_.diffusion_lipschitz; }
  const std::string& label() const noexcept { return spec_.label; }
  const ProblemSpec& spec() const noexcept { return spec_; }

  StateVector drift(double t, const StateVector& u) const { return spec_.drift(t, u); }
  NoiseOperator diffusion(double t, const StateVector& u) const { return spec_.diffusion(t, u); }
  StateVector initial_value(PathKey key) const;

  /// Largest observed ||F(u) - F(v)|| / ||u - v|| and the G analogue in the
  /// Hilbert-Schmidt norm over the construction probe.
  double observed_drift_quotient() const noexcept { return observed_drift_; }
  double observed_diffusion_quotient() const noexcept { return observed_diffusion_; }

 private:
  ProblemSpec spec_;
  double observed_drift_ = 0.0;
  double observed_diffusion_ = 0.0;
};

struct Trajectory {
  double step_size = 0.0;
  std::string scheme;
  PathKey key;
  std::vector<StateVector> states;  ///< U^0 .. U^{N}

  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  double time(std::size_t j) const noexcept { return step_size * static_cast<double>(j); }
  /// Every factor-th state, i.e. the trajectory seen on the grid of step factor*k.
  Trajectory subsample(std::size_t factor) const;
};

/// R_k (u + k F(t,u) + G(t,u) dW).
StateVector step(const DiagonalOperator& rk, const Drift& drift, const Diffusion& diffusion, const StateVector& u,
                 double t, double k, std::span<const Complex> dW);

struct RunOptions {
  /// Check the recursion against the variation-of-constants sum at three
  /// random indices and throw if they disagree beyond 1e-9 relative.
  bool verify_variation_of_constants = false;
  /// Keep only every record_stride-th state (1 keeps all).
  std::size_t record_stride = 1;
};

/// Discrete scheme on a path whose step equals k and whose horizon equals T.
Trajectory run_discrete(const SemilinearProblem& problem, const RationalScheme& scheme, double k, const NoisePath& path,
                        const RunOptions& options = {});

/// Largest relative discrepancy between the recursion output and the
/// variation-of-constants formula at the given indices.
double variation_of_constants_discrepancy(const SemilinearProblem& problem, const RationalScheme& scheme,
                                          const NoisePath& path, const Trajectory& trajectory,
                                          std::span<const std::size_t> indices);

/// Fine-grid exponential Euler surrogate of the mild solution.
Trajectory run_reference(const SemilinearProblem& problem, double k_ref, const NoisePath& path,
                         std::size_t record_stride = 1);

/// run_discrete on the Yosida-lifted problem with parameter m.
Trajectory run_regularised(const SemilinearProblem& problem, double m, const RationalScheme& scheme, double k,
                           const NoisePath& path, const RunOptions& options = {});

}  // namespace sevsteps
