#include "sevsteps/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sevsteps/philox.hpp"
#include "sevsteps/regularise.hpp"

namespace sevsteps {

// ---------------------------------------------------------------- NoiseOperator

NoiseOperator::NoiseOperator(std::shared_ptr<const NoiseModel> noise, StateVector field)
    : noise_(std::move(noise)), field_(std::move(field)) {
  if (!noise_) throw ConfigurationError("NoiseOperator: missing noise model");
  const int cutoff = field_.space().mode_cutoff();
  if (noise_->frequency(0) < -cutoff || noise_->frequency(noise_->mode_count() - 1) > cutoff) {
    throw ConfigurationError("noise modes exceed the spatial cutoff (need N_h <= 2K+1)");
  }
}

StateVector NoiseOperator::apply(std::span<const Complex> dW) const {
  if (dW.size() != noise_->mode_count()) {
    throw std::invalid_argument("NoiseOperator::apply: increment has " + std::to_string(dW.size()) +
                                " modes, noise model has " + std::to_string(noise_->mode_count()));
  }
  StateVector injected(field_.space_ptr());
  auto c = injected.coeffs();
  const auto& d = noise_->sqrt_eigenvalues();
  const std::size_t offset = static_cast<std::size_t>(field_.space().mode_cutoff() + noise_->frequency(0));
  for (std::size_t i = 0; i < dW.size(); ++i) c[offset + i] = d[i] * dW[i];
  StateVector out = pointwise_multiply(field_, injected);
  if (post_) post_->apply_in_place(out);
  return out;
}

StateVector NoiseOperator::column(std::size_t mode) const {
  if (mode >= noise_->mode_count()) throw std::out_of_range("NoiseOperator::column: mode out of range");
  StateVector out(field_.space_ptr());
  const int cutoff = field_.space().mode_cutoff();
  const int shift = noise_->frequency(mode);
  const double d = noise_->sqrt_eigenvalues()[mode];
  auto dst = out.coeffs();
  const auto src = field_.coeffs();
  for (int n = -cutoff; n <= cutoff; ++n) {
    const int m = n - shift;
    if (m < -cutoff || m > cutoff) continue;
    dst[static_cast<std::size_t>(n + cutoff)] = d * src[static_cast<std::size_t>(m + cutoff)];
  }
  if (post_) post_->apply_in_place(out);
  return out;
}

NoiseOperator NoiseOperator::post_composed(const DiagonalOperator& op) const {
  if (op.size() != field_.size()) throw std::invalid_argument("post_composed: size mismatch");
  NoiseOperator out = *this;
  out.post_ = post_ ? op.compose(*post_) : op;
  return out;
}

double NoiseOperator::hilbert_schmidt_norm() const {
  double total = 0.0;
  for (std::size_t i = 0; i < noise_->mode_count(); ++i) {
    const double c = norm(column(i));
    total += c * c;
  }
  return std::sqrt(total);
}

double hilbert_schmidt_distance(const NoiseOperator& a, const NoiseOperator& b) {
  if (a.noise().mode_count() != b.noise().mode_count()) {
    throw std::invalid_argument("hilbert_schmidt_distance: noise models differ");
  }
  require_same_space(a.field(), b.field());
  double total = 0.0;
  for (std::size_t i = 0; i < a.noise().mode_count(); ++i) {
    const double c = norm(a.column(i) - b.column(i));
    total += c * c;
  }
  return std::sqrt(total);
}

// ------------------------------------------------------------ SemilinearProblem

namespace {

constexpr int kProbePairs = 100;

StateVector random_state(const SpacePtr& space, const Philox4x32& rng, std::uint64_t stream, std::uint64_t& counter) {
  StateVector u(space);
  const auto [a, b] = rng.uniforms(stream, counter++);
  // amplitudes spread over three decades; half the draws are rough, half smooth
  const double amplitude = std::pow(10.0, -2.0 + 3.0 * a);
  const double decay = b < 0.5 ? 0.0 : 1.0 + 2.0 * b;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [z1, z2] = rng.normals(stream, counter++);
    const double n = space->frequency(i);
    u.coeffs()[i] = amplitude * std::pow(1.0 + n * n, -0.5 * decay) * Complex(z1, z2);
  }
  return u;
}

bool within(double quotient, double declared) {
  return quotient <= declared * (1.0 + 1e-9) + 1e-12;
}

}  // namespace

SemilinearProblem::SemilinearProblem(ProblemSpec spec, std::uint64_t probe_seed) : spec_(std::move(spec)) {
  if (!spec_.generator) throw ConfigurationError("problem: missing generator");
  if (!spec_.noise) throw ConfigurationError("problem: missing noise model");
  if (!spec_.drift || !spec_.diffusion) throw ConfigurationError("problem: drift and diffusion are required");
  if (!(spec_.horizon > 0.0) || !std::isfinite(spec_.horizon)) throw ConfigurationError("problem: horizon must be > 0");
  if (!(spec_.drift_lipschitz >= 0.0) || !(spec_.diffusion_lipschitz >= 0.0)) {
    throw ConfigurationError("problem: Lipschitz constants must be >= 0");
  }
  if (!spec_.generator->generates_contraction_semigroup()) {
    throw ConfigurationError("problem: generator has an eigenvalue with positive real part");
  }
  if (!spec_.initial_value && !spec_.initial_sampler) throw ConfigurationError("problem: missing initial value");
  const SpacePtr& space = spec_.generator->space_ptr();
  if (spec_.initial_value && !spec_.initial_value->space().compatible(*space)) {
    throw ConfigurationError("problem: initial value lives in a different space");
  }
  if (spec_.noise->mode_count() > space->size()) {
    throw ConfigurationError("problem: noise mode count N_h exceeds 2K+1");
  }

  const StateVector zero(space);
  if (!std::isfinite(norm(drift(0.0, zero))) || !std::isfinite(diffusion(0.0, zero).hilbert_schmidt_norm())) {
    throw ConfigurationError("problem: F(t,0) or G(t,0) is not finite");
  }

  const Philox4x32 rng = make_generator(probe_seed, RngDomain::Probe);
  for (int pair = 0; pair < kProbePairs; ++pair) {
    std::uint64_t counter = 0;
    const auto stream = static_cast<std::uint64_t>(pair);
    const StateVector u = random_state(space, rng, stream, counter);
    StateVector v = random_state(space, rng, stream, counter);
    if (pair % 2 == 1) v = u + v * Complex(1e-3);  // nearby pair
    const double t = spec_.horizon * rng.uniforms(stream, counter++).first;
    const double dist = norm(u - v);
    if (!(dist > 0.0)) continue;
    const double qf = norm(drift(t, u) - drift(t, v)) / dist;
    const double qg = hilbert_schmidt_distance(diffusion(t, u), diffusion(t, v)) / dist;
    observed_drift_ = std::max(observed_drift_, qf);
    observed_diffusion_ = std::max(observed_diffusion_, qg);
    if (!within(qf, spec_.drift_lipschitz)) {
      throw ConfigurationError("problem '" + spec_.label + "': drift Lipschitz quotient " + std::to_string(qf) +
                               " exceeds declared constant " + std::to_string(spec_.drift_lipschitz));
    }
    if (!within(qg, spec_.diffusion_lipschitz)) {
      throw ConfigurationError("problem '" + spec_.label + "': diffusion Lipschitz quotient " + std::to_string(qg) +
                               " exceeds declared constant " + std::to_string(spec_.diffusion_lipschitz));
    }
  }
}

StateVector SemilinearProblem::initial_value(PathKey key) const {
  if (spec_.initial_value) return *spec_.initial_value;
  StateVector u = spec_.initial_sampler(key);
  if (!u.space().compatible(spec_.generator->space())) {
    throw ConfigurationError("problem: sampled initial value lives in a different space");
  }
  return u;
}

// ----------------------------------------------------------------- Trajectories

Trajectory Trajectory::subsample(std::size_t factor) const {
  if (factor == 0 || steps() % factor != 0) throw std::invalid_argument("subsample: factor must divide the step count");
  Trajectory out;
  out.step_size = step_size * static_cast<double>(factor);
  out.scheme = scheme;
  out.key = key;
  out.states.reserve(steps() / factor + 1);
  for (std::size_t j = 0; j < states.size(); j += factor) out.states.push_back(states[j]);
  return out;
}

StateVector step(const DiagonalOperator& rk, const Drift& drift, const Diffusion& diffusion, const StateVector& u,
                 double t, double k, std::span<const Complex> dW) {
  StateVector next = u;
  next += drift(t, u) * Complex(k);
  next += diffusion(t, u).apply(dW);
  rk.apply_in_place(next);
  return next;
}

namespace {

void check_grid(const SemilinearProblem& problem, double k, const NoisePath& path) {
  if (path.modes() != problem.noise().mode_count()) {
    throw ConfigurationError("noise path has " + std::to_string(path.modes()) + " modes, problem expects " +
                             std::to_string(problem.noise().mode_count()));
  }
  if (std::abs(path.step_size() - k) > 1e-12 * k) {
    throw ConfigurationError("noise path step " + std::to_string(path.step_size()) + " does not match k = " +
                             std::to_string(k));
  }
  if (path.steps() != step_count(problem.horizon(), k)) {
    throw ConfigurationError("noise path does not cover the horizon");
  }
}

Trajectory run_scheme(const SemilinearProblem& problem, const RationalScheme& scheme, double k, const NoisePath& path,
                      std::size_t stride, bool keep_all) {
  check_grid(problem, k, path);
  if (stride == 0 || path.steps() % stride != 0) {
    throw ConfigurationError("record stride must divide the step count");
  }
  const DiagonalOperator rk = build_Rk(scheme, problem.generator(), k);
  const std::size_t record = keep_all ? 1 : stride;
  Trajectory out;
  out.step_size = k * static_cast<double>(record);
  out.scheme = std::string(scheme.name());
  out.key = path.key();
  out.states.reserve(path.steps() / record + 1);
  StateVector u = problem.initial_value(path.key());
  out.states.push_back(u);
  const Drift& drift = problem.spec().drift;
  const Diffusion& diffusion = problem.spec().diffusion;
  for (std::size_t j = 1; j <= path.steps(); ++j) {
    u = step(rk, drift, diffusion, u, k * static_cast<double>(j - 1), k, path.increment(j - 1));
    if (j % record == 0) out.states.push_back(u);
  }
  return out;
}

}  // namespace

double variation_of_constants_discrepancy(const SemilinearProblem& problem, const RationalScheme& scheme,
                                          const NoisePath& path, const Trajectory& trajectory,
                                          std::span<const std::size_t> indices) {
  const double k = path.step_size();
  if (trajectory.steps() != path.steps() || std::abs(trajectory.step_size - k) > 1e-12 * k) {
    throw std::invalid_argument("variation_of_constants_discrepancy: trajectory and path grids differ");
  }
  const DiagonalOperator rk = build_Rk(scheme, problem.generator(), k);
  double worst = 0.0;
  for (std::size_t j : indices) {
    if (j > trajectory.steps()) throw std::out_of_range("variation_of_constants_discrepancy: index beyond horizon");
    StateVector sum = rk.power(static_cast<unsigned>(j)).apply(trajectory.states.front());
    for (std::size_t i = 0; i < j; ++i) {
      const double t = k * static_cast<double>(i);
      const StateVector& ui = trajectory.states[i];
      StateVector term = problem.drift(t, ui) * Complex(k);
      term += problem.diffusion(t, ui).apply(path.increment(i));
      sum += rk.power(static_cast<unsigned>(j - i)).apply(term);
    }
    const StateVector& uj = trajectory.states[j];
    const double scale = std::max({norm(uj), norm(sum), std::numeric_limits<double>::min()});
    worst = std::max(worst, norm(sum - uj) / scale);
  }
  return worst;
}

Trajectory run_discrete(const SemilinearProblem& problem, const RationalScheme& scheme, double k, const NoisePath& path,
                        const RunOptions& options) {
  if (!options.verify_variation_of_constants) {
    return run_scheme(problem, scheme, k, path, options.record_stride, false);
  }
  Trajectory full = run_scheme(problem, scheme, k, path, options.record_stride, true);
  const Philox4x32 rng = make_generator(path.key().seed, RngDomain::Probe);
  std::vector<std::size_t> indices;
  for (std::uint64_t draw = 0; draw < 3; ++draw) {
    const double u = rng.uniforms(path.key().path_index, 0x766f63ULL + draw).first;
    indices.push_back(1 + std::min<std::size_t>(full.steps() - 1, static_cast<std::size_t>(u * full.steps())));
  }
  const double gap = variation_of_constants_discrepancy(problem, scheme, path, full, indices);
  if (!(gap <= 1e-9)) {
    throw std::runtime_error("recursion and variation-of-constants formula disagree (relative gap " +
                             std::to_string(gap) + ")");
  }
  return options.record_stride == 1 ? full : full.subsample(options.record_stride);
}

Trajectory run_reference(const SemilinearProblem& problem, double k_ref, const NoisePath& path,
                         std::size_t record_stride) {
  Trajectory out = run_scheme(problem, RationalScheme::exponential_euler(), k_ref, path, record_stride, false);
  out.scheme = "reference";
  return out;
}

Trajectory run_regularised(const SemilinearProblem& problem, double m, const RationalScheme& scheme, double k,
                           const NoisePath& path, const RunOptions& options) {
  return run_discrete(lift_problem(problem, m), scheme, k, path, options);
}

}  // namespace sevsteps
