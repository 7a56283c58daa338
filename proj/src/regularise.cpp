#include "sevsteps/regularise.hpp"

#include <stdexcept>

namespace sevsteps {

YosidaOperator::YosidaOperator(const DiagonalGenerator& generator, double m) : m_(m) {
  if (!(m > 0.0)) throw std::invalid_argument("yosida: m must be > 0");
  DiagonalOperator r = resolvent(generator, m);
  std::vector<Complex> mult(r.multipliers().begin(), r.multipliers().end());
  for (auto& c : mult) c *= m;
  op_ = DiagonalOperator(std::move(mult));
}

YosidaOperator yosida(const DiagonalGenerator& generator, double m) { return YosidaOperator(generator, m); }

SemilinearProblem lift_problem(const SemilinearProblem& problem, double m) {
  const auto y = std::make_shared<const DiagonalOperator>(yosida(problem.generator(), m).as_operator());
  ProblemSpec spec = problem.spec();
  Drift drift = spec.drift;
  Diffusion diffusion = spec.diffusion;
  spec.drift = [drift, y](double t, const StateVector& u) { return y->apply(drift(t, u)); };
  spec.diffusion = [diffusion, y](double t, const StateVector& u) { return diffusion(t, u).post_composed(*y); };
  if (spec.initial_value) spec.initial_value = y->apply(*spec.initial_value);
  if (spec.initial_sampler) {
    InitialSampler sampler = spec.initial_sampler;
    spec.initial_sampler = [sampler, y](PathKey key) { return y->apply(sampler(key)); };
  }
  spec.label += " (m=" + std::to_string(m) + ")";
  return SemilinearProblem(std::move(spec));
}

double yosida_defect(const StateVector& u, const DiagonalGenerator& generator, double m) {
  return norm(yosida(generator, m).apply(u) - u);
}

}  // namespace sevsteps
