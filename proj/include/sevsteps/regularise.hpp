#pragma once

// Resolvent regularisation m R(m, A) of drift, diffusion and initial data.

#include "sevsteps/integrator.hpp"
#include "sevsteps/spectral.hpp"

namespace sevsteps {

/// The diagonal operator m (m - A)^{-1}.
class YosidaOperator {
 public:
  YosidaOperator(const DiagonalGenerator& generator, double m);

  double parameter() const noexcept { return m_; }
  const DiagonalOperator& as_operator() const noexcept { return op_; }
  Complex multiplier(std::size_t index) const noexcept { return op_[index]; }
  StateVector apply(const StateVector& u) const { return op_.apply(u); }
  double operator_norm() const { return op_.operator_norm(); }

 private:
  double m_;
  DiagonalOperator op_;
};

YosidaOperator yosida(const DiagonalGenerator& generator, double m);

/// F_m = Y F, G_m = Y G, u0_m = Y u0 with Y = m R(m, A).  The declared
/// Lipschitz constants carry over because ||Y|| <= 1.
SemilinearProblem lift_problem(const SemilinearProblem& problem, double m);

/// ||(m R(m, A) - I) u||
double yosida_defect(const StateVector& u, const DiagonalGenerator& generator, double m);

}  // namespace sevsteps
