#pragma once

#include "remu/model.hpp"

namespace remu {

enum class SubproblemMethod {
  exact,        ///< Eigendecomposition plus secular equation (More-Sorensen), including the hard case.
  steihaug_cg,  ///< Truncated conjugate gradient; cheaper for large n.
};

/// Minimizer of the model over the ball ||d|| <= delta about its base point.
/// Returns the step d, never the trial point. The result never does worse than
/// the Cauchy step.
Vector solve_subproblem(const QuadraticModel& model, double delta,
                        SubproblemMethod method = SubproblemMethod::exact);

/// Minimizer of the model along -g inside the ball.
Vector cauchy_step(const Vector& g, const Matrix& H, double delta);

}  // namespace remu
