#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "remu/diagnostics.hpp"
#include "remu/problems.hpp"

namespace remu {

struct TnExperimentConfig {
  TestProblem problem;             ///< The generator runs on this (possibly noisy) objective.
  std::size_t iterations = 100;
  SetSize set_size = SetSize::n_plus_3;
  WeightCoefficients generator = WeightCoefficients::barycentric();
  std::vector<WeightCoefficients> weights = standard_weight_rows();
};

struct TnErrorRow {
  std::size_t iteration = 0;
  std::size_t weight_index = 0;
  double error = 0.0;
};

struct TnExperimentResult {
  std::vector<WeightCoefficients> weights;
  std::vector<TnErrorRow> rows;
  std::size_t singular_fallbacks = 0;  ///< Steps taken with the least-squares solve.
  std::size_t build_failures = 0;

  std::vector<double> errors_for(std::size_t weight_index) const;
};

/// Central finite-difference gradient and Hessian of the smooth sum of squares.
LocalDerivatives finite_difference_derivatives(const ResidualFn& residuals, const Vector& x);

/// Replays one generator trajectory and, on the shared sets and radii, compares the
/// truncated Newton step of every weight setting's own model chain with the step of
/// the smooth objective.
TnExperimentResult tn_error_experiment(const TnExperimentConfig& config);

/// iteration,weights,error rows.
void write_tn_error_csv(std::ostream& out, const TnExperimentResult& result);

/// weights,q30,q50,q70 rows.
void write_tn_quantiles_csv(std::ostream& out, const TnExperimentResult& result);

}  // namespace remu
