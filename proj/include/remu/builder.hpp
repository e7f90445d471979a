#pragma once

#include <cstddef>
#include <vector>

#include "remu/model.hpp"

namespace remu {

/// Interpolation points y_i with their objective values. `newest` indexes x_new.
class InterpolationSet {
 public:
  InterpolationSet() = default;
  InterpolationSet(std::vector<Vector> points, std::vector<double> values, std::size_t newest);

  std::size_t size() const { return points_.size(); }
  Eigen::Index dim() const { return points_.empty() ? 0 : points_.front().size(); }

  const std::vector<Vector>& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }
  const Vector& point(std::size_t i) const { return points_[i]; }
  double value(std::size_t i) const { return values_[i]; }
  std::size_t newest() const { return newest_; }

  /// Index of a stored point equal to `x` up to 1e-14 relative, or size() if absent.
  std::size_t find(const Vector& x) const;

  void replace(std::size_t i, Vector point, double value);
  void set_value(std::size_t i, double value);
  void set_newest(std::size_t i);

  /// Throws std::invalid_argument unless the cardinality bounds
  /// n+2 <= m <= (n+1)(n+2)/2 hold and the points are pairwise distinct.
  void validate() const;

 private:
  std::vector<Vector> points_;
  std::vector<double> values_;
  std::size_t newest_ = 0;
};

/// Block KKT matrix of the ReMU subproblem together with its right-hand side.
/// Unknown ordering: (lambda_1..lambda_m, c_hat, g_hat_1..g_hat_n).
struct KktSystem {
  Matrix W;
  Vector rhs;
  Matrix A;
  Vector J;
  Matrix X;
  double scalar_block = 0.0;
  double lower_right = 0.0;  ///< Diagonal value of the bottom-right -2*eta2*I block.
  EtaCoefficients eta;
  Vector center;
  int n = 0;
  std::size_t m = 0;
};

struct KktSolution {
  Vector lambda;
  double c_hat = 0.0;
  Vector g_hat;
  double relative_residual = 0.0;
  double rcond = 0.0;
};

KktSystem assemble_kkt(const InterpolationSet& set, const Vector& center,
                       const WeightCoefficients& C, double r, const Vector& residuals);

/// Equilibrated LU with partial pivoting plus one refinement sweep.
/// Throws IllConditionedKkt when a pivot of the equilibrated matrix falls
/// below machine epsilon * size * ||W||.
KktSolution solve_kkt(const KktSystem& system);

/// Full output of a model update: the new model, the difference D_k and solve stats.
struct BuildReport {
  QuadraticModel model;
  QuadraticModel difference;
  double trace_target = 0.0;  ///< The eliminated variable T, which must equal Tr(H_hat).
  double kkt_residual = 0.0;
  double rcond = 0.0;
};

BuildReport build_model_report(const QuadraticModel& prev, const InterpolationSet& set,
                               const Vector& center, const WeightCoefficients& C, double r);

/// ReMU update of `prev` so that the result interpolates `set`.
QuadraticModel build_model(const QuadraticModel& prev, const InterpolationSet& set,
                           const Vector& center, const WeightCoefficients& C, double r);

}  // namespace remu
