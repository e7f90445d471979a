#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "remu/builder.hpp"
#include "remu/model.hpp"
#include "remu/trust_region.hpp"

namespace remu {

// ---- Truncated Newton steps -------------------------------------------------

/// Gradient and Hessian of some function at a point.
struct LocalDerivatives {
  Vector g;
  Matrix H;
};

LocalDerivatives derivatives_at(const QuadraticModel& model, const Vector& z);

/// -H^{-1} g clipped to the ball of radius delta. Throws SingularHessian when the
/// smallest singular value of H is below 1e-12 * ||H||_2.
Vector truncated_newton_step(const Vector& g, const Matrix& H, double delta);

/// Same step with a minimum-norm least-squares solve in place of H^{-1}.
Vector truncated_newton_step_lstsq(const Vector& g, const Matrix& H, double delta);

/// ||N(h1) - N(h2)|| / delta, a value in [0, 2].
double tn_step_error(const LocalDerivatives& h1, const LocalDerivatives& h2, double delta);
double tn_step_error(const QuadraticModel& h1, const QuadraticModel& h2, const Vector& z, double delta);

// ---- KKT matrix distance and error ------------------------------------------

/// ||W1 - W2||_F.
double kkt_distance(const KktSystem& a, const KktSystem& b);

/// Point-set functionals entering the KKT error. `Rx` is the cross sum
/// sum_ij (s_i^T s_j)^2 |s_i|^2 |s_j|^2 that appears in the exact expansion.
struct GeometryFunctionals {
  double R1 = 0.0;
  double R2 = 0.0;
  double R3 = 0.0;
  double Rx = 0.0;
};

GeometryFunctionals geometry_functionals(const std::vector<Vector>& points, const Vector& center);

/// (C1, C2) with C3 = 1 - C1 - C2 implied.
struct WeightPair {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Squared-difference coefficients of the KKT blocks between two weight pairs.
/// D = R1 p1 + R2 p2 + Rx px + R3 p3 + p4.
struct PTerms {
  double p1 = 0.0;
  double p2 = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  double px = 0.0;
};

enum class ErrorForm {
  exact,    ///< Matches ||W - W*||_F^2 from direct assembly.
  printed,  ///< Four-term closed form as published (no cross term, single J block, scaled P3/P4).
};

PTerms p_terms(WeightPair C, WeightPair Cs, int n, double r, ErrorForm form = ErrorForm::exact);

/// Squared error D(C, C*) for the given geometry.
double kkt_error_sq(WeightPair C, WeightPair Cs, int n, double r, const GeometryFunctionals& geom,
                    ErrorForm form = ErrorForm::exact);

double kkt_error(WeightPair C, WeightPair Cs, int n, double r, const GeometryFunctionals& geom,
                 ErrorForm form = ErrorForm::exact);

/// Limits of P1 and P4 as r -> 0.
double p1_limit(WeightPair C, WeightPair Cs);
double p4_limit(WeightPair C, WeightPair Cs, int n, ErrorForm form = ErrorForm::printed);

// ---- Averages over the coefficient region ------------------------------------

/// Integral over the triangle {x, y >= 0, x + y <= side} by adaptive subdivision with a
/// degree-5 rule. Throws std::runtime_error when `rel_tol` is not reached.
double integrate_triangle(const std::function<double(double, double)>& f, double side,
                          double rel_tol = 1e-6);

/// (2 / (1-eps)^2) times the integral of D(C, C*) over the region C1*, C2* >= 0, C1* + C2* <= 1 - eps.
double avg_squared_error(WeightPair C, int n, double r, double epsilon, const GeometryFunctionals& geom,
                         ErrorForm form = ErrorForm::exact);

struct LimitingErrors {
  double e1 = 0.0;  ///< Coefficient of R1.
  double e2 = 0.0;
};

/// Closed forms of the r -> 0 average error. e1 is shared by both forms; e2 integrates
/// the chosen P4 limit.
LimitingErrors limiting_error_terms(WeightPair C, int n, double epsilon,
                                    ErrorForm form = ErrorForm::printed);

struct GridArgmin {
  double c1 = 0.0;
  double c2 = 0.0;
  double value = 0.0;
  double cell = 0.0;  ///< Grid spacing.
};

/// Minimizer of f over a k-by-k grid of [0, 1-eps]^2 restricted to C1 + C2 <= 1 - eps.
GridArgmin region_grid_argmin(const std::function<double(double, double)>& f, double epsilon, int k = 200);

struct BarycenterCheck {
  WeightPair closed_form;
  GridArgmin grid;
  bool verified = false;  ///< Grid argmin within one cell of the closed form.
};

/// Minimizer of the average squared Euclidean distance to the region, checked by grid search.
BarycenterCheck euclidean_barycenter_check(double epsilon, int k = 200);

// ---- Run statistics -----------------------------------------------------------

/// Fraction of runs with some per-iteration KKT residual above `threshold`, keyed by weights label.
std::map<std::string, double> kkt_warning_stats(const std::vector<SolverResult>& results,
                                                double threshold = 1e-8);

/// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

void write_error_surface_csv(std::ostream& out, const std::function<double(double, double)>& f,
                             double epsilon, int k);

}  // namespace remu
