#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace remu {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// m(x) = 1/2 (x-b)^T H (x-b) + g^T (x-b) + c about the base point b.
struct QuadraticModel {
  Vector base_point;
  double c = 0.0;
  Vector g;
  Matrix H;

  QuadraticModel() = default;
  QuadraticModel(Vector base, double c_, Vector g_, Matrix H_);

  /// Constant model equal to `value` everywhere, expressed about `base`.
  static QuadraticModel constant(const Vector& base, double value);

  Eigen::Index dim() const { return base_point.size(); }
};

/// Weights on the H^0, H^1 and H^2 seminorms; components lie on the simplex.
class WeightCoefficients {
 public:
  WeightCoefficients(double c1, double c2, double c3);

  double c1() const { return c_[0]; }
  double c2() const { return c_[1]; }
  double c3() const { return c_[2]; }

  friend bool operator==(const WeightCoefficients&, const WeightCoefficients&) = default;

  static WeightCoefficients frobenius() { return {0.0, 0.0, 1.0}; }
  static WeightCoefficients barycentric() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

 private:
  double c_[3];
};

/// The seven weight rows compared on the Rosenbrock example, in table order.
const std::vector<WeightCoefficients>& standard_weight_rows();

/// Parses "c1,c2,c3"; each entry is a decimal or a fraction p/q. Entries summing to one
/// within 1e-9 are renormalized. Throws std::invalid_argument otherwise.
WeightCoefficients parse_weights(const std::string& text);

/// Coefficients of the closed-form weighted norm over a ball of radius r.
/// These are unrelated to the acceptance thresholds of the trust-region loop.
struct EtaCoefficients {
  double eta1 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
  double eta4 = 0.0;
  double eta5 = 0.0;
};

double evaluate(const QuadraticModel& model, const Vector& x);
Vector gradient(const QuadraticModel& model, const Vector& x);

/// Same function expressed about `new_base`; exact in c, g and H.
QuadraticModel recenter(const QuadraticModel& model, const Vector& new_base);

/// Sum of two models expressed about a common base point.
QuadraticModel operator+(const QuadraticModel& lhs, const QuadraticModel& rhs);
QuadraticModel operator-(const QuadraticModel& lhs, const QuadraticModel& rhs);
QuadraticModel operator*(double s, const QuadraticModel& model);

EtaCoefficients eta_coefficients(const WeightCoefficients& C, int n, double r);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// sum_i C_i |m|^2_{H^{i-1}(B(center, r))} in closed form.
/// The model must already be expressed about `center`.
double weighted_norm_sq(const QuadraticModel& model, const Vector& center, double r,
                        const WeightCoefficients& C);

/// Largest asymmetry |H_ij - H_ji| relative to 1 + max|H_ij|.
double symmetry_defect(const Matrix& H);

}  // namespace remu
