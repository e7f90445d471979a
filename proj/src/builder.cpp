#include "remu/builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "remu/errors.hpp"

namespace remu {

InterpolationSet::InterpolationSet(std::vector<Vector> points, std::vector<double> values,
                                   std::size_t newest)
    : points_(std::move(points)), values_(std::move(values)), newest_(newest) {
  if (points_.size() != values_.size()) {
    throw DimensionError("InterpolationSet: points and values differ in length");
  }
  if (!points_.empty() && newest_ >= points_.size()) {
    throw std::out_of_range("InterpolationSet: newest index out of range");
  }
  for (const auto& p : points_) {
    if (p.size() != points_.front().size()) throw DimensionError("InterpolationSet: ragged points");
  }
}

std::size_t InterpolationSet::find(const Vector& x) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double scale = std::max({1.0, x.norm(), points_[i].norm()});
    if ((points_[i] - x).norm() <= 1e-14 * scale) return i;
  }
  return points_.size();
}

void InterpolationSet::replace(std::size_t i, Vector point, double value) {
  if (point.size() != dim()) throw DimensionError("InterpolationSet::replace: dimension mismatch");
  points_.at(i) = std::move(point);
  values_.at(i) = value;
  newest_ = i;
}

void InterpolationSet::set_value(std::size_t i, double value) { values_.at(i) = value; }

void InterpolationSet::set_newest(std::size_t i) {
  if (i >= points_.size()) throw std::out_of_range("InterpolationSet: newest index out of range");
  newest_ = i;
}

void InterpolationSet::validate() const {
  const auto n = static_cast<std::size_t>(dim());
  const std::size_t m = size();
  if (m < n + 2 || m > (n + 1) * (n + 2) / 2) {
    std::ostringstream os;
    os << "InterpolationSet: " << m << " points is outside [" << n + 2 << ", "
       << (n + 1) * (n + 2) / 2 << "] for n = " << n;
    throw std::invalid_argument(os.str());
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double scale = std::max({1.0, points_[i].norm(), points_[j].norm()});
      if ((points_[i] - points_[j]).norm() <= 1e-14 * scale) {
        throw std::invalid_argument("InterpolationSet: duplicate points");
      }
    }
  }
}

KktSystem assemble_kkt(const InterpolationSet& set, const Vector& center,
                       const WeightCoefficients& C, double r, const Vector& residuals) {
  const auto n = set.dim();
  const auto m = set.size();
  if (center.size() != n) throw DimensionError("assemble_kkt: center dimension mismatch");
  if (static_cast<std::size_t>(residuals.size()) != m) {
    throw DimensionError("assemble_kkt: residual vector length must equal the set size");
  }
  const auto eta = eta_coefficients(C, static_cast<int>(n), r);
  if (!(eta.eta1 > 0.0)) throw DegenerateWeights("assemble_kkt: eta1 vanishes");

  KktSystem sys;
  sys.eta = eta;
  sys.center = center;
  sys.n = static_cast<int>(n);
  sys.m = m;

  const auto mi = static_cast<Eigen::Index>(m);
  sys.X.resize(mi, n);
  for (Eigen::Index i = 0; i < mi; ++i) sys.X.row(i) = (set.point(i) - center).transpose();

  const Matrix gram = sys.X * sys.X.transpose();
  const Vector sq = gram.diagonal();
  const double nd = static_cast<double>(n);
  const double denom = nd * eta.eta3 + eta.eta1;
  const double a_coef = 1.0 / (8.0 * eta.eta1);
  const double b_coef = eta.eta3 / (8.0 * eta.eta1 * denom);
  sys.A = a_coef * gram.cwiseProduct(gram) - b_coef * (sq * sq.transpose());
  sys.J = Vector::Ones(mi) - (eta.eta4 / (4.0 * denom)) * sq;
  sys.scalar_block = nd * eta.eta4 * eta.eta4 / (2.0 * denom) - 2.0 * eta.eta5;
  sys.lower_right = -2.0 * eta.eta2;

  const Eigen::Index N = mi + 1 + n;
  sys.W = Matrix::Zero(N, N);
  sys.W.topLeftCorner(mi, mi) = sys.A;
  sys.W.block(0, mi, mi, 1) = sys.J;
  sys.W.block(mi, 0, 1, mi) = sys.J.transpose();
  sys.W.topRightCorner(mi, n) = sys.X;
  sys.W.bottomLeftCorner(n, mi) = sys.X.transpose();
  sys.W(mi, mi) = sys.scalar_block;
  sys.W.bottomRightCorner(n, n).diagonal().setConstant(sys.lower_right);

  sys.rhs = Vector::Zero(N);
  sys.rhs.head(mi) = residuals;
  return sys;
}

namespace {

// Symmetric Ruiz scaling: returns d such that diag(d) W diag(d) has rows of unit max-norm.
Vector equilibrate(const Matrix& W) {
  const Eigen::Index N = W.rows();
  Vector d = Vector::Ones(N);
  Matrix S = W;
  for (int sweep = 0; sweep < 50; ++sweep) {
    Vector row_max = S.cwiseAbs().rowwise().maxCoeff();
    double spread = 0.0;
    Vector step(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      step[i] = row_max[i] > 0.0 ? 1.0 / std::sqrt(row_max[i]) : 1.0;
      spread = std::max(spread, std::abs(1.0 - row_max[i]));
    }
    if (spread < 1e-3) break;
    S = (step.asDiagonal() * S * step.asDiagonal()).eval();
    d = d.cwiseProduct(step);
  }
  return d;
}

// rhs - W x accumulated in extended precision.
Vector extended_residual(const Matrix& W, const Vector& x, const Vector& rhs) {
  const Eigen::Index N = W.rows();
  Vector out(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    long double acc = rhs[i];
    for (Eigen::Index j = 0; j < N; ++j) {
      acc -= static_cast<long double>(W(i, j)) * static_cast<long double>(x[j]);
    }
    out[i] = static_cast<double>(acc);
  }
  return out;
}

}  // namespace

KktSolution solve_kkt(const KktSystem& system) {
  const Matrix& W = system.W;
  const Eigen::Index N = W.rows();
  if (W.cols() != N || system.rhs.size() != N) throw DimensionError("solve_kkt: size mismatch");
  if (!W.allFinite() || !system.rhs.allFinite()) {
    throw IllConditionedKkt("solve_kkt: non-finite KKT entries", 0.0);
  }

  // Geometric prescaling by the set radius rho makes the A, J and X blocks O(1)
  // regardless of rho; Ruiz then mops up the weight-dependent spread.
  const auto mm = static_cast<Eigen::Index>(system.m);
  Vector d0 = Vector::Ones(N);
  const double rho = system.X.size() ? system.X.rowwise().norm().maxCoeff() : 0.0;
  if (rho > 0.0 && std::isfinite(rho)) {
    d0.head(mm).setConstant(1.0 / (rho * rho));
    d0[mm] = rho * rho;
    d0.tail(N - mm - 1).setConstant(rho);
  }
  const Vector d = d0.cwiseProduct(equilibrate(d0.asDiagonal() * W * d0.asDiagonal()));
  const Matrix S = d.asDiagonal() * W * d.asDiagonal();
  Eigen::PartialPivLU<Matrix> lu(S);
  const double eps = std::numeric_limits<double>::epsilon();
  const double threshold = eps * static_cast<double>(N) * S.cwiseAbs().rowwise().sum().maxCoeff();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const double rcond = lu.rcond();
  if (!(min_pivot > threshold) || !(rcond > eps * static_cast<double>(N))) {
    std::ostringstream os;
    os << "solve_kkt: KKT matrix is numerically singular (rcond " << rcond << ")";
    throw IllConditionedKkt(os.str(), rcond);
  }

  Vector sol = d.cwiseProduct(lu.solve(d.cwiseProduct(system.rhs)));
  if (!sol.allFinite()) throw IllConditionedKkt("solve_kkt: non-finite solution", rcond);
  Vector res = extended_residual(W, sol, system.rhs);
  for (int sweep = 0; sweep < 5 && res.stableNorm() > 0.0; ++sweep) {
    const Vector next = sol + d.cwiseProduct(lu.solve(d.cwiseProduct(res)));
    const Vector next_res = extended_residual(W, next, system.rhs);
    if (!(next_res.stableNorm() < res.stableNorm())) break;
    sol = next;
    res = next_res;
  }

  KktSolution out;
  out.lambda = sol.head(mm);
  out.c_hat = sol[mm];
  out.g_hat = sol.tail(N - mm - 1);
  const double rhs_norm = system.rhs.stableNorm();
  out.relative_residual = rhs_norm > 0.0 ? res.stableNorm() / rhs_norm : res.stableNorm();
  out.rcond = rcond;
  return out;
}

BuildReport build_model_report(const QuadraticModel& prev, const InterpolationSet& set,
                               const Vector& center, const WeightCoefficients& C, double r) {
  set.validate();
  if (prev.dim() != set.dim()) throw DimensionError("build_model: model and set dimensions differ");
  const QuadraticModel base = recenter(prev, center);
  const auto m = static_cast<Eigen::Index>(set.size());
  const auto n = set.dim();

  Vector residuals(m);
  for (Eigen::Index i = 0; i < m; ++i) residuals[i] = set.value(i) - evaluate(base, set.point(i));

  const KktSystem sys = assemble_kkt(set, center, C, r, residuals);
  const KktSolution sol = solve_kkt(sys);
  const auto& eta = sys.eta;
  const double nd = static_cast<double>(n);
  const double denom = 2.0 * nd * eta.eta3 + 2.0 * eta.eta1;

  double weighted_sq = 0.0;
  Matrix outer = Matrix::Zero(n, n);
  for (Eigen::Index l = 0; l < m; ++l) {
    const Vector s = sys.X.row(l).transpose();
    weighted_sq += sol.lambda[l] * s.squaredNorm();
    outer.noalias() += sol.lambda[l] * (s * s.transpose());
  }
  const double T = weighted_sq / (2.0 * denom) - nd * eta.eta4 * sol.c_hat / denom;
  Matrix H_hat = (0.5 * outer - (2.0 * eta.eta3 * T + eta.eta4 * sol.c_hat) * Matrix::Identity(n, n)) /
                 (2.0 * eta.eta1);
  H_hat = 0.5 * (H_hat + H_hat.transpose()).eval();

  BuildReport rep;
  rep.difference = QuadraticModel(center, sol.c_hat, sol.g_hat, H_hat);
  rep.model = base + rep.difference;
  rep.trace_target = T;
  rep.kkt_residual = sol.relative_residual;
  rep.rcond = sol.rcond;

  const double trace_scale = std::abs(weighted_sq) / (2.0 * denom) +
                             std::abs(nd * eta.eta4 * sol.c_hat) / denom +
                             std::numeric_limits<double>::min();
  if (std::abs(H_hat.trace() - T) > 1e-6 * std::max(trace_scale, std::abs(T))) {
    throw ModelQualityError("build_model: Tr(H_hat) disagrees with the eliminated trace");
  }
  double data_scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    data_scale = std::max(data_scale, std::abs(set.value(i) - evaluate(base, set.point(i))));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double fi = set.value(i);
    const double err = std::abs(evaluate(rep.model, set.point(i)) - fi);
    if (!(err <= 1e-7 * (1.0 + std::abs(fi)) + 1e-9 * data_scale)) {
      std::ostringstream os;
      os << "build_model: interpolation error " << err << " at point " << i;
      throw ModelQualityError(os.str());
    }
  }
  return rep;
}

QuadraticModel build_model(const QuadraticModel& prev, const InterpolationSet& set,
                           const Vector& center, const WeightCoefficients& C, double r) {
  return build_model_report(prev, set, center, C, r).model;
}

}  // namespace remu
