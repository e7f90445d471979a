// Independent reference computations used only by the test suites.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "remu/builder.hpp"
#include "remu/model.hpp"

namespace remu::oracle {

/// Gauss-Legendre nodes/weights on [-1, 1] via Newton on P_k.
inline void gauss_legendre(int k, std::vector<double>& x, std::vector<double>& w) {
  x.assign(k, 0.0);
  w.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      const double dp = k * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int j = 2; j <= k; ++j) {
      const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    const double dp = k * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

/// Integral of f over the ball B(center, r) for n <= 3 by a polar product rule.
/// Exact for polynomials of moderate degree.
inline double ball_integral(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& center, double r, int order = 12) {
  const int n = static_cast<int>(center.size());
  std::vector<double> gx, gw;
  gauss_legendre(order, gx, gw);
  double total = 0.0;
  if (n == 1) {
    for (int i = 0; i < order; ++i) {
      Eigen::VectorXd x = center;
      x[0] += r * gx[i];
      total += r * gw[i] * f(x);
    }
  } else if (n == 2) {
    const int K = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double rho = 0.5 * r * (gx[i] + 1.0);
      const double wr = 0.5 * r * gw[i] * rho;
      for (int k = 0; k < K; ++k) {
        const double th = 2.0 * std::numbers::pi * k / K;
        Eigen::VectorXd x = center;
        x[0] += rho * std::cos(th);
        x[1] += rho * std::sin(th);
        total += wr * (2.0 * std::numbers::pi / K) * f(x);
      }
    }
  } else if (n == 3) {
    const int K = 2 * order;
    for (int i = 0; i < order; ++i) {
      const double rho = 0.5 * r * (gx[i] + 1.0);
      const double wr = 0.5 * r * gw[i] * rho * rho;
      for (int j = 0; j < order; ++j) {
        const double ct = gx[j];
        const double st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < K; ++k) {
          const double ph = 2.0 * std::numbers::pi * k / K;
          Eigen::VectorXd x = center;
          x[0] += rho * st * std::cos(ph);
          x[1] += rho * st * std::sin(ph);
          x[2] += rho * ct;
          total += wr * gw[j] * (2.0 * std::numbers::pi / K) * f(x);
        }
      }
    }
  } else {
    throw std::invalid_argument("ball_integral supports n <= 3");
  }
  return total;
}

/// Sum_i C_i |m|^2_{H^{i-1}(B)} straight from the definition, by quadrature.
inline double weighted_norm_by_quadrature(const QuadraticModel& m, const Eigen::VectorXd& center,
                                          double r, const WeightCoefficients& C) {
  const double h2 = m.H.squaredNorm();
  return ball_integral(
      [&](const Eigen::VectorXd& x) {
        const double v = evaluate(m, x);
        const double gsq = gradient(m, x).squaredNorm();
        return C.c1() * v * v + C.c2() * gsq + C.c3() * h2;
      },
      center, r);
}

/// Coefficient layout: (c, g_1..g_n, H_11, H_12, .., H_nn upper triangle).
inline int coef_count(int n) { return 1 + n + n * (n + 1) / 2; }

inline Eigen::VectorXd pack(const QuadraticModel& q) {
  const int n = static_cast<int>(q.dim());
  Eigen::VectorXd v(coef_count(n));
  v[0] = q.c;
  v.segment(1, n) = q.g;
  int k = 1 + n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v[k++] = q.H(i, j);
  return v;
}

inline QuadraticModel unpack(const Eigen::VectorXd& v, const Eigen::VectorXd& base) {
  const int n = static_cast<int>(base.size());
  Eigen::MatrixXd H(n, n);
  int k = 1 + n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) H(i, j) = H(j, i) = v[k++];
  return {base, v[0], v.segment(1, n), H};
}

/// Row of the interpolation constraint at offset s in packed coordinates.
inline Eigen::RowVectorXd constraint_row(const Eigen::VectorXd& s) {
  const int n = static_cast<int>(s.size());
  Eigen::RowVectorXd row(coef_count(n));
  row[0] = 1.0;
  row.segment(1, n) = s.transpose();
  int k = 1 + n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) row[k++] = (i == j ? 0.5 : 1.0) * s[i] * s[j];
  return row;
}

/// Gram matrix of the quadratic form eta1|H|_F^2 + eta2|g|^2 + eta3 Tr(H)^2 + eta4 c Tr(H) + eta5 c^2.
inline Eigen::MatrixXd coefficient_form(const EtaCoefficients& e, int n) {
  const int N = coef_count(n);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  Q(0, 0) = e.eta5;
  for (int i = 0; i < n; ++i) Q(1 + i, 1 + i) = e.eta2;
  std::vector<int> diag_idx;
  int k = 1 + n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Q(k, k) += (i == j ? 1.0 : 2.0) * e.eta1;
      if (i == j) diag_idx.push_back(k);
      ++k;
    }
  for (int a : diag_idx) {
    for (int b : diag_idx) Q(a, b) += e.eta3;
    Q(0, a) += 0.5 * e.eta4;
    Q(a, 0) += 0.5 * e.eta4;
  }
  return Q;
}

/// Minimizer of the coefficient-space weighted form subject to interpolation,
/// solved in the primal variables (c, g, H) with a dense full-pivot LU.
/// For C = (0,0,1) this is the classic minimum-Frobenius-norm update.
inline QuadraticModel coefficient_space_update(const QuadraticModel& prev,
                                               const InterpolationSet& set,
                                               const Eigen::VectorXd& center,
                                               const WeightCoefficients& C, double r) {
  const int n = static_cast<int>(center.size());
  const int m = static_cast<int>(set.size());
  const int N = coef_count(n);
  const QuadraticModel base = recenter(prev, center);
  const Eigen::MatrixXd Q = coefficient_form(eta_coefficients(C, n, r), n);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + m, N + m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N + m);
  K.topLeftCorner(N, N) = 2.0 * Q;
  for (int i = 0; i < m; ++i) {
    const Eigen::RowVectorXd row = constraint_row(set.point(i) - center);
    K.block(N + i, 0, 1, N) = row;
    K.block(0, N + i, N, 1) = row.transpose();
    b[N + i] = set.value(i) - evaluate(base, set.point(i));
  }
  const Eigen::VectorXd sol = K.fullPivLu().solve(b);
  return base + unpack(sol.head(N), center);
}

/// Weighted form value sum_i C_i |q|^2 through the coefficient form (no closed-form reuse).
inline double coefficient_form_value(const QuadraticModel& q, const WeightCoefficients& C, double r) {
  const int n = static_cast<int>(q.dim());
  const Eigen::VectorXd v = pack(q);
  return v.dot(coefficient_form(eta_coefficients(C, n, r), n) * v);
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> N01;
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) H(i, j) = H(j, i) = scale * N01(rng);
  return H;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> N01;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * N01(rng);
  return v;
}

inline QuadraticModel random_model(std::mt19937_64& rng, const Eigen::VectorXd& base,
                                   double scale = 1.0) {
  const int n = static_cast<int>(base.size());
  std::normal_distribution<double> N01;
  return {base, scale * N01(rng), random_vector(rng, n, scale), random_symmetric(rng, n, scale)};
}

/// m points uniformly in the ball B(center, radius); the first point is the center.
inline std::vector<Eigen::VectorXd> random_points(std::mt19937_64& rng, const Eigen::VectorXd& center,
                                                  std::size_t m, double radius) {
  const int n = static_cast<int>(center.size());
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Eigen::VectorXd> pts{center};
  while (pts.size() < m) {
    Eigen::VectorXd d = random_vector(rng, n);
    d *= radius * std::pow(U(rng), 1.0 / n) / d.norm();
    pts.push_back(center + d);
  }
  return pts;
}

/// Well-poised set: the center, jittered +-r e_i stencil points, then jittered
/// points at radius ~0.7 r along random directions.
inline std::vector<Eigen::VectorXd> poised_points(std::mt19937_64& rng, const Eigen::VectorXd& center,
                                                  std::size_t m, double r) {
  const int n = static_cast<int>(center.size());
  std::vector<Eigen::VectorXd> pts{center};
  for (int sign : {1, -1})
    for (int i = 0; i < n && pts.size() < m; ++i) {
      Eigen::VectorXd p = center + random_vector(rng, n, 0.05 * r);
      p[i] += sign * r;
      pts.push_back(p);
    }
  while (pts.size() < m) {
    Eigen::VectorXd d = random_vector(rng, n);
    pts.push_back(center + 0.7 * r * d / d.norm());
  }
  return pts;
}

inline WeightCoefficients random_weights(std::mt19937_64& rng, double min_c3 = 0.0) {
  std::exponential_distribution<double> E(1.0);
  const double a = E(rng), b = E(rng), c = E(rng);
  const double s = a + b + c;
  const double scale = 1.0 - min_c3;
  const double c1 = scale * a / s, c2 = scale * b / s;
  return {c1, c2, 1.0 - c1 - c2};
}

/// The seven weight rows of the Rosenbrock comparison table.
inline std::vector<WeightCoefficients> table_rows() {
  return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1.0 / 3, 1.0 / 3, 1.0 / 3},
          {0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}};
}

}  // namespace remu::oracle
