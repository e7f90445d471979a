#include "remu/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace remu {

namespace {

double quad_value(const Vector& g, const Matrix& H, const Vector& d) {
  return g.dot(d) + 0.5 * d.dot(H * d);
}

Vector exact_step(const Vector& g, const Matrix& H, double delta) {
  const Eigen::Index n = g.size();
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Vector lam = es.eigenvalues();
  const Matrix& Q = es.eigenvectors();
  const Vector gt = Q.transpose() * g;
  const double lam_min = lam[0];
  const double lam_scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  const double gnorm = g.norm();

  if (gnorm == 0.0 && lam_min >= 0.0) return Vector::Zero(n);

  auto step_for = [&](double sigma) {
    Vector coeffs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double denom = lam[i] + sigma;
      coeffs[i] = denom > 0.0 ? -gt[i] / denom : 0.0;
    }
    return coeffs;
  };

  if (lam_min > 0.0) {
    const Vector coeffs = step_for(0.0);
    if (coeffs.norm() <= delta) return Q * coeffs;
  }

  // Hard case: g has no weight on the leftmost eigenspace and the shifted step falls short.
  const double flat_tol = 1e-12 * lam_scale;
  double leftmost_weight = 0.0;
  for (Eigen::Index i = 0; i < n && lam[i] <= lam_min + flat_tol; ++i) leftmost_weight += gt[i] * gt[i];
  if (std::sqrt(leftmost_weight) <= 1e-14 * std::max(1.0, gnorm)) {
    Vector coeffs = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam[i] > lam_min + flat_tol) coeffs[i] = -gt[i] / (lam[i] - lam_min);
    }
    const double short_norm = coeffs.norm();
    if (short_norm <= delta) {
      if (lam_min >= 0.0) return Q * coeffs;
      coeffs[0] += std::sqrt(std::max(0.0, delta * delta - short_norm * short_norm));
      return Q * coeffs;
    }
  }

  // Boundary solution: find sigma > max(0, -lam_min) with ||p(sigma)|| = delta.
  double lo = std::max(0.0, -lam_min);
  double hi = lo + gnorm / delta + lam_scale;
  while (step_for(hi).norm() > delta) hi *= 2.0;
  double sigma = hi;
  for (int it = 0; it < 200; ++it) {
    const Vector coeffs = step_for(sigma);
    const double pn = coeffs.norm();
    if (std::abs(pn - delta) <= 1e-14 * delta) break;
    if (pn > delta) lo = sigma; else hi = sigma;
    // Newton on 1/||p|| - 1/delta, which is nearly linear in sigma.
    double dpn = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double denom = lam[i] + sigma;
      if (denom > 0.0) dpn -= gt[i] * gt[i] / (denom * denom * denom);
    }
    dpn /= pn;
    double next = sigma - (1.0 / pn - 1.0 / delta) / (-dpn / (pn * pn));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
    sigma = next;
  }
  Vector coeffs = step_for(sigma);
  const double pn = coeffs.norm();
  if (pn > delta) {
    coeffs *= delta / pn;
  } else if (lam_min < 0.0 && pn < delta) {
    // Nearly hard case: sigma is pinned at -lam_min, so reach the boundary along the leftmost eigenvector.
    const double rest = coeffs.tail(n - 1).squaredNorm();
    const double sign = coeffs[0] < 0.0 ? -1.0 : 1.0;
    coeffs[0] = sign * std::sqrt(std::max(0.0, delta * delta - rest));
  }
  return Q * coeffs;
}

Vector steihaug_step(const Vector& g, const Matrix& H, double delta) {
  const Eigen::Index n = g.size();
  Vector z = Vector::Zero(n);
  Vector r = g;
  Vector d = -r;
  const double tol = std::min(0.5, std::sqrt(g.norm())) * g.norm();
  if (g.norm() == 0.0) return z;

  auto to_boundary = [&](const Vector& from, const Vector& dir) {
    const double a = dir.squaredNorm();
    const double b = 2.0 * from.dot(dir);
    const double c = from.squaredNorm() - delta * delta;
    const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c))) / (2.0 * a);
    return Vector(from + tau * dir);
  };

  for (Eigen::Index it = 0; it < 2 * n + 10; ++it) {
    const Vector Hd = H * d;
    const double curv = d.dot(Hd);
    if (curv <= 0.0) return to_boundary(z, d);
    const double alpha = r.squaredNorm() / curv;
    const Vector z_next = z + alpha * d;
    if (z_next.norm() >= delta) return to_boundary(z, d);
    const Vector r_next = r + alpha * Hd;
    if (r_next.norm() < 1e-10 * tol) return z_next;
    const double beta = r_next.squaredNorm() / r.squaredNorm();
    d = -r_next + beta * d;
    z = z_next;
    r = r_next;
  }
  return z;
}

}  // namespace

Vector cauchy_step(const Vector& g, const Matrix& H, double delta) {
  const double gnorm = g.norm();
  if (gnorm == 0.0) return Vector::Zero(g.size());
  const double curv = g.dot(H * g);
  double tau = 1.0;
  if (curv > 0.0) tau = std::min(1.0, gnorm * gnorm * gnorm / (delta * curv));
  return -(tau * delta / gnorm) * g;
}

Vector solve_subproblem(const QuadraticModel& model, double delta, SubproblemMethod method) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_subproblem: radius must be positive");
  const Vector& g = model.g;
  const Matrix& H = model.H;
  Vector step = method == SubproblemMethod::exact ? exact_step(g, H, delta) : steihaug_step(g, H, delta);
  const double norm = step.norm();
  if (norm > delta) step *= delta / norm;

  const Vector cauchy = cauchy_step(g, H, delta);
  if (quad_value(g, H, step) > quad_value(g, H, cauchy)) return cauchy;
  return step;
}

}  // namespace remu
