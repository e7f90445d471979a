#include "remu/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "remu/errors.hpp"

namespace remu {

LocalDerivatives derivatives_at(const QuadraticModel& model, const Vector& z) {
  return {gradient(model, z), model.H};
}

Vector truncated_newton_step(const Vector& g, const Matrix& H, double delta) {
  if (H.rows() != g.size() || H.cols() != g.size()) throw DimensionError("truncated_newton_step: size mismatch");
  if (!(delta > 0.0)) throw std::invalid_argument("truncated_newton_step: radius must be positive");
  if (g.isZero(0.0)) return Vector::Zero(g.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
  const Vector abs_lam = es.eigenvalues().cwiseAbs();
  const double top = abs_lam.maxCoeff();
  if (!(abs_lam.minCoeff() >= 1e-12 * top) || top == 0.0) {
    throw SingularHessian("truncated_newton_step: Hessian is numerically singular");
  }
  const Matrix& Q = es.eigenvectors();
  Vector d = -(Q * (Q.transpose() * g).cwiseQuotient(es.eigenvalues()));
  const double dn = d.norm();
  if (dn == 0.0) return Vector::Zero(g.size());
  return d * std::min(delta / dn, 1.0);
}

Vector truncated_newton_step_lstsq(const Vector& g, const Matrix& H, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("truncated_newton_step_lstsq: radius must be positive");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(H);
  cod.setThreshold(1e-12);
  Vector d = -cod.solve(g);
  const double dn = d.norm();
  if (dn == 0.0) return Vector::Zero(g.size());
  return d * std::min(delta / dn, 1.0);
}

double tn_step_error(const LocalDerivatives& h1, const LocalDerivatives& h2, double delta) {
  const Vector a = truncated_newton_step(h1.g, h1.H, delta);
  const Vector b = truncated_newton_step(h2.g, h2.H, delta);
  return (a - b).norm() / delta;
}

double tn_step_error(const QuadraticModel& h1, const QuadraticModel& h2, const Vector& z, double delta) {
  return tn_step_error(derivatives_at(h1, z), derivatives_at(h2, z), delta);
}

double kkt_distance(const KktSystem& a, const KktSystem& b) {
  if (a.W.rows() != b.W.rows() || a.W.cols() != b.W.cols()) {
    throw DimensionError("kkt_distance: matrices differ in size");
  }
  return (a.W - b.W).norm();
}

GeometryFunctionals geometry_functionals(const std::vector<Vector>& points, const Vector& center) {
  GeometryFunctionals out;
  std::vector<Vector> s;
  s.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != center.size()) throw DimensionError("geometry_functionals: dimension mismatch");
    s.push_back(p - center);
  }
  for (const auto& si : s) {
    const double ni = si.squaredNorm();
    out.R3 += ni * ni;
    for (const auto& sj : s) {
      const double ip = si.dot(sj);
      const double nj = sj.squaredNorm();
      out.R1 += ip * ip * ip * ip;
      out.R2 += ni * ni * nj * nj;
      out.Rx += ip * ip * ni * nj;
    }
  }
  return out;
}

namespace {

struct BlockScalars {
  double a;     // coefficient of (s_i^T s_j)^2 in A
  double b;     // coefficient of |s_i|^2 |s_j|^2 in A, with sign removed
  double j;     // J_i = 1 - j |s_i|^2
  double s;     // scalar block
  double eta2;
};

void check_pair(WeightPair C) {
  if (C.c1 < 0.0 || C.c2 < 0.0 || C.c1 + C.c2 > 1.0 + 1e-12) {
    throw std::invalid_argument("weight pair outside the simplex");
  }
}

BlockScalars block_scalars(WeightPair C, int n, double r) {
  check_pair(C);
  if (!(r > 0.0) || n < 1) throw std::invalid_argument("block scalars need r > 0 and n >= 1");
  const double nd = n;
  const double c3 = std::max(0.0, 1.0 - C.c1 - C.c2);
  const double r2 = r * r, r4 = r2 * r2;
  const double eta1 = C.c1 * r4 / (2.0 * (nd + 4.0) * (nd + 2.0)) + C.c2 * r2 / (nd + 2.0) + c3;
  const double eta2 = C.c1 * r2 / (nd + 2.0) + C.c2;
  const double eta3 = C.c1 * r4 / (4.0 * (nd + 4.0) * (nd + 2.0));
  const double eta4 = C.c1 * r2 / (nd + 2.0);
  const double eta5 = C.c1;
  const double q = nd * eta3 + eta1;
  if (!(eta1 > 1e-300) || !(q > 1e-300)) throw DegenerateWeights("KKT error: eta1 vanishes");
  return {1.0 / (8.0 * eta1), eta3 / (8.0 * eta1 * q), eta4 / (4.0 * q),
          nd * eta4 * eta4 / (2.0 * q) - 2.0 * eta5, eta2};
}

PTerms printed_terms(WeightPair C, WeightPair Cs, int n, double r) {
  check_pair(C);
  check_pair(Cs);
  const double nd = n;
  const double r2 = r * r, r4 = r2 * r2, r8 = r4 * r4;
  const double q4 = r4 / (2.0 * (nd * nd + 6.0 * nd + 8.0));
  const double q2 = r2 / (nd + 2.0);
  auto E = [&](WeightPair w) { return w.c1 * (q4 - 1.0) + w.c2 * (q2 - 1.0) + 1.0; };
  auto F = [&](WeightPair w) {
    return w.c1 * (-4.0 * nd + r4 - 16.0) / (4.0 * (nd + 4.0)) + w.c2 * (q2 - 1.0) + 1.0;
  };
  auto G = [&](WeightPair w) {
    return w.c1 * (4.0 * nd * nd - nd * (r4 - 24.0) - 2.0 * r4 + 32.0) +
           4.0 * (nd + 4.0) * (w.c2 * (nd - r2 + 2.0) - nd - 2.0);
  };
  const double e = E(C), es = E(Cs), f = F(C), fs = F(Cs), g = G(C), gs = G(Cs);
  if (!(std::abs(e) > 1e-300 && std::abs(es) > 1e-300 && std::abs(g) > 1e-300 && std::abs(gs) > 1e-300)) {
    throw DegenerateWeights("KKT error: vanishing denominator");
  }
  PTerms p;
  const double d1 = 1.0 / e - 1.0 / es;
  p.p1 = d1 * d1 / 64.0;
  const double d2 = Cs.c1 / (fs * es) - C.c1 / (f * e);
  p.p2 = r8 / (1024.0 * (nd + 2.0) * (nd + 2.0) * (nd + 4.0) * (nd + 4.0)) * d2 * d2;
  const double d3 = Cs.c1 / gs - C.c1 / g;
  p.p3 = r8 * d3 * d3 / 16.0;
  const double k = nd * (nd + 4.0) * r4 / (nd + 2.0);
  const double d4 = -C.c1 * C.c1 * k / g - C.c1 + Cs.c1 * Cs.c1 * k / gs + Cs.c1;
  const double d5 = r2 * (C.c1 - Cs.c1) / (nd + 2.0) + C.c2 - Cs.c2;
  p.p4 = 4.0 * d4 * d4 + nd * d5 * d5;
  return p;
}

}  // namespace

PTerms p_terms(WeightPair C, WeightPair Cs, int n, double r, ErrorForm form) {
  if (form == ErrorForm::printed) return printed_terms(C, Cs, n, r);
  const BlockScalars u = block_scalars(C, n, r);
  const BlockScalars v = block_scalars(Cs, n, r);
  const double da = u.a - v.a, db = u.b - v.b, dj = u.j - v.j, ds = u.s - v.s, de = u.eta2 - v.eta2;
  PTerms p;
  p.p1 = da * da;
  p.p2 = db * db;
  p.px = -2.0 * da * db;
  p.p3 = 2.0 * dj * dj;  // J appears in both off-diagonal positions
  p.p4 = ds * ds + 4.0 * n * de * de;
  return p;
}

double kkt_error_sq(WeightPair C, WeightPair Cs, int n, double r, const GeometryFunctionals& geom,
                    ErrorForm form) {
  const PTerms p = p_terms(C, Cs, n, r, form);
  return geom.R1 * p.p1 + geom.R2 * p.p2 + geom.Rx * p.px + geom.R3 * p.p3 + p.p4;
}

double kkt_error(WeightPair C, WeightPair Cs, int n, double r, const GeometryFunctionals& geom,
                 ErrorForm form) {
  return std::sqrt(std::max(0.0, kkt_error_sq(C, Cs, n, r, geom, form)));
}

double p1_limit(WeightPair C, WeightPair Cs) {
  const double s = C.c1 + C.c2, ss = Cs.c1 + Cs.c2;
  if (s == 1.0 || ss == 1.0) throw DegenerateWeights("p1_limit: C3 = 0");
  const double d = s - ss;
  return d * d / (64.0 * (s - 1.0) * (s - 1.0) * (ss - 1.0) * (ss - 1.0));
}

double p4_limit(WeightPair C, WeightPair Cs, int n, ErrorForm form) {
  const double d1 = C.c1 - Cs.c1, d2 = C.c2 - Cs.c2;
  if (form == ErrorForm::printed) {
    return 4.0 * C.c1 * C.c1 - 8.0 * C.c1 * Cs.c1 + n * d2 * d2 + 4.0 * Cs.c1 * Cs.c1;
  }
  return 4.0 * d1 * d1 + 4.0 * n * d2 * d2;
}

namespace {

using Pt = std::array<double, 2>;

struct Tri {
  Pt a, b, c;
  double coarse = 0.0;  // rule on this triangle
  double err = 0.0;
};

// Degree-5, 7-point rule on a triangle (weights sum to one).
double rule(const std::function<double(double, double)>& f, const Pt& a, const Pt& b, const Pt& c) {
  static constexpr double w0 = 0.225;
  static constexpr double a1 = 0.059715871789769820, b1 = 0.470142064105115090, w1 = 0.132394152788506181;
  static constexpr double a2 = 0.797426985353087322, b2 = 0.101286507323456339, w2 = 0.125939180544827153;
  auto at = [&](double l0, double l1, double l2) {
    return f(l0 * a[0] + l1 * b[0] + l2 * c[0], l0 * a[1] + l1 * b[1] + l2 * c[1]);
  };
  const double area = 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
  double s = w0 * at(1.0 / 3, 1.0 / 3, 1.0 / 3);
  s += w1 * (at(a1, b1, b1) + at(b1, a1, b1) + at(b1, b1, a1));
  s += w2 * (at(a2, b2, b2) + at(b2, a2, b2) + at(b2, b2, a2));
  return area * s;
}

Pt mid(const Pt& p, const Pt& q) { return {0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])}; }

std::array<Tri, 4> split(const Tri& t) {
  const Pt ab = mid(t.a, t.b), bc = mid(t.b, t.c), ca = mid(t.c, t.a);
  return {Tri{t.a, ab, ca}, Tri{ab, t.b, bc}, Tri{ca, bc, t.c}, Tri{ab, bc, ca}};
}

}  // namespace

double integrate_triangle(const std::function<double(double, double)>& f, double side, double rel_tol) {
  if (!(side > 0.0)) return 0.0;
  auto refine = [&](Tri& t) {
    t.coarse = rule(f, t.a, t.b, t.c);
    double fine = 0.0;
    for (const auto& child : split(t)) fine += rule(f, child.a, child.b, child.c);
    t.err = std::abs(fine - t.coarse);
    t.coarse = fine;
  };
  auto cmp = [](const Tri& x, const Tri& y) { return x.err < y.err; };
  std::priority_queue<Tri, std::vector<Tri>, decltype(cmp)> heap(cmp);
  Tri root{{0.0, 0.0}, {side, 0.0}, {0.0, side}};
  for (auto& t : split(root)) {
    refine(t);
    heap.push(t);
  }
  double total = 0.0, err = 0.0;
  auto recompute = [&] {
    // Deterministic re-summation over a copy of the heap.
    auto copy = heap;
    total = 0.0;
    err = 0.0;
    while (!copy.empty()) {
      total += copy.top().coarse;
      err += copy.top().err;
      copy.pop();
    }
  };
  recompute();
  std::size_t steps = 0;
  while (err > rel_tol * std::abs(total)) {
    if (heap.size() > 400000) throw std::runtime_error("integrate_triangle: no convergence");
    const Tri worst = heap.top();
    heap.pop();
    total -= worst.coarse;
    err -= worst.err;
    for (auto& t : split(worst)) {
      refine(t);
      total += t.coarse;
      err += t.err;
      heap.push(t);
    }
    if (++steps % 256 == 0) recompute();
  }
  recompute();
  return total;
}

double avg_squared_error(WeightPair C, int n, double r, double epsilon, const GeometryFunctionals& geom,
                         ErrorForm form) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("avg_squared_error: epsilon in (0,1)");
  const double L = 1.0 - epsilon;
  const double integral = integrate_triangle(
      [&](double c1s, double c2s) { return kkt_error_sq(C, {c1s, c2s}, n, r, geom, form); }, L);
  return 2.0 * integral / (L * L);
}

LimitingErrors limiting_error_terms(WeightPair C, int n, double epsilon, ErrorForm form) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("limiting_error_terms: epsilon in (0,1)");
  const double s = C.c1 + C.c2;
  if (std::abs(s - 1.0) < 1e-300 || s >= 1.0) {
    throw std::domain_error("limiting_error_terms: C1 + C2 must stay below 1");
  }
  const double eps = epsilon, nd = n;
  LimitingErrors out;
  const double num = (eps - 1.0) * (eps * (4.0 * s - 5.0) - 2.0 * (s - 1.0) * (s - 1.0) + eps * eps) / (2.0 * eps) +
                     (s - 3.0) * (s - 1.0) * std::log(eps);
  out.e1 = num / (32.0 * (1.0 - eps) * (1.0 - eps) * (s - 1.0) * (s - 1.0));
  if (form == ErrorForm::printed) {
    out.e2 = (24.0 * C.c1 * C.c1 + 16.0 * C.c1 * (eps - 1.0) + 6.0 * C.c2 * C.c2 * nd +
              eps * (4.0 * C.c2 * nd - 2.0 * nd - 8.0) - 4.0 * C.c2 * nd + eps * eps * (nd + 4.0) + nd + 4.0) /
             6.0;
  } else {
    // Mean of (x - u)^2 over the triangle is (x - L/3)^2 + L^2/18 in each coordinate.
    const double L = 1.0 - eps;
    const double v = L * L / 18.0;
    out.e2 = 4.0 * ((C.c1 - L / 3.0) * (C.c1 - L / 3.0) + v) + 4.0 * nd * ((C.c2 - L / 3.0) * (C.c2 - L / 3.0) + v);
  }
  return out;
}

GridArgmin region_grid_argmin(const std::function<double(double, double)>& f, double epsilon, int k) {
  if (k < 2) throw std::invalid_argument("region_grid_argmin: need k >= 2");
  const double L = 1.0 - epsilon;
  GridArgmin best;
  best.cell = L / (k - 1);
  best.value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k - i; ++j) {
      const double c1 = i * best.cell, c2 = j * best.cell;
      if (c1 + c2 > L * (1.0 + 1e-12)) continue;
      const double v = f(c1, c2);
      if (v < best.value) {
        best.value = v;
        best.c1 = c1;
        best.c2 = c2;
      }
    }
  }
  return best;
}

BarycenterCheck euclidean_barycenter_check(double epsilon, int k) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("euclidean_barycenter_check: epsilon in (0,1]");
  const double L = 1.0 - epsilon;
  BarycenterCheck out;
  out.closed_form = {L / 3.0, L / 3.0};
  if (L <= 0.0) {
    out.grid = {0.0, 0.0, 0.0, 0.0};
    out.verified = true;
    return out;
  }
  // Average of |C - C*|^2 over the region, by quadrature of the distance itself.
  auto avg = [&](double c1, double c2) {
    return 2.0 / (L * L) * integrate_triangle([&](double x, double y) {
      return (c1 - x) * (c1 - x) + (c2 - y) * (c2 - y);
    }, L, 1e-10);
  };
  out.grid = region_grid_argmin(avg, epsilon, k);
  out.verified = std::abs(out.grid.c1 - out.closed_form.c1) <= out.grid.cell &&
                 std::abs(out.grid.c2 - out.closed_form.c2) <= out.grid.cell;
  return out;
}

std::map<std::string, double> kkt_warning_stats(const std::vector<SolverResult>& results, double threshold) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& res : results) {
    auto& [bad, total] = counts[res.weights];
    ++total;
    for (const auto& it : res.iterations) {
      if (!(it.kkt_residual <= threshold)) {
        ++bad;
        break;
      }
    }
  }
  std::map<std::string, double> out;
  for (const auto& [label, c] : counts) out[label] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void write_error_surface_csv(std::ostream& out, const std::function<double(double, double)>& f,
                             double epsilon, int k) {
  const double L = 1.0 - epsilon;
  const double h = L / (k - 1);
  out << "C1,C2,value\n";
  out.precision(17);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k - i; ++j) out << i * h << ',' << j * h << ',' << f(i * h, j * h) << '\n';
  }
}

}  // namespace remu
