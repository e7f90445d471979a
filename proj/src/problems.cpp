#include "remu/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <stdexcept>

namespace remu {

namespace {

Vector make(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

Vector rosenbrock(const Vector& x) { return make({10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]}); }

Vector freudenstein_roth(const Vector& x) {
  return make({-13.0 + x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1],
               -29.0 + x[0] + ((x[1] + 1.0) * x[1] - 14.0) * x[1]});
}

Vector powell_badly_scaled(const Vector& x) {
  return make({1e4 * x[0] * x[1] - 1.0, std::exp(-x[0]) + std::exp(-x[1]) - 1.0001});
}

Vector brown_badly_scaled(const Vector& x) { return make({x[0] - 1e6, x[1] - 2e-6, x[0] * x[1] - 2.0}); }

Vector beale(const Vector& x) {
  const double y[3] = {1.5, 2.25, 2.625};
  Vector F(3);
  for (int i = 0; i < 3; ++i) F[i] = y[i] - x[0] * (1.0 - std::pow(x[1], i + 1));
  return F;
}

Vector jennrich_sampson(const Vector& x) {
  Vector F(10);
  for (int i = 1; i <= 10; ++i) F[i - 1] = 2.0 + 2.0 * i - (std::exp(i * x[0]) + std::exp(i * x[1]));
  return F;
}

Vector helical_valley(const Vector& x) {
  double theta;
  if (x[0] > 0.0) {
    theta = std::atan(x[1] / x[0]) / (2.0 * std::numbers::pi);
  } else if (x[0] < 0.0) {
    theta = std::atan(x[1] / x[0]) / (2.0 * std::numbers::pi) + 0.5;
  } else {
    theta = x[1] >= 0.0 ? 0.25 : -0.25;
  }
  return make({10.0 * (x[2] - 10.0 * theta), 10.0 * (std::hypot(x[0], x[1]) - 1.0), x[2]});
}

Vector bard(const Vector& x) {
  static const double y[15] = {0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39,
                               0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39};
  Vector F(15);
  for (int i = 1; i <= 15; ++i) {
    const double u = i, v = 16.0 - i, w = std::min(u, v);
    F[i - 1] = y[i - 1] - (x[0] + u / (v * x[1] + w * x[2]));
  }
  return F;
}

Vector gaussian(const Vector& x) {
  static const double y[15] = {0.0009, 0.0044, 0.0175, 0.0540, 0.1295, 0.2420, 0.3521, 0.3989,
                               0.3521, 0.2420, 0.1295, 0.0540, 0.0175, 0.0044, 0.0009};
  Vector F(15);
  for (int i = 1; i <= 15; ++i) {
    const double t = (8.0 - i) / 2.0;
    F[i - 1] = x[0] * std::exp(-x[1] * (t - x[2]) * (t - x[2]) / 2.0) - y[i - 1];
  }
  return F;
}

Vector box3d(const Vector& x) {
  Vector F(10);
  for (int i = 1; i <= 10; ++i) {
    const double t = 0.1 * i;
    F[i - 1] = std::exp(-t * x[0]) - std::exp(-t * x[1]) - x[2] * (std::exp(-t) - std::exp(-10.0 * t));
  }
  return F;
}

Vector powell_singular(const Vector& x) {
  return make({x[0] + 10.0 * x[1], std::sqrt(5.0) * (x[2] - x[3]), std::pow(x[1] - 2.0 * x[2], 2),
               std::sqrt(10.0) * std::pow(x[0] - x[3], 2)});
}

Vector wood(const Vector& x) {
  return make({10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0], std::sqrt(90.0) * (x[3] - x[2] * x[2]), 1.0 - x[2],
               std::sqrt(10.0) * (x[1] + x[3] - 2.0), (x[1] - x[3]) / std::sqrt(10.0)});
}

Vector kowalik_osborne(const Vector& x) {
  static const double y[11] = {0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
                               0.0456, 0.0342, 0.0323, 0.0235, 0.0246};
  static const double u[11] = {4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625};
  Vector F(11);
  for (int i = 0; i < 11; ++i) {
    F[i] = y[i] - x[0] * (u[i] * u[i] + u[i] * x[1]) / (u[i] * u[i] + u[i] * x[2] + x[3]);
  }
  return F;
}

Vector brown_dennis(const Vector& x) {
  Vector F(20);
  for (int i = 1; i <= 20; ++i) {
    const double t = i / 5.0;
    const double a = x[0] + t * x[1] - std::exp(t);
    const double b = x[2] + x[3] * std::sin(t) - std::cos(t);
    F[i - 1] = a * a + b * b;
  }
  return F;
}

Vector osborne1(const Vector& x) {
  static const double y[33] = {0.844, 0.908, 0.932, 0.936, 0.925, 0.908, 0.881, 0.850, 0.818, 0.784, 0.751,
                               0.718, 0.685, 0.658, 0.628, 0.603, 0.580, 0.558, 0.538, 0.522, 0.506, 0.490,
                               0.478, 0.467, 0.457, 0.448, 0.438, 0.431, 0.424, 0.420, 0.414, 0.411, 0.406};
  Vector F(33);
  for (int i = 0; i < 33; ++i) {
    const double t = 10.0 * i;
    F[i] = y[i] - (x[0] + x[1] * std::exp(-t * x[3]) + x[2] * std::exp(-t * x[4]));
  }
  return F;
}

Vector biggs_exp6(const Vector& x) {
  Vector F(13);
  for (int i = 1; i <= 13; ++i) {
    const double t = 0.1 * i;
    const double y = std::exp(-t) - 5.0 * std::exp(-10.0 * t) + 3.0 * std::exp(-4.0 * t);
    F[i - 1] = x[2] * std::exp(-t * x[0]) - x[3] * std::exp(-t * x[1]) + x[5] * std::exp(-t * x[4]) - y;
  }
  return F;
}

Vector osborne2(const Vector& x) {
  static const double y[65] = {
      1.366, 1.191, 1.112, 1.013, 0.991, 0.885, 0.831, 0.847, 0.786, 0.725, 0.746, 0.679, 0.608,
      0.655, 0.616, 0.606, 0.602, 0.626, 0.651, 0.724, 0.649, 0.649, 0.694, 0.644, 0.624, 0.661,
      0.612, 0.558, 0.533, 0.495, 0.500, 0.423, 0.395, 0.375, 0.372, 0.391, 0.396, 0.405, 0.428,
      0.429, 0.523, 0.562, 0.607, 0.653, 0.672, 0.708, 0.633, 0.668, 0.645, 0.632, 0.591, 0.559,
      0.597, 0.625, 0.739, 0.710, 0.729, 0.720, 0.636, 0.581, 0.428, 0.292, 0.162, 0.098, 0.054};
  Vector F(65);
  for (int i = 0; i < 65; ++i) {
    const double t = i / 10.0;
    F[i] = y[i] - (x[0] * std::exp(-t * x[4]) + x[1] * std::exp(-(t - x[8]) * (t - x[8]) * x[5]) +
                   x[2] * std::exp(-(t - x[9]) * (t - x[9]) * x[6]) +
                   x[3] * std::exp(-(t - x[10]) * (t - x[10]) * x[7]));
  }
  return F;
}

Vector extended_rosenbrock(const Vector& x) {
  Vector F(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); i += 2) {
    F[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
    F[i + 1] = 1.0 - x[i];
  }
  return F;
}

Vector brown_almost_linear(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector F(n);
  const double sum = x.sum();
  for (Eigen::Index i = 0; i + 1 < n; ++i) F[i] = x[i] + sum - (n + 1.0);
  F[n - 1] = x.prod() - 1.0;
  return F;
}

Vector broyden_tridiagonal(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector F(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = i > 0 ? x[i - 1] : 0.0;
    const double right = i + 1 < n ? x[i + 1] : 0.0;
    F[i] = (3.0 - 2.0 * x[i]) * x[i] - left - 2.0 * right + 1.0;
  }
  return F;
}

std::vector<ProblemDescriptor> build_registry() {
  std::vector<ProblemDescriptor> r;
  auto add = [&](std::string name, int n, int p, Vector x0, double f_best, ResidualFn fn) {
    r.push_back({std::move(name), n, p, std::move(x0), f_best, std::move(fn)});
  };
  add("rosenbrock", 2, 2, make({-1.2, 1.0}), 0.0, rosenbrock);
  add("freudenstein_roth", 2, 2, make({0.5, -2.0}), 0.0, freudenstein_roth);
  add("powell_badly_scaled", 2, 2, make({0.0, 1.0}), 0.0, powell_badly_scaled);
  add("brown_badly_scaled", 2, 3, make({1.0, 1.0}), 0.0, brown_badly_scaled);
  add("beale", 2, 3, make({1.0, 1.0}), 0.0, beale);
  add("jennrich_sampson", 2, 10, make({0.3, 0.4}), 124.362182355, jennrich_sampson);
  add("helical_valley", 3, 3, make({-1.0, 0.0, 0.0}), 0.0, helical_valley);
  add("bard", 3, 15, make({1.0, 1.0, 1.0}), 8.21487730657e-3, bard);
  add("gaussian", 3, 15, make({0.4, 1.0, 0.0}), 1.12793276961e-8, gaussian);
  add("box3d", 3, 10, make({0.0, 10.0, 20.0}), 0.0, box3d);
  add("powell_singular", 4, 4, make({3.0, -1.0, 0.0, 1.0}), 0.0, powell_singular);
  add("wood", 4, 6, make({-3.0, -1.0, -3.0, -1.0}), 0.0, wood);
  add("kowalik_osborne", 4, 11, make({0.25, 0.39, 0.415, 0.39}), 3.07505603849e-4, kowalik_osborne);
  add("brown_dennis", 4, 20, make({25.0, 5.0, -5.0, -1.0}), 85822.2016263563, brown_dennis);
  add("osborne1", 5, 33, make({0.5, 1.5, -1.0, 0.01, 0.02}), 5.46489469748e-5, osborne1);
  add("biggs_exp6", 6, 13, make({1.0, 2.0, 1.0, 1.0, 1.0, 1.0}), 0.0, biggs_exp6);
  add("osborne2", 11, 65, make({1.3, 0.65, 0.65, 0.7, 0.6, 3.0, 5.0, 7.0, 2.0, 4.5, 5.5}),
      4.01377362935e-2, osborne2);
  Vector xr(10);
  for (int i = 0; i < 10; i += 2) {
    xr[i] = -1.2;
    xr[i + 1] = 1.0;
  }
  add("extended_rosenbrock", 10, 10, xr, 0.0, extended_rosenbrock);
  add("brown_almost_linear", 10, 10, Vector::Constant(10, 0.5), 0.0, brown_almost_linear);
  add("broyden_tridiagonal", 10, 10, Vector::Constant(10, -1.0), 0.0, broyden_tridiagonal);
  return r;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const std::vector<ProblemDescriptor>& problem_registry() {
  static const std::vector<ProblemDescriptor> registry = build_registry();
  return registry;
}

const ProblemDescriptor& find_problem(const std::string& name) {
  for (const auto& p : problem_registry()) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("unknown problem '" + name + "'");
}

nlohmann::json registry_json() {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : problem_registry()) {
    out.push_back({{"name", p.name},
                   {"n", p.n},
                   {"p", p.p},
                   {"x0", std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size())},
                   {"f_best", p.f_best}});
  }
  return out;
}

std::vector<ProblemDescriptor> load_registry(const nlohmann::json& descriptors) {
  std::vector<ProblemDescriptor> out;
  for (const auto& d : descriptors) {
    ProblemDescriptor p = find_problem(d.at("name").get<std::string>());
    if (d.contains("n") && d["n"].get<int>() != p.n) throw std::invalid_argument("descriptor n mismatch for " + p.name);
    if (d.contains("p") && d["p"].get<int>() != p.p) throw std::invalid_argument("descriptor p mismatch for " + p.name);
    if (d.contains("x0")) {
      const auto x0 = d["x0"].get<std::vector<double>>();
      if (static_cast<int>(x0.size()) != p.n) throw std::invalid_argument("descriptor x0 size mismatch for " + p.name);
      p.x0 = Eigen::Map<const Vector>(x0.data(), p.n);
    }
    if (d.contains("f_best")) p.f_best = d["f_best"].get<double>();
    out.push_back(std::move(p));
  }
  return out;
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::smooth,          Variant::nondiff,         Variant::det_add,
                                      Variant::det_mult3,       Variant::det_mult,        Variant::stoch_add_gauss,
                                      Variant::stoch_add_unif,  Variant::stoch_rel_gauss, Variant::stoch_rel_unif,
                                      Variant::smooth_repeat};
  return v;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::smooth: return "smooth";
    case Variant::nondiff: return "nondiff";
    case Variant::det_add: return "det_add";
    case Variant::det_mult3: return "det_mult3";
    case Variant::det_mult: return "det_mult";
    case Variant::stoch_add_gauss: return "stoch_add_gauss";
    case Variant::stoch_add_unif: return "stoch_add_unif";
    case Variant::stoch_rel_gauss: return "stoch_rel_gauss";
    case Variant::stoch_rel_unif: return "stoch_rel_unif";
    case Variant::smooth_repeat: return "smooth_repeat";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown variant '" + name + "'");
}

bool is_stochastic(Variant v) {
  return v == Variant::stoch_add_gauss || v == Variant::stoch_add_unif || v == Variant::stoch_rel_gauss ||
         v == Variant::stoch_rel_unif;
}

double oscillatory_noise(const Vector& x) {
  const double phi0 = 0.9 * std::sin(100.0 * x.lpNorm<1>()) * std::cos(100.0 * x.lpNorm<Eigen::Infinity>()) +
                      0.1 * std::cos(x.norm());
  return phi0 * (4.0 * phi0 * phi0 - 3.0);
}

std::uint64_t point_hash(const Vector& x, std::uint64_t seed) {
  std::uint64_t h = splitmix(seed);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double q = std::round(x[i] * 1e12);
    std::uint64_t word;
    if (std::abs(q) < 9.0e18) {
      word = static_cast<std::uint64_t>(static_cast<std::int64_t>(q));
    } else {
      std::memcpy(&word, &x[i], sizeof word);
    }
    h = splitmix(h ^ word);
  }
  return h;
}

std::optional<double> TestProblem::known_f_best() const {
  if (variant == Variant::smooth || variant == Variant::smooth_repeat) return base.f_best;
  return std::nullopt;
}

std::string TestProblem::key() const { return base.name + "/" + to_string(variant); }

std::function<double(const Vector&)> make_objective(const TestProblem& problem) {
  const ResidualFn F = problem.base.residuals;
  const double sigma = problem.sigma;
  const std::uint64_t seed = problem.seed;
  const int n = problem.base.n;
  auto check = [n](const Vector& x) {
    if (x.size() != n) throw std::invalid_argument("objective: dimension mismatch");
  };
  auto smooth = [F](const Vector& x) { return F(x).squaredNorm(); };
  // Independent unit-variance draws, one per residual, keyed by the point.
  auto draws = [seed](const Vector& x, Eigen::Index p, bool gauss) {
    std::mt19937_64 rng(point_hash(x, seed));
    Vector z(p);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(-std::sqrt(3.0), std::sqrt(3.0));
    for (Eigen::Index i = 0; i < p; ++i) z[i] = gauss ? normal(rng) : unif(rng);
    return z;
  };
  switch (problem.variant) {
    case Variant::smooth:
    case Variant::smooth_repeat:
      return [=](const Vector& x) { check(x); return smooth(x); };
    case Variant::nondiff:
      return [=](const Vector& x) { check(x); return F(x).lpNorm<1>(); };
    case Variant::det_add:
      return [=](const Vector& x) { check(x); return smooth(x) + oscillatory_noise(x); };
    case Variant::det_mult3:
      return [=](const Vector& x) { check(x); return smooth(x) * (1.0 + 1e-3 * oscillatory_noise(x)); };
    case Variant::det_mult:
      return [=](const Vector& x) { check(x); return smooth(x) * (1.0 + sigma * oscillatory_noise(x)); };
    case Variant::stoch_add_gauss:
    case Variant::stoch_add_unif: {
      const bool gauss = problem.variant == Variant::stoch_add_gauss;
      return [=](const Vector& x) {
        check(x);
        const Vector r = F(x);
        return (r + sigma * draws(x, r.size(), gauss)).squaredNorm();
      };
    }
    case Variant::stoch_rel_gauss:
    case Variant::stoch_rel_unif: {
      const bool gauss = problem.variant == Variant::stoch_rel_gauss;
      return [=](const Vector& x) {
        check(x);
        const Vector r = F(x);
        const Vector scale = Vector::Ones(r.size()) + sigma * draws(x, r.size(), gauss);
        return r.cwiseProduct(scale).squaredNorm();
      };
    }
  }
  throw std::invalid_argument("make_objective: unknown variant");
}

}  // namespace remu
