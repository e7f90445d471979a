#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "remu/errors.hpp"
#include "remu/trust_region.hpp"
#include "support/oracles.hpp"
#include "support/util.hpp"

using namespace remu;
using remu::test::vec;

namespace {

double rosenbrock(const Vector& y) {
  const double a = 1.0 - y[0];
  const double b = 10.0 * (y[1] - y[0] * y[0]);
  return a * a + b * b;
}

TrustRegionState state_at(const Vector& x, double f, double delta) {
  TrustRegionState s;
  s.x = x;
  s.f = f;
  s.delta = delta;
  return s;
}

// Records every evaluated point in order.
struct Recorder {
  std::vector<Vector> points;
  Objective wrap(Objective f) {
    return [this, f](const Vector& x) {
      points.push_back(x);
      return f(x);
    };
  }
};

}  // namespace

TEST_CASE("compute_rho") {
  CHECK(compute_rho(3.0, 2.0, 5.0, 4.0) == 1.0);
  CHECK(compute_rho(1.0, 1.0, 1.0, 0.5) == 0.0);
  CHECK(compute_rho(2.0, 1.0, 2.0, 1.5) == 2.0);
  CHECK_THROWS_AS(compute_rho(2.0, 1.0, 1.0, 1.0), DegenerateModelDecrease);
}

TEST_CASE("update_iterate branches") {
  SolverConfig cfg;
  cfg.delta_max = 4.0;
  const Vector x = vec({0, 0});
  const Vector step = vec({1, 0});

  auto capped = update_iterate(state_at(x, 1.0, 4.0), step, 0.5, 1.0, cfg);
  CHECK(capped.delta == 4.0);
  CHECK(capped.x == vec({1, 0}));
  CHECK(capped.f == 0.5);

  auto rejected = update_iterate(state_at(x, 1.0, 1.0), step, 2.0, 0.0, cfg);
  CHECK(rejected.x == x);
  CHECK(rejected.f == 1.0);
  CHECK(rejected.delta == 0.5);

  auto middle = update_iterate(state_at(x, 1.0, 1.0), step, 0.9, 0.5, cfg);
  CHECK(middle.x == vec({1, 0}));
  CHECK(middle.delta == 1.0);

  auto expanded = update_iterate(state_at(x, 1.0, 1.0), step, 0.0, 0.8, cfg);
  CHECK(expanded.delta == 2.0);

  auto never = update_iterate(state_at(x, 1.0, 1.0), step, 0.0,
                              -std::numeric_limits<double>::infinity(), cfg);
  CHECK(never.x == x);
  CHECK(never.delta == 0.5);
}

TEST_CASE("update_set removes the farthest point") {
  InterpolationSet set({vec({0}), vec({1}), vec({2})}, {0, 1, 2}, 2);
  const auto out = update_set(set, vec({0.5}), 7.0, vec({0}));
  CHECK(out.point(2) == vec({0.5}));
  CHECK(out.value(2) == 7.0);
  CHECK(out.newest() == 2);
  CHECK(out.point(0) == vec({0}));
  CHECK(out.point(1) == vec({1}));

  // Ties go to the lowest index.
  InterpolationSet sym({vec({-1}), vec({0}), vec({1})}, {1, 0, 1}, 0);
  CHECK(update_set(sym, vec({0.5}), 0.25, vec({0})).point(0) == vec({0.5}));

  // Duplicate refreshes the value only.
  const auto dup = update_set(set, vec({1}), -3.0, vec({0}));
  CHECK(dup.size() == 3);
  CHECK(dup.value(1) == -3.0);
  CHECK(dup.newest() == 1);
  CHECK(dup.point(2) == vec({2}));
}

TEST_CASE("update_set agrees with a brute-force farthest scan") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 4;
    const Vector c = oracle::random_vector(rng, n);
    const auto pts = oracle::random_points(rng, c, 2 * n + 1, 1.0);
    std::vector<double> vals(pts.size(), 0.0);
    InterpolationSet set(pts, vals, 0);
    const Vector next = c + 0.3 * oracle::random_vector(rng, n);
    std::size_t far = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if ((pts[i] - next).norm() > (pts[far] - next).norm()) far = i;
    }
    const Vector fresh = c + 0.1 * oracle::random_vector(rng, n);
    const auto out = update_set(set, fresh, 1.0, next);
    CHECK(out.point(far) == fresh);
    CHECK(out.newest() == far);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i != far) CHECK(out.point(i) == pts[i]);
    }
  }
}

TEST_CASE("initial point patterns") {
  const Vector x0 = vec({1, 2, 3});
  const auto two = initial_points(x0, 0.5, SetSize::two_n_plus_1);
  REQUIRE(two.size() == 7);
  CHECK(two[0] == x0);
  CHECK(two[1] == vec({1.5, 2, 3}));
  CHECK(two[2] == vec({0.5, 2, 3}));
  CHECK(two[5] == vec({1, 2, 3.5}));
  CHECK(two[6] == vec({1, 2, 2.5}));

  const auto three = initial_points(x0, 0.5, SetSize::n_plus_3);
  REQUIRE(three.size() == 6);
  CHECK(three[3] == vec({1, 2, 3.5}));
  CHECK(three[4] == vec({0.5, 2, 3}));
  CHECK(three[5] == vec({1, 1.5, 3}));
  CHECK(set_cardinality(SetSize::n_plus_3, 3) == 6);
}

TEST_CASE("norm radius rules") {
  InterpolationSet set({vec({0, 0}), vec({3, 4}), vec({1, 0}), vec({0, 1})}, {0, 0, 0, 0}, 0);
  CHECK(norm_radius(RadiusRule::delta, 0.2, set, vec({0, 0})) == 0.2);
  CHECK(norm_radius(RadiusRule::footnote, 0.2, set, vec({0, 0})) == 5.0);
  CHECK(norm_radius(RadiusRule::footnote, 0.6, set, vec({0, 0})) == 6.0);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.gamma = 1.0;
  CHECK_THROWS(cfg.validate());
  cfg = SolverConfig{};
  cfg.accept_low = 0.8;
  CHECK_THROWS(cfg.validate());
  cfg = SolverConfig{};
  cfg.delta0 = 2.0;
  cfg.delta_max = 1.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("Rosenbrock small-radius example improves on x0 for every weight row") {
  const Vector x0 = vec({1.04, 1.1});
  CHECK(rosenbrock(x0) == doctest::Approx(0.035456).epsilon(1e-12));
  for (const auto& C : oracle::table_rows()) {
    SolverConfig cfg;
    cfg.delta0 = 1e-4;
    cfg.max_evals = 16;
    const auto res = run(rosenbrock, x0, cfg, C);
    CHECK(res.history.size() == 16);
    CHECK(res.history.back().second < 0.035456);
    CHECK(res.best_f < 0.035456);
    if (C == WeightCoefficients::barycentric()) CHECK(res.best_f <= 0.02);
  }
}

TEST_CASE("convex quadratic is solved to gradient accuracy") {
  Matrix A(2, 2);
  A << 3.0, 1.0, 1.0, 2.0;
  const Vector xs = vec({0.7, -1.3});
  auto f = [&](const Vector& x) { return 0.5 * (x - xs).dot(A * (x - xs)) + 4.0; };
  for (const auto& C : oracle::table_rows()) {
    SolverConfig cfg;
    cfg.max_evals = 30 * 3;
    const auto res = run(f, vec({-2.0, 3.0}), cfg, C);
    CHECK((A * (res.best_x - xs)).norm() <= 1e-5);
  }
}

TEST_CASE("budget exhausted during initialization returns the best initial point") {
  SolverConfig cfg;
  cfg.max_evals = 5;
  cfg.delta0 = 0.1;
  const auto res = run(rosenbrock, vec({1.04, 1.1}), cfg, WeightCoefficients::barycentric());
  CHECK(res.history.size() == 5);
  CHECK(res.iterations.empty());
  double best = res.history.front().second;
  for (const auto& h : res.history) best = std::min(best, h.second);
  CHECK(res.best_f == best);

  cfg.max_evals = 3;
  CHECK(run(rosenbrock, vec({1.04, 1.1}), cfg, WeightCoefficients::barycentric()).history.size() == 3);
}

TEST_CASE("run invariants on Rosenbrock from the classical start") {
  Recorder rec;
  const Objective f = rec.wrap(rosenbrock);
  SolverConfig cfg;
  cfg.max_evals = 150;
  cfg.delta_max = 2.0;
  std::vector<Vector> centers;
  const auto res = run(f, vec({-1.2, 1.0}), cfg, WeightCoefficients::barycentric(), "rosenbrock",
                       [&](const IterationSnapshot& s) { centers.push_back(s.center); });

  // Best value is the running minimum of the history.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [k, v] : res.history) best = std::min(best, v);
  CHECK(res.best_f == best);
  CHECK(res.best_f < rosenbrock(vec({-1.2, 1.0})));

  // Evaluations: initial set plus exactly one per completed iteration.
  CHECK(rec.points.size() == res.history.size());
  CHECK(res.history.size() == 5 + res.iterations.size());

  // Radius values stay in (0, delta_max] and only move by powers of gamma or hit the cap.
  // A failed model build may shrink once more inside an iteration.
  for (std::size_t k = 0; k < res.iterations.size(); ++k) {
    const double d = res.iterations[k].delta;
    CHECK(d > 0.0);
    CHECK(d <= 2.0);
    if (k + 1 < res.iterations.size()) {
      const double next = res.iterations[k + 1].delta;
      const double e = std::log2(next / d);
      CHECK((next == 2.0 || (e == std::round(e) && e >= -2.0 && e <= 1.0)));
    }
  }

  // Accepted trial points become the next center.
  for (std::size_t k = 0; k + 1 < centers.size() && k < res.iterations.size(); ++k) {
    const auto& it = res.iterations[k];
    const Vector& trial_point = rec.points[it.evals - 1];
    if (it.accepted) {
      CHECK(centers[k + 1] == trial_point);
    } else {
      CHECK(centers[k + 1] == centers[k]);
    }
  }
}

TEST_CASE("runs are deterministic") {
  SolverConfig cfg;
  cfg.max_evals = 80;
  for (const auto& C : {WeightCoefficients::frobenius(), WeightCoefficients::barycentric()}) {
    const auto a = run(rosenbrock, vec({-1.2, 1.0}), cfg, C);
    const auto b = run(rosenbrock, vec({-1.2, 1.0}), cfg, C);
    CHECK(a.history == b.history);
    CHECK(to_json(a).dump() == to_json(b).dump());
  }
}

TEST_CASE("JSON record carries the documented fields") {
  SolverConfig cfg;
  cfg.max_evals = 20;
  const auto res = run(rosenbrock, vec({1.04, 1.1}), cfg, WeightCoefficients::barycentric(), "rosen");
  const auto j = to_json(res);
  for (const char* key : {"problem", "weights", "history", "best_x", "best_f", "iterations"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["problem"] == "rosen");
  CHECK(j["history"].size() == res.history.size());
  CHECK(j["history"][0][0] == 1);
  CHECK(j["iterations"][0].contains("rho"));
  CHECK(j["iterations"][0].contains("delta"));
  CHECK(j["iterations"][0].contains("kkt_residual"));
  CHECK_FALSE(j.contains("weights_trajectory"));
}

TEST_CASE("objective failures carry context") {
  SolverConfig cfg;
  int calls = 0;
  auto bad = [&](const Vector& x) {
    if (++calls == 7) throw std::runtime_error("boom");
    return rosenbrock(x);
  };
  try {
    run(bad, vec({1.04, 1.1}), cfg, WeightCoefficients::barycentric());
    FAIL("expected ObjectiveError");
  } catch (const ObjectiveError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("evaluation 7") != std::string::npos);
    CHECK(msg.find("boom") != std::string::npos);
  }
}

TEST_CASE("Steihaug option and footnote radius also converge on a quadratic") {
  auto f = [](const Vector& x) { return (x - vec({1, 2, 3})).squaredNorm(); };
  SolverConfig cfg;
  cfg.max_evals = 200;
  cfg.subproblem = SubproblemMethod::steihaug_cg;
  cfg.r_rule = RadiusRule::footnote;
  cfg.set_size = SetSize::n_plus_3;
  const auto res = run(f, vec({0, 0, 0}), cfg, WeightCoefficients::barycentric());
  CHECK(res.best_f < 1e-8);
}
