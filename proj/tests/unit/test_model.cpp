#include <doctest.h>

#include <random>

#include "remu/errors.hpp"
#include "remu/model.hpp"
#include "support/oracles.hpp"

using namespace remu;

namespace {
Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}
Matrix mat1(double h) { return Matrix::Constant(1, 1, h); }
}  // namespace

TEST_CASE("evaluate: zero, hand-computed and base point cases") {
  const QuadraticModel zero = QuadraticModel::constant(vec({0.5, -1}), 0.0);
  CHECK(evaluate(zero, vec({3, 4})) == 0.0);

  const QuadraticModel q(vec({0}), 1.0, vec({2}), mat1(2));
  CHECK(evaluate(q, vec({3})) == doctest::Approx(16.0).epsilon(1e-15));

  const QuadraticModel r(vec({1, 2}), -3.25, vec({1, 1}), Matrix::Identity(2, 2));
  CHECK(evaluate(r, vec({1, 2})) == -3.25);

  CHECK_THROWS_AS(evaluate(q, vec({1, 2})), DimensionError);
}

TEST_CASE("gradient: identity, linear and hand-computed cases") {
  const QuadraticModel q(vec({0, 0}), 0.0, vec({1, 0}), Matrix::Identity(2, 2));
  CHECK(gradient(q, vec({0, 0})) == vec({1, 0}));
  CHECK(gradient(q, vec({1, 1})) == vec({2, 1}));

  const QuadraticModel lin(vec({0, 0}), 2.0, vec({3, -1}), Matrix::Zero(2, 2));
  CHECK(gradient(lin, vec({7, -9})) == vec({3, -1}));
  CHECK_THROWS_AS(gradient(q, vec({1})), DimensionError);
}

TEST_CASE("recenter preserves function values") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const QuadraticModel q = oracle::random_model(rng, oracle::random_vector(rng, 3));
    const Vector nb = oracle::random_vector(rng, 3);
    const QuadraticModel s = recenter(q, nb);
    for (int k = 0; k < 5; ++k) {
      const Vector x = oracle::random_vector(rng, 3);
      CHECK(evaluate(s, x) == doctest::Approx(evaluate(q, x)).epsilon(1e-12));
    }
    CHECK(evaluate(s, nb) == s.c);
  }
}

TEST_CASE("weight coefficients reject points off the simplex") {
  CHECK_THROWS(WeightCoefficients(0.5, 0.5, 0.5));
  CHECK_THROWS(WeightCoefficients(-0.1, 0.6, 0.5));
  CHECK_NOTHROW(WeightCoefficients(0.2, 0.3, 0.5));
}

TEST_CASE("eta coefficients") {
  SUBCASE("least Frobenius weights") {
    for (int n : {1, 4, 12}) {
      for (double r : {1e-3, 1.0, 7.0}) {
        const auto e = eta_coefficients(WeightCoefficients::frobenius(), n, r);
        CHECK(e.eta1 == 1.0);
        CHECK(e.eta2 == 0.0);
        CHECK(e.eta3 == 0.0);
        CHECK(e.eta4 == 0.0);
        CHECK(e.eta5 == 0.0);
      }
    }
  }
  SUBCASE("vanishing radius limits") {
    const auto e = eta_coefficients(WeightCoefficients::barycentric(), 5, 1e-8);
    CHECK(std::abs(e.eta1 - 1.0 / 3) <= 1e-10);
    CHECK(std::abs(e.eta2 - 1.0 / 3) <= 1e-10);
    CHECK(std::abs(e.eta3) <= 1e-10);
    CHECK(std::abs(e.eta4) <= 1e-10);
    CHECK(std::abs(e.eta5 - 1.0 / 3) <= 1e-10);
  }
  SUBCASE("pure H0 weights, n = 2, r = 1") {
    const auto e = eta_coefficients({1, 0, 0}, 2, 1.0);
    CHECK(e.eta1 == doctest::Approx(1.0 / 48));
    CHECK(e.eta2 == doctest::Approx(1.0 / 4));
    CHECK(e.eta3 == doctest::Approx(1.0 / 96));
    CHECK(e.eta4 == doctest::Approx(1.0 / 4));
    CHECK(e.eta5 == 1.0);
  }
  CHECK_THROWS(eta_coefficients(WeightCoefficients::barycentric(), 2, 0.0));
}

TEST_CASE("unit ball volume") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}

TEST_CASE("weighted norm: trivial integrals") {
  const QuadraticModel one(vec({0}), 1.0, vec({0}), mat1(0));
  CHECK(weighted_norm_sq(one, vec({0}), 1.0, {1, 0, 0}) == doctest::Approx(2.0));

  const QuadraticModel half_sq(vec({0}), 0.0, vec({0}), mat1(1));
  CHECK(weighted_norm_sq(half_sq, vec({0}), 1.0, WeightCoefficients::frobenius()) ==
        doctest::Approx(2.0));

  CHECK_THROWS(weighted_norm_sq(one, vec({1}), 1.0, {1, 0, 0}));
  CHECK_THROWS(weighted_norm_sq(one, vec({0}), -1.0, {1, 0, 0}));
}

TEST_CASE("weighted norm: Frobenius weights give the closed form volume * r^n * |H|^2") {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 6; ++n) {
    const Vector b = oracle::random_vector(rng, n);
    const QuadraticModel q = oracle::random_model(rng, b);
    const double r = 0.3 + n * 0.2;
    const double expected = unit_ball_volume(n) * std::pow(r, n) * q.H.squaredNorm();
    CHECK(weighted_norm_sq(q, b, r, WeightCoefficients::frobenius()) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("weighted norm: positive homogeneity of degree two") {
  std::mt19937_64 rng(5);
  const Vector b = oracle::random_vector(rng, 3);
  const QuadraticModel q = oracle::random_model(rng, b);
  const WeightCoefficients C(0.2, 0.5, 0.3);
  const double base = weighted_norm_sq(q, b, 0.8, C);
  for (double s : {-2.0, 0.5, 3.0}) {
    CHECK(weighted_norm_sq(s * q, b, 0.8, C) == doctest::Approx(s * s * base).epsilon(1e-13));
  }
}

TEST_CASE("weighted norm: Monte Carlo estimate of the definition, n = 2, r = 0.7") {
  std::mt19937_64 rng(11);
  const Vector b = oracle::random_vector(rng, 2);
  const QuadraticModel q = oracle::random_model(rng, b);
  const WeightCoefficients C = WeightCoefficients::barycentric();
  const double r = 0.7;
  const auto pts = oracle::random_points(rng, b, 1'000'001, r);
  double sum = 0.0, sum_sq = 0.0;
  const double h2 = q.H.squaredNorm();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double v = evaluate(q, pts[i]);
    const double val = C.c1() * v * v + C.c2() * gradient(q, pts[i]).squaredNorm() + C.c3() * h2;
    sum += val;
    sum_sq += val * val;
  }
  const double N = static_cast<double>(pts.size() - 1);
  const double mean = sum / N;
  const double se = std::sqrt((sum_sq / N - mean * mean) / N);
  const double vol = unit_ball_volume(2) * r * r;
  const double closed = weighted_norm_sq(q, b, r, C);
  CHECK(std::abs(closed - vol * mean) <= 3.0 * vol * se);
}

TEST_CASE("weighted norm: matches polar quadrature for n <= 3") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const Vector b = oracle::random_vector(rng, n);
    const QuadraticModel q = oracle::random_model(rng, b);
    const WeightCoefficients C = oracle::random_weights(rng);
    const double r = 0.2 + 0.1 * (trial % 7);
    const double quad = oracle::weighted_norm_by_quadrature(q, b, r, C);
    CHECK(weighted_norm_sq(q, b, r, C) == doctest::Approx(quad).epsilon(1e-10));
  }
}

TEST_CASE("weight parsing and the standard rows") {
  CHECK(parse_weights("1/3,1/3,1/3") == WeightCoefficients::barycentric());
  CHECK(parse_weights("0, 0, 1") == WeightCoefficients::frobenius());
  CHECK(parse_weights("0.5,0,0.5") == WeightCoefficients(0.5, 0.0, 0.5));
  for (const char* bad : {"0.5,0.5", "a,b,c", "0.6,0.6,0.6", "1/0,0,1", "-0.5,0.5,1", "", "0,0,1,0"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_weights(bad), std::invalid_argument);
  }
  const auto& rows = standard_weight_rows();
  REQUIRE(rows.size() == 7);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].c1() + rows[i].c2() + rows[i].c3() == doctest::Approx(1.0));
    for (std::size_t j = 0; j < i; ++j) CHECK_FALSE(rows[i] == rows[j]);
  }
  CHECK(rows[3] == WeightCoefficients::barycentric());
}
