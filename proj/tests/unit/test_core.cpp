#include "adaopt/core.hpp"
#include "adaopt/losses.hpp"
#include "adaopt/regularizer.hpp"

#include <doctest.h>

using namespace adaopt;

namespace {
Point P(std::initializer_list<double> v) {
  Point p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}
}  // namespace

TEST_CASE("dot product") {
  CHECK(dot(P({1, 2}), P({3, 4})) == 11.0);
  CHECK(dot(P({5, -1}), Point(Point::Zero(2))) == 0.0);
  CHECK(dot(P({1, 0}), P({0, 1})) == 0.0);
  CHECK_THROWS_AS(dot(P({1, 2}), P({1, 2, 3})), DimensionError);
}

TEST_CASE("metric norms") {
  CHECK(quad_norm_sq(Metric::diagonal(P({3, 5})), P({1, 1})) == doctest::Approx(8.0));
  CHECK(quad_norm_sq(Metric::scaled_identity(2, 2.0), P({1, 2})) == doctest::Approx(10.0));
  CHECK(quad_norm_sq(Metric::full(Matrix::Identity(3, 3)), Point(Point::Zero(3))) == 0.0);

  CHECK(dual_norm_sq(Metric::diagonal(P({4, 1})), P({2, 3})) == doctest::Approx(10.0));
  CHECK(dual_norm_sq(Metric::scaled_identity(2, 2.0), P({2, 0})) == doctest::Approx(2.0));
  CHECK(dual_norm_sq(Metric::diagonal(P({4, 1})), Point(Point::Zero(2))) == 0.0);
  CHECK_THROWS_AS(dual_norm_sq(Metric::diagonal(P({4, 0})), P({1, 1})), DomainError);
  CHECK(std::isinf(dual_norm_sq_or_inf(Metric::diagonal(P({4, 0})), P({1, 1}))));
}

TEST_CASE("fenchel-young on random metrics") {
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Matrix a = Matrix::NullaryExpr(3, 3, [&](Index, Index) { return n(rng); });
    const Metric m = Metric::full(a * a.transpose() + 0.05 * Matrix::Identity(3, 3));
    const Point x = Point::NullaryExpr(3, [&](Index) { return n(rng); });
    const Point g = Point::NullaryExpr(3, [&](Index) { return n(rng); });
    CHECK(g.dot(x) <= 0.5 * quad_norm_sq(m, x) + 0.5 * dual_norm_sq(m, g) + 1e-9);
  }
}

TEST_CASE("extended reals") {
  CHECK_THROWS_AS(ExtReal(std::nan("")), DomainError);
  CHECK((ExtReal(1.0) + ExtReal::infinity()).is_inf());
  CHECK_THROWS_AS(ExtReal::infinity() - ExtReal::infinity(), DomainError);
  CHECK((0.0 * ExtReal::infinity()).value() == 0.0);
  CHECK_THROWS(ExtReal::infinity().finite("x"));
}

TEST_CASE("directional derivatives") {
  const auto half = Regularizer::half_sq_norm(2, 1.0);
  CHECK(half.dir_derivative(P({1, 1}), P({1, 0})).value() == doctest::Approx(1.0));
  const auto l1 = Regularizer::l1(1, 1.0);
  CHECK(l1.dir_derivative(P({0}), P({-1})).value() == doctest::Approx(1.0));

  // affine shift adds <v, z>
  const auto f = Regularizer::half_sq_norm(2, 1.0) + Regularizer::linear(P({2, -1}), 3.0);
  const Point x = P({0.3, -0.2});
  const Point z = P({1, 2});
  CHECK(f.dir_derivative(x, z).value() == doctest::Approx(half.dir_derivative(x, z).value() + 2.0 - 2.0));

  // numeric fallback agrees with the closed form on a smooth function
  FunctionHandle h([](const Point& p) { return 0.5 * p.squaredNorm() + std::sin(p[0]); });
  CHECK(h.dir_derivative(P({0.4, 1.0}), P({1, 1})).value() == doctest::Approx(0.4 + std::cos(0.4) + 1.0).epsilon(1e-5));
}

TEST_CASE("bregman divergence") {
  CHECK(bregman(Regularizer::half_sq_norm(2, 1.0), P({3, 4}), Point(Point::Zero(2))).value() == doctest::Approx(12.5));
  CHECK(bregman(Regularizer::l1(1, 1.0), P({-2}), P({1})).value() == doctest::Approx(4.0));
  CHECK(bregman(Regularizer::l1(1, 1.0), P({2}), P({1})).value() == doctest::Approx(0.0));

  const auto box = Regularizer::indicatrix(FeasibleSet::box(1, 0.0, 1.0));
  CHECK(bregman(box, P({2}), P({0.5})).is_inf());
  CHECK_THROWS_AS(bregman(box, P({0.5}), P({2})), DomainError);
}

TEST_CASE("delta term") {
  const Loss q = losses::quadratic(P({1, -1}), 1.0);
  const Point x = P({0.2, 0.7});
  CHECK(delta_term(q, x, P({1, 2}), q.gradient(x)) == doctest::Approx(0.0).epsilon(1e-12));

  const auto a = Regularizer::l1(1, 1.0);
  CHECK(delta_term(a, P({0}), P({1}), P({0.5})) == doctest::Approx(-0.5));

  // noise orthogonal to x* - x_t
  const Point sigma = P({0.9, 0.0});
  CHECK(delta_term(q, P({0.0, 0.0}), P({0.0, 3.0}), Point(q.gradient(P({0.0, 0.0})) + sigma)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}
