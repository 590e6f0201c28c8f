#include "adaopt/regularizer.hpp"
#include "adaopt/losses.hpp"
#include "adaopt/schedules.hpp"

#include <doctest.h>

#include <vector>

using namespace adaopt;

namespace {
Point P(std::initializer_list<double> v) {
  Point p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}
}  // namespace

TEST_CASE("regularizer values") {
  const auto q = Regularizer::quadratic(P({1, 0}), Metric::diagonal(P({2, 4})), 0.5);
  CHECK(q.value(P({2, 1})) == doctest::Approx(0.5 * 0.5 * (2 + 4)));
  CHECK(Regularizer::linear(P({1, 2}), 3.0).value(P({1, 1})) == doctest::Approx(6.0));
  CHECK(Regularizer::l1(3, 0.5).value(P({1, -2, 0})) == doctest::Approx(1.5));
  CHECK(std::isinf(Regularizer::indicatrix(FeasibleSet::ball(2, 1.0)).value(P({1, 1}))));
  CHECK(Regularizer::zero().is_zero());
}

TEST_CASE("merge keeps a single quadratic") {
  const auto a = Regularizer::half_sq_norm(P({1, 1}), 2.0);
  const auto b = Regularizer::half_sq_norm(P({-1, 3}), 1.0);
  const auto m = merge(a, b);
  for (const Point& x : {P({0, 0}), P({2, -1}), P({0.5, 4})}) CHECK(m.value(x) == doctest::Approx(a.value(x) + b.value(x)));
  const CanonicalForm c = canonicalize(m, 2);
  CHECK(c.has_quadratic());
}

TEST_CASE("certified metric") {
  const auto r = Regularizer::half_sq_norm(2, 3.0) + Regularizer::l1(2, 1.0);
  const auto cert = certified_metric(r, 2);
  CHECK(cert.certified);
  CHECK(cert.metric.min_eigenvalue() == doctest::Approx(3.0));
  const auto neg = Regularizer::half_sq_norm(2, 1.0) + Regularizer::half_sq_norm(2, 1.0).negated();
  CHECK_FALSE(certified_metric(neg, 2).certified);
}

TEST_CASE("adagrad diagonal accumulation") {
  ScheduleState s;
  auto st = adagrad_diag_step(s, P({3, 4}), 1.0, 0.0);
  CHECK(st.cumulative.diag()[0] == doctest::Approx(3.0));
  CHECK(st.cumulative.diag()[1] == doctest::Approx(4.0));
  st = adagrad_diag_step(s, P({0, 3}), 1.0, 0.0);
  CHECK(st.cumulative.diag()[0] == doctest::Approx(3.0));
  CHECK(st.cumulative.diag()[1] == doctest::Approx(5.0));
  CHECK(st.increment.diag()[1] == doctest::Approx(1.0));

  ScheduleState z;
  z.cumulative = adagrad_initial_metric(3, 1.0, 1.0);
  for (int t = 0; t < 5; ++t) st = adagrad_diag_step(z, Point(Point::Zero(3)), 1.0, 1.0);
  CHECK((st.cumulative.diag() - Point::Ones(3)).norm() == doctest::Approx(0.0));
}

TEST_CASE("adagrad full accumulation") {
  ScheduleState s;
  auto st = adagrad_full_step(s, P({1, 0}), 1.0, 0.0);
  CHECK((st.cumulative.dense() - Matrix(P({1, 0}).asDiagonal())).norm() == doctest::Approx(0.0));
  st = adagrad_full_step(s, P({0, 1}), 1.0, 0.0);
  CHECK((st.cumulative.dense() - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((adagrad_initial_metric(2, 1.0, 4.0).dense() - 2.0 * Matrix::Identity(2, 2)).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("adagrad increments stay psd") {
  Rng rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  ScheduleState s;
  for (int t = 0; t < 100; ++t) {
    const Point g = Point::NullaryExpr(4, [&](Index) { return n(rng); });
    const auto st = adagrad_full_step(s, g, 0.7, 0.0);
    CHECK(st.increment.min_eigenvalue() >= -1e-9);
  }
}

TEST_CASE("ftrl-prox increment is centred at x_t") {
  const auto p = ftrl_prox_increment(P({1, 1}), Metric::diagonal(P({2, 0})));
  CHECK(p.value(P({1, 1})) == 0.0);
  CHECK(p.value(P({2, 1})) == doctest::Approx(1.0));
  CHECK(p.value(P({1, 7})) == doctest::Approx(0.0));
  CHECK(ftrl_prox_increment(P({1, 1}), Metric::zero(2)).is_zero());
}

TEST_CASE("optimistic shift") {
  const auto q = Regularizer::half_sq_norm(2, 1.0);
  const auto same = optimistic_shift(q, P({1, 2}), P({1, 2}));
  CHECK(same.value(P({3, -1})) == doctest::Approx(q.value(P({3, -1}))));
  const auto lin = optimistic_shift(Regularizer::zero(), P({1, 0}), P({3, 0}));
  CHECK(lin.value(P({1, 5})) == doctest::Approx(2.0));
  const auto first = optimistic_shift(Regularizer::zero(), Point(Point::Zero(2)), P({0.5, -1}));
  CHECK(first.value(P({2, 1})) == doctest::Approx(0.0));
}

TEST_CASE("scale-free learning rates") {
  ScheduleState s;
  CHECK(scale_free_eta(s, P({2, 0}), Point(Point::Zero(2)), 1.0) == doctest::Approx(2.0));
  ScheduleState e;
  for (int t = 0; t < 4; ++t) scale_free_eta(e, P({1, 2}), P({1, 2}), 1.0);
  CHECK(e.eta_prev == 0.0);
  ScheduleState u;
  double eta = 0.0;
  for (int t = 0; t < 4; ++t) eta = scale_free_eta(u, P({1, 0}), Point(Point::Zero(2)), 1.0);
  CHECK(eta == doctest::Approx(2.0));

  Rng rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  ScheduleState a, b;
  for (int t = 0; t < 50; ++t) {
    const Point g = Point::NullaryExpr(3, [&](Index) { return n(rng); });
    const Point h = Point::NullaryExpr(3, [&](Index) { return n(rng); });
    const double ea = scale_free_eta(a, g, h, 1.0);
    const double eb = scale_free_eta(b, Point(7.5 * g), Point(7.5 * h), 1.0);
    CHECK(eb == doctest::Approx(7.5 * ea).epsilon(1e-12));
  }
}

TEST_CASE("final-attack learning rates") {
  ScheduleState s;
  CHECK(final_attack_eta(s, P({2, 0}), Point(Point::Zero(2)), 2.0, 0.0) == doctest::Approx(2.0));
  ScheduleState z;
  CHECK(final_attack_eta(z, Point(Point::Zero(2)), Point(Point::Zero(2)), 2.0, 1.0) == doctest::Approx(8.0));
  ScheduleState u;
  CHECK_THROWS(final_attack_eta(u, P({1, 0}), P({0, 0}), kInf, 0.0));

  Rng rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  ScheduleState m;
  double prev = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double eta = final_attack_eta(m, Point::NullaryExpr(2, [&](Index) { return n(rng); }), Point(Point::Zero(2)), 1.5, 0.5);
    CHECK(eta >= 4.0 * 1.5 * 0.25 - 1e-12);
    CHECK(eta >= prev);
    prev = eta;
  }
}

TEST_CASE("composite wrap") {
  const auto q = Regularizer::half_sq_norm(2, 1.0);
  std::vector<Regularizer> none(3, Regularizer::zero());
  CHECK(composite_wrap(q, none, CompositeSetting::KnownBefore, 1).value(P({1, 1})) == doctest::Approx(1.0));
  std::vector<Regularizer> psis(3, Regularizer::l1(2, 0.5));
  CHECK(composite_wrap(q, psis, CompositeSetting::RevealedAfter, 0).value(P({1, 1})) == doctest::Approx(1.0));
  CHECK(composite_wrap(q, psis, CompositeSetting::RevealedAfter, 1).value(P({1, 1})) == doctest::Approx(2.0));
  CHECK(composite_wrap(q, psis, CompositeSetting::KnownBefore, 0).value(P({1, 1})) == doctest::Approx(2.0));
  // psi_{T+1} = 0
  CHECK(composite_wrap(q, psis, CompositeSetting::KnownBefore, 3).value(P({1, 1})) == doctest::Approx(1.0));
}

TEST_CASE("psi sequence validation") {
  Rng rng(2);
  const auto probes = make_probes(FeasibleSet::box(2, -2.0, 2.0), 20, rng);
  std::vector<Regularizer> dec{Regularizer::l1(2, 1.0), Regularizer::l1(2, 0.5), Regularizer::l1(2, 0.25)};
  CHECK(validate_psi_sequence(dec, Point(Point::Zero(2)), probes));
  std::vector<Regularizer> inc{Regularizer::l1(2, 0.25), Regularizer::l1(2, 0.5)};
  CHECK_FALSE(validate_psi_sequence(inc, Point(Point::Zero(2)), probes));
  std::vector<Regularizer> off{Regularizer::l1(2, 0.25)};
  CHECK_FALSE(validate_psi_sequence(off, P({1, 1}), probes));
}
