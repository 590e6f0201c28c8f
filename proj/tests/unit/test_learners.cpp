#include "adaopt/experiment.hpp"
#include "adaopt/learner.hpp"

#include <doctest.h>

using namespace adaopt;

namespace {
Point P(std::initializer_list<double> v) {
  Point p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}
bool near(const Point& a, const Point& b, double tol = 1e-9) { return (a - b).norm() <= tol; }
const auto half2 = Regularizer::half_sq_norm(2, 1.0);
}  // namespace

TEST_CASE("init") {
  const auto u = FeasibleSet::unconstrained(2);
  CHECK(near(init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {}).x, P({0, 0})));
  CHECK(near(init(Algorithm::Ftrl, u, half2, std::nullopt, P({1, 0}), {}).x, P({-1, 0})));
  const auto box = FeasibleSet::box(2, -1.0, 1.0);
  const auto q0 = Regularizer::indicatrix(box) + Regularizer::half_sq_norm(P({3, -0.5}), 1.0);
  CHECK(near(init(Algorithm::Ftrl, box, q0, std::nullopt, std::nullopt, {}).x, P({1, -0.5})));
  CHECK_THROWS_AS(init(Algorithm::Ftrl, u, half2, P({1, 1}), std::nullopt, {}), LearnerError);
}

TEST_CASE("ftrl step") {
  const auto u = FeasibleSet::unconstrained(2);
  LearnerState s = init(Algorithm::Ftrl, u, Regularizer::half_sq_norm(2, 2.0), std::nullopt, std::nullopt, {});
  s.x = P({1, 0});
  s.g_sum = P({-2, 0});  // consistent with x = -eta * sum g, eta = 0.5
  CHECK(near(ftrl_step(s, P({2, 2}), Regularizer::zero(), Regularizer::zero()), P({0, -1})));

  LearnerState z = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  for (int t = 0; t < 5; ++t) CHECK(near(ftrl_step(z, P({0, 0}), Regularizer::zero(), Regularizer::zero()), P({0, 0})));

  LearnerState bad = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  CHECK_THROWS_WITH_AS(ftrl_step(bad, P({1, 1}), Regularizer::half_sq_norm(P({1, 1}), 1.0), Regularizer::zero()),
                       doctest::Contains("proximal"), LearnerError);
}

TEST_CASE("md step") {
  const auto u = FeasibleSet::unconstrained(2);
  LearnerState s = init(Algorithm::Md, u, half2, std::nullopt, std::nullopt, {});
  s.x = P({1, 1});
  CHECK(near(md_step(s, P({0, 0}), Regularizer::zero(), Regularizer::zero()), P({1, 1})));
  CHECK(near(md_step(s, P({2, 2}), Regularizer::zero(), half2), P({-1, -1})));

  const auto simplex = FeasibleSet::simplex(2, 1.0);
  LearnerState m = init(Algorithm::Md, simplex, half2, std::nullopt, std::nullopt, {});
  CHECK(near(m.x, P({0.5, 0.5})));
  CHECK(near(md_step(m, P({1, 0}), Regularizer::zero(), half2), P({0, 1})));
}

TEST_CASE("optimistic ftrl") {
  const auto u = FeasibleSet::unconstrained(2);
  LearnerState s = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  CHECK(near(ao_ftrl_step(s, P({1, 0}), P({1, 0}), Regularizer::zero(), Regularizer::zero()), P({-2, 0})));

  LearnerState a = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  LearnerState b = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  Rng rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const Point g = Point::NullaryExpr(2, [&](Index) { return n(rng); });
    CHECK(near(ao_ftrl_step(a, g, P({0, 0}), Regularizer::zero(), Regularizer::zero()),
               ftrl_step(b, g, Regularizer::zero(), Regularizer::zero()), 1e-12));
  }
}

TEST_CASE("optimistic md") {
  const auto u = FeasibleSet::unconstrained(2);
  LearnerState s = init(Algorithm::Md, u, half2, std::nullopt, std::nullopt, {});
  CHECK(near(ao_md_step(s, P({1, 0}), P({1, 0}), P({0, 0}), Regularizer::zero(), half2), P({0, 0})));
  CHECK(s.solver_calls == 1 + 1);

  LearnerState a = init(Algorithm::Md, FeasibleSet::ball(2, 1.0), half2, std::nullopt, std::nullopt, {});
  LearnerState b = a;
  CHECK(near(ao_md_step(a, P({0.3, -0.2}), P({0.1, 0.1}), P({0.1, 0.1}), Regularizer::zero(), half2),
             md_step(b, P({0.3, -0.2}), Regularizer::zero(), half2), 1e-12));
}

TEST_CASE("composite steps") {
  const auto u = FeasibleSet::unconstrained(2);
  std::vector<Regularizer> none(3, Regularizer::zero());
  LearnerState a = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  LearnerState b = a;
  CHECK(near(composite_step(a, P({0.5, 1}), none, CompositeSetting::RevealedAfter, Regularizer::zero(), Regularizer::zero()),
             ftrl_step(b, P({0.5, 1}), Regularizer::zero(), Regularizer::zero())));

  std::vector<Regularizer> psis(3, Regularizer::l1(2, 1.0));
  LearnerState c = init(Algorithm::Ftrl, u, half2, std::nullopt, std::nullopt, {});
  const Point x = composite_step(c, P({0.5, 3}), psis, CompositeSetting::RevealedAfter, Regularizer::zero(), Regularizer::zero());
  CHECK(x[0] == 0.0);
  CHECK(x[1] == doctest::Approx(-2.0));
}

TEST_CASE("implicit md") {
  const auto u = FeasibleSet::unconstrained(1);
  const auto half1 = Regularizer::half_sq_norm(1, 1.0);
  LearnerState s = init(Algorithm::Md, u, half1, std::nullopt, std::nullopt, {});
  CHECK(implicit_md_step(s, losses::quadratic(P({2}), 1.0), Regularizer::zero(), half1)[0] == doctest::Approx(1.0).epsilon(1e-8));

  LearnerState a = init(Algorithm::Md, FeasibleSet::unconstrained(2), half2, std::nullopt, std::nullopt, {});
  LearnerState b = a;
  CHECK(near(implicit_md_step(a, losses::linear(P({1, -2})), Regularizer::zero(), half2),
             md_step(b, P({1, -2}), Regularizer::zero(), half2), 1e-8));
}

TEST_CASE("non-linearized ftrl") {
  const auto u = FeasibleSet::unconstrained(1);
  LearnerState s = init(Algorithm::Ftrl, u, Regularizer::zero(), P({0}), std::nullopt, {});
  nonlinearized_ftrl_step(s, losses::quadratic(P({0}), 1.0), Regularizer::zero(), Regularizer::zero());
  CHECK(nonlinearized_ftrl_step(s, losses::quadratic(P({2}), 1.0), Regularizer::zero(), Regularizer::zero())[0] ==
        doctest::Approx(1.0).epsilon(1e-8));

  LearnerState a = init(Algorithm::Ftrl, FeasibleSet::unconstrained(2), half2, std::nullopt, std::nullopt, {});
  LearnerState b = a;
  CHECK(near(nonlinearized_ftrl_step(a, losses::linear(P({1, 1})), Regularizer::zero(), Regularizer::zero()),
             ftrl_step(b, P({1, 1}), Regularizer::zero(), Regularizer::zero()), 1e-8));
}

TEST_CASE("preset names round-trip") {
  for (const char* n : {"ogd", "da", "adagrad-da", "ftrl-prox", "ao-ftrl-prox", "md", "ao-md", "implicit-md", "nonlin-ftrl"})
    CHECK(to_string(parse_preset(n)) == n);
  CHECK_THROWS(parse_preset("sgd"));
}

TEST_CASE("learner config validation") {
  LearnerConfig c;
  c.set = FeasibleSet::ball(2, 1.0);
  c.eta = 0.0;
  CHECK_THROWS(c.validate());
  c.eta = 1.0;
  c.preset = Preset::AdagradDa;
  c.gamma = 0.0;
  CHECK_THROWS(c.validate());
  c.gamma = 0.5;
  CHECK_NOTHROW(c.validate());
  c.preset = Preset::Ogd;
  c.schedule = ScheduleKind::StrongInvT;
  CHECK_THROWS(c.validate());
  c.schedule = ScheduleKind::Default;
  c.x1 = P({2, 0});
  CHECK_THROWS(c.validate());
}

TEST_CASE("ogd preset matches its closed form") {
  LearnerConfig c;
  c.preset = Preset::Ogd;
  c.eta = 0.5;
  c.set = FeasibleSet::ball(2, 1.0);
  Learner l(c, 20);
  Point sum = Point::Zero(2);
  Rng rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const Point g = Point::NullaryExpr(2, [&](Index) { return n(rng); });
    sum += g;
    const RoundTrace rt = l.step(g);
    CHECK(near(rt.x_next, project(c.set, Point(-0.5 * sum)), 1e-9));
  }
}

TEST_CASE("ao-md uses one solver call per round") {
  LearnerConfig c;
  c.preset = Preset::AoMd;
  c.set = FeasibleSet::box(3, -1.0, 1.0);
  Learner l(c, 40);
  const long before = l.state().solver_calls;
  for (int t = 0; t < 40; ++t) l.step(P({0.3, -0.1, 0.2 * t}));
  CHECK(l.state().solver_calls - before == 40);
}

TEST_CASE("learner rejects extra rounds") {
  LearnerConfig c;
  c.set = FeasibleSet::ball(2, 1.0);
  Learner l(c, 1);
  l.step(P({1, 0}));
  CHECK_THROWS(l.step(P({1, 0})));
}
