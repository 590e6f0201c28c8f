#include "adaopt/experiment.hpp"
#include "adaopt/regret.hpp"

#include <doctest.h>

#include <sstream>

using namespace adaopt;

namespace {
Point P(std::initializer_list<double> v) {
  Point p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Ledger run(const LearnerConfig& lc, const LossSequence& seq, const Point& xs) {
  Rng noise(1);
  return build_ledger(simulate(lc, seq, seq.rounds(), noise), seq, xs);
}
}  // namespace

TEST_CASE("empirical regret by hand") {
  LearnerConfig lc;
  lc.preset = Preset::Ogd;
  lc.eta = 1.0;
  lc.set = FeasibleSet::unconstrained(2);
  lc.x1 = P({1, 0});
  // g = (1, 0) then x_2 = x_1 - g = (0, 0)
  const auto seq = LossSequence::adversarial_linear({P({1, 0}), P({1, 0})});
  const Ledger l = run(lc, seq, P({-1, 0}));
  CHECK(l.rounds[1].x[0] == doctest::Approx(0.0));
  CHECK(empirical_regret(l) == doctest::Approx(3.0));
}

TEST_CASE("regret is nonnegative against the offline best") {
  LearnerConfig lc;
  lc.preset = Preset::Da;
  lc.set = FeasibleSet::box(2, -1.0, 1.0);
  const auto seq = LossSequence::fixed(losses::abs_l1(P({0.3, -0.6})), 3);
  const Ledger l = run(lc, seq, offline_best(seq, lc.set));
  CHECK(empirical_regret(l) >= -1e-12);
}

TEST_CASE("constant loss at the comparator has zero regret") {
  LearnerConfig lc;
  lc.preset = Preset::Ogd;
  lc.set = FeasibleSet::unconstrained(2);
  lc.x1 = P({0.5, 0.5});
  const auto seq = LossSequence::adversarial_linear(std::vector<Point>(4, P({0, 0})));
  const Ledger l = run(lc, seq, P({0.5, 0.5}));
  CHECK(empirical_regret(l) == 0.0);
  CHECK(forward_regret(l) == 0.0);
  const BoundReport f = bound_forward(l);
  CHECK(f.value == doctest::Approx(0.0));
}

TEST_CASE("forward regret by hand") {
  LearnerConfig lc;
  lc.preset = Preset::Md;
  lc.eta = 1.0;
  lc.set = FeasibleSet::unconstrained(2);
  lc.x1 = P({1, 1});
  const auto seq = LossSequence::adversarial_linear({P({1, 0})});
  const Ledger l = run(lc, seq, P({1, 1}));
  CHECK(l.rounds[0].x_next[0] == doctest::Approx(0.0));
  CHECK(forward_regret(l) == doctest::Approx(-1.0));
}

TEST_CASE("decomposition identity on linear runs is exact") {
  LearnerConfig lc;
  lc.preset = Preset::FtrlProx;
  lc.set = FeasibleSet::ball(3, 1.0);
  std::vector<Point> gs;
  Rng rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 30; ++t) gs.push_back(Point::NullaryExpr(3, [&](Index) { return n(rng); }));
  const auto seq = LossSequence::adversarial_linear(gs);
  const Ledger l = run(lc, seq, P({0.2, 0.1, -0.3}));
  for (const auto& r : l.rounds) {
    CHECK(std::abs(r.breg_loss) <= 1e-12);
    CHECK(std::abs(r.delta) <= 1e-12);
  }
  CHECK(decomposition_residual(l) <= 1e-12 * (1.0 + std::abs(empirical_regret(l))));
  CHECK(bound_forward(l).slack >= -1e-8);
}

TEST_CASE("star-convex runs keep the identity") {
  LearnerConfig lc;
  lc.preset = Preset::Ogd;
  lc.eta = 0.3;
  lc.set = FeasibleSet::box(2, -2.0, 2.0);
  const auto seq = LossSequence::fixed(losses::star_piecewise(P({0.4, -0.2})), 40);
  const Ledger l = run(lc, seq, P({0.4, -0.2}));
  CHECK(decomposition_residual(l) <= 1e-8 * (1.0 + std::abs(empirical_regret(l))));
}

TEST_CASE("md forward bound on quadratics") {
  LearnerConfig lc;
  lc.preset = Preset::Md;
  lc.schedule = ScheduleKind::InvSqrt;
  lc.set = FeasibleSet::box(2, -1.0, 1.0);
  const auto seq = LossSequence::fixed(losses::quadratic(P({0.3, 0.9}), 1.0), 50);
  const Ledger l = run(lc, seq, P({0.3, 0.9}));
  CHECK(bound_forward(l).slack >= -1e-8);
}

TEST_CASE("oo-ftrl bound for tuned ogd") {
  const int T = 100;
  LearnerConfig lc;
  lc.preset = Preset::Ogd;
  lc.eta = 1.0 / std::sqrt(double(T));
  lc.set = FeasibleSet::ball(2, 1.0);
  std::vector<Point> gs;
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < T; ++t) {
    Point g = Point::NullaryExpr(2, [&](Index) { return n(rng); });
    gs.push_back(g / g.norm());
  }
  const auto seq = LossSequence::adversarial_linear(gs);
  const Point xs = offline_best(seq, lc.set);
  const Ledger l = run(lc, seq, xs);
  BoundInputs in;
  in.x_star = xs;
  const BoundReport b = bound_case(l, in, BoundCase::OoFtrl);
  CHECK(b.value == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(b.empirical <= b.value);
  const BoundReport b0 = bound_case(l, in, BoundCase::OoFtrl, true);
  CHECK(b0.empirical <= b0.value);
}

TEST_CASE("zero losses leave only regularizer terms") {
  LearnerConfig lc;
  lc.preset = Preset::Ogd;
  lc.set = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::adversarial_linear(std::vector<Point>(5, P({0, 0})));
  const Ledger l = run(lc, seq, P({0.6, 0.0}));
  BoundInputs in;
  const BoundReport b = bound_case(l, in, BoundCase::OoFtrl);
  CHECK(b.empirical == 0.0);
  CHECK(b.value == doctest::Approx(0.5 * 0.36));
}

TEST_CASE("bound case certificate checks") {
  LearnerConfig lc;
  lc.preset = Preset::Md;
  lc.set = FeasibleSet::box(2, -1.0, 1.0);
  const auto seq = LossSequence::fixed(losses::quadratic(P({0.1, 0.1}), 1.0), 10);
  const Ledger l = run(lc, seq, P({0.1, 0.1}));
  BoundInputs in;
  CHECK_THROWS_AS(bound_case(l, in, BoundCase::OoFtrl), BoundError);
  in.stochastic = true;
  CHECK_THROWS_WITH(bound_case(l, in, BoundCase::OoMd), doctest::Contains("assumption-certificate missing"));
  in.stochastic = false;
  CHECK_THROWS(bound_case(l, in, BoundCase::SmoothSoMd));
  CHECK_NOTHROW(bound_case(l, in, BoundCase::OoMd));
}

TEST_CASE("ao bound with zero hints equals the plain bound") {
  LearnerConfig lc;
  lc.preset = Preset::FtrlProx;
  lc.set = FeasibleSet::box(2, -1.0, 1.0);
  std::vector<Point> gs;
  for (int t = 0; t < 20; ++t) gs.push_back(P({std::sin(t), std::cos(0.3 * t)}));
  const auto seq = LossSequence::adversarial_linear(gs);
  const Ledger l = run(lc, seq, P({0.5, -0.5}));
  BoundInputs in;
  const BoundReport ao = bound_ao(l, in);
  const BoundReport oo = bound_case(l, in, BoundCase::OoFtrl, true);
  REQUIRE(ao.terms.size() == oo.terms.size());
  for (std::size_t i = 0; i < ao.terms.size(); ++i) CHECK(ao.terms[i].second == doctest::Approx(oo.terms[i].second).epsilon(1e-12));
}

TEST_CASE("perfect hints have zero hint error") {
  LearnerConfig lc;
  lc.preset = Preset::AoFtrlProx;
  lc.set = FeasibleSet::box(2, -1.0, 1.0);
  std::vector<Point> gs;
  for (int t = 0; t < 20; ++t) gs.push_back(P({std::sin(t), 1.0}));
  lc.hints = HintPolicy::Custom;
  lc.hint_stream = [gs](int t) { return t <= static_cast<int>(gs.size()) ? gs[t - 1] : Point(Point::Zero(2)); };
  lc.gamma = 1.0;
  const Ledger l = run(lc, LossSequence::adversarial_linear(gs), P({0, 0}));
  double s = 0.0;
  for (const auto& r : l.rounds) s += (r.g - r.hint).squaredNorm();
  CHECK(s == 0.0);
}

TEST_CASE("final-attack bound constants") {
  Ledger l;
  l.algorithm = Algorithm::Ftrl;
  BoundInputs in;
  in.R = 2.0;
  in.L = 0.5;
  in.D_variation = 3.0;
  CHECK(bound_final_attack(l, in).value == doctest::Approx(6.0 + 4.0 * std::sqrt(6.0)));
  in.L = 0.0;
  CHECK(bound_final_attack(l, in).value == doctest::Approx(2.0 + 4.0 * std::sqrt(6.0)));
  in.L = 0.5;
  in.D_variation = 0.0;
  CHECK(bound_final_attack(l, in).value == doctest::Approx(6.0));
  in.R = kInf;
  CHECK_THROWS_AS(bound_final_attack(l, in), BoundError);
}

TEST_CASE("tau scaling") {
  BoundReport r;
  r.value = 3.0;
  CHECK(scale_tau(r, 1.0).value == 3.0);
  CHECK(scale_tau(r, 0.5).value == 6.0);
  CHECK_THROWS(scale_tau(r, 0.0));
  CHECK_THROWS(scale_tau(r, 1.5));
}

TEST_CASE("sqrt-abs sgd stays under the scaled linearized bound") {
  LearnerConfig lc;
  lc.preset = Preset::Ogd;
  lc.eta = 0.05;
  lc.set = FeasibleSet::box(1, -2.0, 2.0);
  const auto seq = LossSequence::fixed(losses::sqrt_abs(P({0.37})), 200);
  const Ledger l = run(lc, seq, P({0.37}));
  const BoundReport b = scale_tau(linearized_bound(l), 0.5);
  CHECK(b.empirical <= b.value + 1e-9 * (1.0 + std::abs(b.value)));
}

TEST_CASE("sum of square roots") {
  auto [l, r] = sum_sqrt_check({1, 1, 1, 1});
  CHECK(l == doctest::Approx(1.0 + 1 / std::sqrt(2.0) + 1 / std::sqrt(3.0) + 0.5));
  CHECK(l == doctest::Approx(2.7845).epsilon(1e-4));
  CHECK(r == doctest::Approx(4.0));
  std::tie(l, r) = sum_sqrt_check({1});
  CHECK(l == doctest::Approx(1.0));
  CHECK(r == doctest::Approx(2.0));
  const auto [lc, rc] = sum_sqrt_check({9});
  CHECK(lc == doctest::Approx(3.0));
  CHECK(rc == doctest::Approx(6.0));
  CHECK_THROWS(sum_sqrt_check({0, 1}));
}

TEST_CASE("seed aggregation") {
  const SeedAggregate a = aggregate({1.0, 2.0, 3.0, 4.0});
  CHECK(a.mean == doctest::Approx(2.5));
  CHECK(a.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(aggregate({7.0}).se == 0.0);
}

TEST_CASE("csv layout") {
  LearnerConfig lc;
  lc.set = FeasibleSet::ball(2, 1.0);
  const auto seq = LossSequence::adversarial_linear({P({1, 0}), P({0, 1}), P({-1, 0})});
  const Ledger l = run(lc, seq, P({0, 0}));
  std::ostringstream os;
  write_csv(os, l);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header.rfind("t,x_0,x_1,g_0,g_1,loss,loss_star", 0) == 0);
  CHECK(header.find("cum_regret,cum_bound,slack") != std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == 3);
}
