#include "adaopt/losses.hpp"

#include <doctest.h>

using namespace adaopt;

namespace {
Point P(std::initializer_list<double> v) {
  Point p(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}
std::vector<Point> grid_1d(double lo, double hi, int n) {
  std::vector<Point> out;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    if (std::abs(x) > 1e-12) out.push_back(P({x}));
  }
  return out;
}
}  // namespace

TEST_CASE("stochastic oracle") {
  const Loss f = losses::quadratic(P({1, 2}), 1.0);
  const auto exact = LossSequence::fixed(f, 5);
  Rng rng(1);
  const Feedback fb = stochastic_gradient(exact, 1, P({0, 0}), rng);
  CHECK((fb.g - f.gradient(P({0, 0}))).norm() == 0.0);

  const auto noisy = LossSequence::stochastic(f, 5, 0.5);
  Rng a(42), b(42);
  for (int t = 1; t <= 5; ++t) {
    const Feedback x = stochastic_gradient(noisy, t, P({0.1, 0.2}), a);
    const Feedback y = stochastic_gradient(noisy, t, P({0.1, 0.2}), b);
    CHECK((x.g - y.g).norm() == 0.0);
    CHECK((x.g - f.gradient(P({0.1, 0.2})) - x.sigma).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("noise is zero mean") {
  const Loss f = losses::linear(P({1, -1}));
  for (NoiseModel m : {NoiseModel::Gaussian, NoiseModel::Uniform}) {
    const auto seq = LossSequence::stochastic(f, 1, 1.0, m);
    Rng rng(5);
    Point s = Point::Zero(2);
    const int n = 20000;
    for (int i = 0; i < n; ++i) s += stochastic_gradient(seq, 1, P({0, 0}), rng).sigma;
    CHECK((s / n).norm() < 0.03);
  }
}

TEST_CASE("variation of linear streams") {
  Rng rng(0);
  const auto set = FeasibleSet::box(2, -1.0, 1.0);
  const Point g = P({1, 2});
  const auto constant = LossSequence::adversarial_linear(std::vector<Point>(6, g));
  auto v = variation_estimate(constant, set, 8, rng);
  CHECK(v.exact);
  CHECK(v.total == doctest::Approx(5.0));

  std::vector<Point> alt;
  for (int t = 0; t < 5; ++t) alt.push_back(t % 2 ? Point(-g) : g);
  v = variation_estimate(LossSequence::adversarial_linear(alt), set, 8, rng);
  CHECK(v.total == doctest::Approx(5.0 + 4 * 20.0));

  const auto same = LossSequence::fixed(losses::quadratic(P({0.5, 0.5}), 1.0), 10);
  v = variation_estimate(same, set, 32, rng);
  CHECK(v.per_round.size() == 10);
  for (std::size_t t = 1; t < v.per_round.size(); ++t) CHECK(v.per_round[t] == 0.0);
}

TEST_CASE("star-convexity") {
  const auto probes = grid_1d(-3.0, 3.0, 120);
  CHECK(verify_star_convex(losses::star_piecewise(P({0})), P({0}), probes));
  CHECK_FALSE(verify_star_convex(losses::sqrt_abs(P({0})), P({0}), probes));

  Rng rng(3);
  const auto p2 = make_probes(FeasibleSet::box(2, -2.0, 2.0), 200, rng);
  CHECK(verify_star_convex(losses::product_power(P({0.5, 0.75})), P({0, 0}), p2));
}

TEST_CASE("tau estimates") {
  const auto probes = grid_1d(-3.0, 3.0, 60);
  CHECK(estimate_tau(losses::quadratic(P({0}), 1.0), P({0}), probes) == doctest::Approx(2.0));
  CHECK(estimate_tau(losses::star_piecewise(P({0})), P({0}), probes) >= 1.0);
  CHECK(estimate_tau(losses::sqrt_abs(P({0})), P({0}), probes) == doctest::Approx(0.5));

  CHECK(verify_tau_star_strong(losses::quadratic(P({0}), 1.0), Regularizer::half_sq_norm(1, 1.0), P({0}), probes) ==
        doctest::Approx(1.0));
  CHECK(verify_tau_star_strong(losses::sqrt_abs(P({0})), Regularizer::zero(), P({0}), probes) ==
        doctest::Approx(estimate_tau(losses::sqrt_abs(P({0})), P({0}), probes)));
}

TEST_CASE("pl inequality") {
  const auto probes = grid_1d(-3.0, 3.0, 60);
  const Loss f = losses::quadratic(P({0}), 1.0);
  CHECK(check_pl(f, 1.0, probes));
  CHECK_FALSE(check_pl(f, 1.5, probes));

  Rng rng(8);
  const auto p2 = make_probes(FeasibleSet::box(2, -3.0, 3.0), 200, rng);
  const Loss s = losses::pl_sine(P({0.2, -0.1}));
  const double tau = verify_tau_star_strong(s, Regularizer::half_sq_norm(2, 1.0), P({0.2, -0.1}), p2);
  CHECK(tau > 0.0);
  CHECK(check_pl(s, tau, p2));
}

TEST_CASE("smoothness and strong convexity certificates") {
  Rng rng(4);
  const auto probes = make_probes(FeasibleSet::box(3, -2.0, 2.0), 32, rng);
  CHECK(certify_smooth(losses::quadratic(P({0, 0, 0}), 2.0), 2.0, probes));
  CHECK_FALSE(certify_smooth(losses::quadratic(P({0, 0, 0}), 2.0), 1.0, probes));
  CHECK(certify_smooth(losses::huber(P({0, 0, 0}), 0.5), 2.0, probes));
  CHECK(certify_strong_convexity(losses::quadratic(P({0, 0, 0}), 2.0), Regularizer::half_sq_norm(3, 2.0), probes));
  CHECK_FALSE(certify_strong_convexity(losses::huber(P({0, 0, 0}), 0.5), Regularizer::half_sq_norm(3, 1.0), probes));
}

TEST_CASE("loss bregman handle") {
  const Loss l = losses::quadratic(P({1, 1}), 2.0);
  const FunctionHandle h = loss_bregman_handle(l, P({0, 0}));
  CHECK(h.value(P({0, 0})) == doctest::Approx(0.0));
  CHECK(h.value(P({1, 0})) == doctest::Approx(1.0));
}
