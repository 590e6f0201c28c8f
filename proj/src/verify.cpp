#include "adaopt/verify.hpp"

#include <cmath>

namespace adaopt {

using nlohmann::json;

void PropertyResult::record(bool pass, double margin) {
  ++total;
  if (pass) ++passed;
  if (total == 1 || margin > worst) worst = margin;
}

bool SuiteResult::ok() const {
  for (const auto& p : properties)
    if (!p.ok()) return false;
  return true;
}

json SuiteResult::to_json() const {
  json j;
  j["suite"] = suite;
  j["ok"] = ok();
  json ps = json::array();
  for (const auto& p : properties) {
    ps.push_back({{"name", p.name}, {"passed", p.passed}, {"total", p.total}, {"worst", p.worst}, {"detail", p.detail}});
  }
  j["properties"] = ps;
  return j;
}

std::vector<std::string> suite_names() { return {"bregman", "solvers", "decomposition", "bounds", "nonconvex", "lemmas"}; }

namespace {

PropertyResult prop(const std::string& name) {
  PropertyResult p;
  p.name = name;
  return p;
}

double unif(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uint_in(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

Point gauss(Rng& rng, Index d, double s = 1.0) {
  std::normal_distribution<double> n(0.0, s);
  Point v(d);
  for (Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

Point unit(Rng& rng, Index d) {
  Point v = gauss(rng, d);
  const double n = v.norm();
  return n > 0.0 ? Point(v / n) : Point(Point::Unit(d, 0));
}

Metric random_metric(Rng& rng, Index d) {
  switch (uint_in(rng, 0, 2)) {
    case 0: return Metric::scaled_identity(d, unif(rng, 0.1, 3.0));
    case 1: {
      Point w(d);
      for (Index i = 0; i < d; ++i) w[i] = unif(rng, 0.1, 3.0);
      return Metric::diagonal(w);
    }
    default: {
      Matrix a(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) a(i, j) = unif(rng, -1.0, 1.0);
      return Metric::full(a * a.transpose() + 0.1 * Matrix::Identity(d, d));
    }
  }
}

/// Convex functions with closed-form directional derivatives.
FunctionHandle random_convex(Rng& rng, Index d) {
  switch (uint_in(rng, 0, 5)) {
    case 0: return Regularizer::quadratic(gauss(rng, d), random_metric(rng, d), unif(rng, 0.1, 2.0)).handle();
    case 1: return Regularizer::l1(d, unif(rng, 0.1, 2.0)).handle();
    case 2: return Regularizer::linear(gauss(rng, d), unif(rng, -1.0, 1.0)).handle();
    case 3: return losses::huber(gauss(rng, d), unif(rng, 0.2, 2.0)).handle();
    case 4: return losses::abs_l1(gauss(rng, d), unif(rng, 0.1, 2.0)).handle();
    default:
      return (Regularizer::quadratic(gauss(rng, d), random_metric(rng, d)) + Regularizer::l1(d, unif(rng, 0.0, 1.0)))
          .handle();
  }
}

/// Points that often share coordinates with the kinks of |.| terms.
Point random_point(Rng& rng, Index d) {
  Point x = gauss(rng, d, 2.0);
  for (Index i = 0; i < d; ++i)
    if (uint_in(rng, 0, 9) == 0) x[i] = 0.0;
  return x;
}

double tol_or(double override_tol, double def) { return std::isnan(override_tol) ? def : override_tol; }

SuiteResult suite_bregman(double tol, Rng& rng) {
  constexpr int N = 10000;
  const double t = tol_or(tol, 1e-9);
  PropertyResult nonneg = prop("convex-nonnegativity");
  PropertyResult affine = prop("affine-invariance");
  PropertyResult additive = prop("additive-decomposition");
  for (int i = 0; i < N; ++i) {
    const Index d = uint_in(rng, 1, 5);
    const FunctionHandle f = random_convex(rng, d);
    const FunctionHandle g = random_convex(rng, d);
    const Point x = random_point(rng, d);
    const Point y = random_point(rng, d);
    const double bf = bregman(f, y, x).value();
    const double scale = 1.0 + std::abs(f.value(x)) + std::abs(f.value(y));
    nonneg.record(bf >= -t * scale, -bf / scale);

    const Point a = gauss(rng, d);
    const double c = unif(rng, -5.0, 5.0);
    FunctionHandle h([f, a, c](const Point& p) { return f.value(p) + a.dot(p) + c; },
                     [f, a](const Point& p, const Point& z) { return f.dir_derivative(p, z) + ExtReal(a.dot(z)); });
    const double bh = bregman(h, y, x).value();
    const double ea = std::abs(bh - bf) / (scale + std::abs(a.dot(x)) + std::abs(a.dot(y)) + std::abs(c));
    affine.record(ea <= t, ea);

    FunctionHandle s([f, g](const Point& p) { return f.value(p) + g.value(p); },
                     [f, g](const Point& p, const Point& z) { return f.dir_derivative(p, z) + g.dir_derivative(p, z); });
    const double bs = bregman(s, y, x).value();
    const double bg = bregman(g, y, x).value();
    const double ed = std::abs(bs - bf - bg) / (scale + std::abs(g.value(x)) + std::abs(g.value(y)));
    additive.record(ed <= t, ed);
  }
  return {"bregman", {nonneg, affine, additive}};
}

FeasibleSet random_set(Rng& rng, Index d, bool allow_simplex) {
  const int k = uint_in(rng, 0, allow_simplex ? 3 : 2);
  switch (k) {
    case 0: return FeasibleSet::unconstrained(d);
    case 1: {
      Point lo(d), hi(d);
      for (Index i = 0; i < d; ++i) {
        lo[i] = unif(rng, -2.0, 0.0);
        hi[i] = unif(rng, 0.1, 2.0);
      }
      return FeasibleSet::box(lo, hi);
    }
    case 2: return FeasibleSet::ball(d, unif(rng, 0.5, 3.0));
    default: return FeasibleSet::simplex(d, unif(rng, 0.5, 2.0));
  }
}

SuiteResult suite_solvers(double tol, Rng& rng) {
  const double t = tol_or(tol, 1e-6);
  PropertyResult closed = prop("numeric-vs-closed-form");
  int attempts = 0;
  while (closed.total < 500 && attempts < 5000) {
    ++attempts;
    const Index d = uint_in(rng, 1, 6);
    const FeasibleSet set = random_set(rng, d, true);
    Metric m = random_metric(rng, d);
    Regularizer reg = Regularizer::quadratic(gauss(rng, d), m);
    if (uint_in(rng, 0, 2) == 0) reg = reg + Regularizer::l1(d, unif(rng, 0.0, 1.5));
    const Objective obj{gauss(rng, d, 2.0), reg, std::nullopt, {}, set};
    if (!has_exact_path(obj)) continue;
    const Point xe = argmin(obj);
    const Point xn = argmin_numeric(obj, SolverOptions{1e-11, 200000});
    const double err = (xe - xn).norm();
    closed.record(err <= t, err);
  }
  closed.detail = std::to_string(closed.total) + " exact-path instances";

  PropertyResult grid = prop("simplex-projection-vs-grid");
  constexpr double h = 0.005;
  for (int i = 0; i < 200; ++i) {
    const double s = unif(rng, 0.5, 2.0);
    const Point y = gauss(rng, 3);
    const Point p = project_simplex(y, s);
    const int n = static_cast<int>(std::floor(s / h));
    double best = kInf;
    Point bp;
    for (int a = 0; a <= n; ++a) {
      for (int b = 0; a + b <= n; ++b) {
        const Point q = Point{{a * h, b * h, s - (a + b) * h}};
        const double v = (q - y).squaredNorm();
        if (v < best) {
          best = v;
          bp = q;
        }
      }
    }
    const double dp = (p - y).norm();
    const double delta = h * std::sqrt(3.0);
    const double allowed = std::sqrt(2.0 * dp * delta + delta * delta) + 1e-12;
    const bool ok = (p - y).squaredNorm() <= best + 1e-12 && (p - bp).norm() <= allowed &&
                    std::abs(p.sum() - s) <= 1e-12 * (1.0 + s) && p.minCoeff() >= 0.0;
    grid.record(ok, (p - bp).norm() - allowed);
  }
  return {"solvers", {closed, grid}};
}

}  // namespace

RandomRun random_run(int index, Rng& rng) {
  RandomRun r;
  const int v = ((index % kRandomVariants) + kRandomVariants) % kRandomVariants;
  const Index d = uint_in(rng, 1, 4);
  r.T = uint_in(rng, 5, 30);
  const double eta = unif(rng, 0.1, 2.0);
  LearnerConfig& c = r.lc;
  c.eta = eta;
  auto box = [&](double w) { return FeasibleSet::box(Point::Constant(d, -w), Point::Constant(d, w)); };
  auto linear_seq = [&](double G) {
    std::vector<Point> gs;
    for (int t = 0; t < r.T; ++t) gs.push_back(G * unit(rng, d));
    return LossSequence::adversarial_linear(gs);
  };
  const Point a = gauss(rng, d);
  switch (v) {
    case 0:
      r.label = "ogd/ball/linear";
      c.preset = Preset::Ogd;
      c.set = FeasibleSet::ball(d, 1.5);
      r.seq = linear_seq(1.0);
      break;
    case 1:
      r.label = "da/box/abs";
      c.preset = Preset::Da;
      c.set = box(2.0);
      r.seq = LossSequence::fixed(losses::abs_l1(a), r.T);
      break;
    case 2:
      r.label = "adagrad-da/unconstrained/quadratic";
      c.preset = Preset::AdagradDa;
      c.gamma = unif(rng, 0.1, 1.0);
      c.set = FeasibleSet::unconstrained(d);
      r.seq = LossSequence::fixed(losses::quadratic(a, unif(rng, 0.5, 2.0)), r.T);
      break;
    case 3:
      r.label = "ftrl-prox/box/huber";
      c.preset = Preset::FtrlProx;
      c.set = box(2.0);
      r.seq = LossSequence::fixed(losses::huber(a, 0.5), r.T);
      break;
    case 4:
      r.label = "ao-ftrl-prox/ball/linear/scale-free";
      c.preset = Preset::AoFtrlProx;
      c.schedule = ScheduleKind::ScaleFree;
      c.set = FeasibleSet::ball(d, 2.0);
      r.seq = linear_seq(2.0);
      break;
    case 5:
      r.label = "md/simplex/linear";
      c.preset = Preset::Md;
      c.set = FeasibleSet::simplex(d, 1.0);
      r.seq = linear_seq(1.0);
      break;
    case 6:
      r.label = "ao-md/box/quadratic-stochastic";
      c.preset = Preset::AoMd;
      c.schedule = ScheduleKind::InvSqrt;
      c.set = box(2.0);
      r.seq = LossSequence::stochastic(losses::quadratic(a, 1.0), r.T, 0.5);
      break;
    case 7:
      r.label = "implicit-md/unconstrained/huber";
      c.preset = Preset::ImplicitMd;
      c.set = FeasibleSet::unconstrained(d);
      r.seq = LossSequence::fixed(losses::huber(a, 1.0), r.T);
      break;
    case 8: {
      r.label = "nonlin-ftrl/unconstrained/drifting-quadratic";
      c.preset = Preset::NonlinFtrl;
      c.set = FeasibleSet::unconstrained(d);
      std::vector<Point> cs;
      for (int t = 0; t < r.T; ++t) cs.push_back(a + 0.3 * gauss(rng, d));
      r.seq = LossSequence::drifting_quadratic(cs, unif(rng, 0.5, 2.0));
      break;
    }
    case 9:
      r.label = "composite-ftrl-prox/box/quadratic";
      c.preset = Preset::FtrlProx;
      c.set = box(2.0);
      c.composite_alpha = unif(rng, 0.05, 0.5);
      c.composite_setting = CompositeSetting::RevealedAfter;
      r.seq = LossSequence::fixed(losses::quadratic(a, 1.0), r.T);
      break;
    case 10:
      r.label = "composite-md/box/abs/known-before";
      c.preset = Preset::Md;
      c.set = box(2.0);
      c.composite_alpha = unif(rng, 0.05, 0.5);
      c.composite_setting = CompositeSetting::KnownBefore;
      r.seq = LossSequence::fixed(losses::abs_l1(a), r.T);
      break;
    case 11:
      r.label = "md/box/star-piecewise";
      c.preset = Preset::Md;
      c.schedule = ScheduleKind::InvSqrt;
      c.set = box(3.0);
      r.seq = LossSequence::fixed(losses::star_piecewise(a), r.T);
      break;
    case 12:
      r.label = "ogd/box/sqrt-abs";
      c.preset = Preset::Ogd;
      c.set = box(3.0);
      r.seq = LossSequence::fixed(losses::sqrt_abs(Point(a + Point::Constant(d, 0.123))), r.T);
      break;
    case 13:
      r.label = "ftrl-prox/ball/huber/adagrad-full";
      c.preset = Preset::FtrlProx;
      c.schedule = ScheduleKind::AdagradFull;
      c.gamma = 0.1;
      c.set = FeasibleSet::ball(d, 2.0);
      r.seq = LossSequence::fixed(losses::huber(a, 0.5), r.T);
      break;
    case 14: {
      r.label = "ao-ftrl-prox/box/linear/final-attack";
      c.preset = Preset::AoFtrlProx;
      c.schedule = ScheduleKind::FinalAttack;
      c.L = 0.5;
      c.set = box(1.0);
      c.composite_alpha = uint_in(rng, 0, 1) ? 0.1 : 0.0;
      const Point g1 = unit(rng, d), g2 = unit(rng, d);
      std::vector<Point> gs;
      for (int t = 0; t < r.T; ++t) gs.push_back(t < r.T / 2 ? g1 : g2);
      r.seq = LossSequence::adversarial_linear(gs);
      break;
    }
    default:
      r.label = "md/unconstrained/quadratic-stochastic/smooth";
      c.preset = Preset::Md;
      c.schedule = ScheduleKind::InvSqrt;
      c.smooth_L = 1.0;
      c.set = FeasibleSet::unconstrained(d);
      r.seq = LossSequence::stochastic(losses::quadratic(a, 1.0), r.T, 0.3);
      break;
  }
  r.x_star = c.set.bounded() ? c.set.sample(rng) : Point(gauss(rng, d));
  return r;
}

RunCheck execute(const RandomRun& run, Rng& noise) {
  RunCheck rc;
  rc.label = run.label;
  const Trace tr = simulate(run.lc, run.seq, run.T, noise);
  rc.solver_calls = tr.solver_calls;
  rc.ledger = build_ledger(tr, run.seq, run.x_star);
  rc.regret = empirical_regret(rc.ledger, false);
  rc.residual = decomposition_residual(rc.ledger);
  const BoundReport f = bound_forward(rc.ledger);
  rc.forward_slack = f.slack;
  return rc;
}

namespace {

SuiteResult suite_decomposition(double tol, Rng& rng) {
  const double t_res = tol_or(tol, 1e-8);
  const double t_fwd = tol_or(tol, 1e-8);
  PropertyResult res = prop("identity-residual");
  PropertyResult fwd = prop("forward-bound-slack");
  for (int i = 0; i < 200; ++i) {
    const RandomRun run = random_run(i, rng);
    Rng noise(static_cast<std::uint64_t>(i) + 77);
    const RunCheck rc = execute(run, noise);
    const double lim = t_res * (1.0 + std::abs(rc.regret));
    res.record(rc.residual <= lim, rc.residual / (1.0 + std::abs(rc.regret)));
    fwd.record(rc.forward_slack >= -t_fwd, -rc.forward_slack);
    if (rc.residual > lim && res.detail.empty()) res.detail = "first failure: " + rc.label;
    if (rc.forward_slack < -t_fwd && fwd.detail.empty()) fwd.detail = "first failure: " + rc.label;
  }
  return {"decomposition", {res, fwd}};
}

bool term_equal(const BoundReport& a, const BoundReport& b, double tol, double& worst) {
  if (a.terms.size() != b.terms.size()) return false;
  bool ok = true;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    const double e = std::abs(a.terms[i].second - b.terms[i].second);
    worst = std::max(worst, e);
    ok = ok && e <= tol;
  }
  return ok && std::abs(a.value - b.value) <= tol;
}

SuiteResult suite_bounds(double tol, Rng& rng) {
  PropertyResult zero_hint = prop("ao-zero-hints-equals-oo");
  PropertyResult dominance = prop("oo-case-dominance");
  PropertyResult off_by_one = prop("q_T=0-variant-valid");
  const double t_eq = tol_or(tol, 1e-12);
  for (int i = 0; i < 200; ++i) {
    const int pick = i % 5;
    const int variant = pick == 0 ? 0 : pick == 1 ? 1 : pick == 2 ? 2 : pick == 3 ? 3 : 5;
    RandomRun run = random_run(variant, rng);
    Rng noise(static_cast<std::uint64_t>(i) + 5);
    const RunCheck rc = execute(run, noise);
    BoundInputs in;
    in.x_star = run.x_star;
    const bool md = rc.ledger.algorithm == Algorithm::Md;
    const BoundCase c = md ? BoundCase::OoMd : BoundCase::OoFtrl;
    const BoundReport b = bound_case(rc.ledger, in, c, false);
    const BoundReport b0 = bound_case(rc.ledger, in, c, true);
    const double emp = empirical_regret(rc.ledger, false);
    dominance.record(emp <= b.value + 1e-6 * std::abs(b.value) + 1e-12, emp - b.value);
    off_by_one.record(emp <= b0.value + 1e-6 * std::abs(b0.value) + 1e-12, emp - b0.value);
    BoundReport ao = bound_ao(rc.ledger, in);
    double worst = 0.0;
    // same term layout: q, p or breg_p, dual
    BoundReport ref = b0;
    zero_hint.record(term_equal(ao, ref, t_eq * (1.0 + std::abs(ref.value)), worst), worst);
  }
  return {"bounds", {zero_hint, dominance, off_by_one}};
}

SuiteResult suite_nonconvex(double tol, Rng& rng) {
  PropertyResult star = prop("star-convex-nonnegative-bregman");
  PropertyResult tau = prop("sqrt-abs-tau-half");
  PropertyResult pl = prop("star-strong-implies-pl");
  PropertyResult scaled = prop("tau-scaled-linearized-bound");
  const double t = tol_or(tol, 1e-9);
  for (int i = 0; i < 1000; ++i) {
    const Index d = uint_in(rng, 1, 4);
    const Point a = gauss(rng, d);
    const FeasibleSet set = FeasibleSet::box(Point::Constant(d, -4.0), Point::Constant(d, 4.0));
    auto probes = make_probes(set, 8, rng);
    const Loss f = losses::star_piecewise(a);
    bool ok = true;
    double worst = -kInf;
    for (const Point& p : probes) {
      const double b = bregman(f, a, p).value();
      worst = std::max(worst, -b);
      ok = ok && b >= -t * (1.0 + std::abs(f.value(p)));
    }
    star.record(ok, worst);

    const Loss s = losses::sqrt_abs(a);
    const double tv = estimate_tau(s, a, probes);
    tau.record(tv >= 0.5 - t, 0.5 - tv);

    const Loss q = i % 2 ? losses::pl_sine(a) : losses::quadratic(a, unif(rng, 0.5, 2.0));
    const double ts = verify_tau_star_strong(q, Regularizer::half_sq_norm(d, 1.0), a, probes);
    pl.record(ts > 0.0 && check_pl(q, ts, probes), ts > 0.0 ? 0.0 : 1.0);
  }
  for (int i = 0; i < 200; ++i) {
    RandomRun run = random_run(12, rng);
    Rng noise(static_cast<std::uint64_t>(i));
    run.x_star = *run.seq.loss(1).meta().star_center;
    const RunCheck rc = execute(run, noise);
    const BoundReport b = scale_tau(linearized_bound(rc.ledger), 0.5);
    scaled.record(b.empirical <= b.value + t * (1.0 + std::abs(b.value)), b.empirical - b.value);
  }
  return {"nonconvex", {star, tau, pl, scaled}};
}

SuiteResult suite_lemmas(double tol, Rng& rng) {
  PropertyResult ss = prop("sum-sqrt");
  PropertyResult hom = prop("sum-sqrt-homogeneity");
  const double t = tol_or(tol, 1e-9);
  for (int i = 0; i < 10000; ++i) {
    const int n = uint_in(rng, 1, 50);
    std::vector<double> a;
    a.push_back(unif(rng, 1e-3, 5.0));
    for (int k = 1; k < n; ++k) a.push_back(uint_in(rng, 0, 4) == 0 ? 0.0 : std::exp(unif(rng, -6.0, 3.0)));
    const auto [l, r] = sum_sqrt_check(a);
    ss.record(l <= r * (1.0 + t), l - r);
    const double c = std::exp(unif(rng, -4.0, 4.0));
    std::vector<double> ac = a;
    for (double& v : ac) v *= c;
    const auto [lc, rc] = sum_sqrt_check(ac);
    const double e = std::max(std::abs(lc - std::sqrt(c) * l) / (1.0 + std::abs(lc)),
                              std::abs(rc - std::sqrt(c) * r) / (1.0 + std::abs(rc)));
    hom.record(e <= t, e);
  }
  return {"lemmas", {ss, hom}};
}

}  // namespace

SuiteResult verify_suite(const std::string& name, double tol, std::uint64_t seed) {
  Rng rng(seed);
  if (name == "bregman") return suite_bregman(tol, rng);
  if (name == "solvers") return suite_solvers(tol, rng);
  if (name == "decomposition") return suite_decomposition(tol, rng);
  if (name == "bounds") return suite_bounds(tol, rng);
  if (name == "nonconvex") return suite_nonconvex(tol, rng);
  if (name == "lemmas") return suite_lemmas(tol, rng);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace adaopt
