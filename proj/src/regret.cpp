#include "adaopt/regret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace adaopt {

namespace {

double fin(const ExtReal& e) { return e.is_inf() ? kInf : e.value(); }

enum class QMode { Full, Base, Tilde };

double q_terms(const Ledger& l, QMode mode, bool drop_final) {
  double s = 0.0;
  switch (mode) {
    case QMode::Full: s += (l.q0_star + l.extra_star) - (l.q0_x1 + l.extra_x1); break;
    case QMode::Base: s += l.q0_star - l.q0_x1; break;
    case QMode::Tilde: s += l.q0t_star - l.q0t_x1; break;
  }
  const int last = drop_final ? l.T() - 1 : l.T();
  for (int i = 0; i < last; ++i) {
    const RoundRecord& r = l.rounds[static_cast<std::size_t>(i)];
    s += mode == QMode::Tilde ? r.qt_star - r.qt_next : r.q_star - r.q_next;
  }
  return s;
}

template <typename F>
double sum(const Ledger& l, F f) {
  double s = 0.0;
  for (const RoundRecord& r : l.rounds) s += f(r);
  return s;
}

double composite_or_plain(const Ledger& l) { return empirical_regret(l, l.composite); }

void finish(BoundReport& rep) { rep.slack = rep.value - rep.empirical; }

double tol_of(double a, double b) { return 1e-10 * (1.0 + std::abs(a) + std::abs(b)); }

}  // namespace

Ledger build_ledger(const Trace& tr, const LossSequence& seq, const Point& xs) {
  Ledger L;
  L.algorithm = tr.algorithm;
  L.preset = tr.preset;
  L.x_star = xs;
  L.x1 = tr.x1;
  require_same_dim(tr.x1.size(), xs.size(), "build_ledger: x*");
  L.q0_star = tr.q0.value(xs);
  L.q0_x1 = tr.q0.value(tr.x1);
  L.q0t_star = tr.q0_tilde.value(xs);
  L.q0t_x1 = tr.q0_tilde.value(tr.x1);
  if (tr.algorithm == Algorithm::Ftrl) {
    L.extra_star = tr.extra.value(xs);
    L.extra_x1 = tr.extra.value(tr.x1);
  }
  L.smooth_L = tr.smooth_L;
  L.extra_center = tr.extra_center;
  L.composite = tr.composite;
  const bool lin = tr.implicit;
  if (!lin && seq.rounds() < static_cast<int>(tr.rounds.size())) {
    throw BoundError("build_ledger: loss sequence is shorter than the trace");
  }
  const Index d = xs.size();
  L.rounds.reserve(tr.rounds.size());
  for (const RoundTrace& rt : tr.rounds) {
    RoundRecord r;
    r.t = rt.t;
    r.x = rt.x;
    r.x_next = rt.x_next;
    r.g = rt.g;
    r.hint = rt.hint;
    if (lin) {
      r.loss = rt.g.dot(rt.x);
      r.loss_star = rt.g.dot(xs);
      r.sigma = Point::Zero(d);
    } else {
      const Loss& f = seq.loss(rt.t);
      r.loss = f.value(rt.x);
      r.loss_star = f.value(xs);
      r.breg_loss = bregman(f, xs, rt.x).finite("build_ledger: B_f(x*, x_t)");
      r.delta = delta_term(f, rt.x, xs, rt.g);
      r.sigma = f.meta().differentiable ? Point(rt.g - f.gradient(rt.x)) : Point::Zero(d);
    }
    r.psi = rt.psi.value(rt.x);
    r.psi_star = rt.psi.value(xs);
    r.lin_fwd = rt.g.dot(rt.x_next - xs);
    r.drift = rt.g.dot(rt.x - rt.x_next);
    r.breg_reg = rt.breg_reg;
    r.q_star = rt.q.value(xs);
    r.q_next = rt.q.value(rt.x_next);
    r.qt_star = rt.q_tilde.value(xs);
    r.qt_next = rt.q_tilde.value(rt.x_next);
    r.p_star = rt.p.value(xs);
    r.p_cur = rt.p.value(rt.x);
    if (tr.algorithm == Algorithm::Ftrl) {
      r.breg_p = fin(bregman(rt.p, xs, rt.x));
      r.breg_p_base = r.breg_p;
    } else {
      // B_{p_t} = B_{r_t} - B_{q_{t-1}}
      const double bq = fin(bregman(rt.q_prev, xs, rt.x));
      r.breg_p_base = fin(bregman(rt.r, xs, rt.x)) - bq;
      r.breg_p = rt.t == 1 ? fin(bregman(rt.r + tr.extra, xs, rt.x)) - bq : r.breg_p_base;
    }
    r.dual_g = dual_norm_sq_or_inf(rt.cert, rt.g);
    r.dual_sigma = dual_norm_sq_or_inf(rt.cert_base, r.sigma);
    r.dual_hint = dual_norm_sq_or_inf(rt.cert, Point(rt.g - rt.hint));
    r.eta = rt.eta;
    r.certified = rt.certified;
    L.certified = L.certified && rt.certified;
    L.rounds.push_back(std::move(r));
  }
  return L;
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["value"] = r.value;
  j["empirical"] = r.empirical;
  j["slack"] = r.slack;
  nlohmann::json terms = nlohmann::json::object();
  for (const auto& [k, v] : r.terms) terms[k] = v;
  j["terms"] = terms;
  j["flags"] = r.flags;
  j["estimate_quality"] = r.estimate_quality;
  j["certified"] = r.certified;
  return j;
}

double empirical_regret(const Ledger& l, bool composite) {
  double s = sum(l, [](const RoundRecord& r) { return r.loss - r.loss_star; });
  if (composite) s += sum(l, [](const RoundRecord& r) { return r.psi - r.psi_star; });
  return s;
}

double forward_regret(const Ledger& l) {
  return sum(l, [](const RoundRecord& r) { return r.lin_fwd; });
}

double decomposition_residual(const Ledger& l) {
  const double lhs = empirical_regret(l, false);
  const double rhs = sum(l, [](const RoundRecord& r) { return r.lin_fwd + r.drift - r.breg_loss + r.delta; });
  return std::abs(lhs - rhs);
}

BoundReport bound_forward_ftrl(const Ledger& l) {
  if (l.algorithm != Algorithm::Ftrl) throw BoundError("bound_forward_ftrl: ledger is not an FTRL run");
  BoundReport rep;
  rep.name = "forward-ftrl";
  const double q = q_terms(l, QMode::Full, false);
  const double p = sum(l, [](const RoundRecord& r) { return r.p_star - r.p_cur; });
  const double b = sum(l, [](const RoundRecord& r) { return r.breg_reg; });
  rep.terms = {{"q", q}, {"p", p}, {"breg_reg", -b}};
  rep.value = q + p - b;
  rep.empirical = forward_regret(l);
  rep.certified = l.certified;
  if (!l.certified) rep.flags.push_back("uncertified-regularizer");
  finish(rep);
  return rep;
}

BoundReport bound_forward_md(const Ledger& l) {
  if (l.algorithm != Algorithm::Md) throw BoundError("bound_forward_md: ledger is not a mirror-descent run");
  BoundReport rep;
  rep.name = "forward-md";
  const double q = q_terms(l, QMode::Full, false);
  const double p = sum(l, [](const RoundRecord& r) { return r.breg_p; });
  const double b = sum(l, [](const RoundRecord& r) { return r.breg_reg; });
  rep.terms = {{"q", q}, {"breg_p", p}, {"breg_reg", -b}};
  rep.value = q + p - b;
  rep.empirical = forward_regret(l);
  rep.certified = l.certified;
  if (!l.certified) rep.flags.push_back("uncertified-regularizer");
  finish(rep);
  return rep;
}

BoundReport bound_forward(const Ledger& l) {
  return l.algorithm == Algorithm::Ftrl ? bound_forward_ftrl(l) : bound_forward_md(l);
}

namespace {

struct CaseName {
  BoundCase c;
  const char* name;
};
constexpr CaseName kCases[] = {{BoundCase::OoFtrl, "oo-ftrl"},
                               {BoundCase::OoMd, "oo-md"},
                               {BoundCase::OoMdStrong, "oo-md-strong"},
                               {BoundCase::SoFtrl, "so-ftrl"},
                               {BoundCase::SoMd, "so-md"},
                               {BoundCase::SoMdStrong, "so-md-strong"},
                               {BoundCase::SmoothSoFtrl, "smooth-so-ftrl"},
                               {BoundCase::SmoothSoMd, "smooth-so-md"},
                               {BoundCase::SmoothSoMdStrong, "smooth-so-md-strong"}};

[[noreturn]] void missing(const std::string& what) { throw BoundError("assumption-certificate missing: " + what); }

}  // namespace

std::string to_string(BoundCase c) {
  for (const auto& e : kCases)
    if (e.c == c) return e.name;
  return "?";
}

BoundCase parse_bound_case(const std::string& s) {
  for (const auto& e : kCases)
    if (s == e.name) return e.c;
  throw std::invalid_argument("unknown bound case '" + s + "'");
}

BoundReport bound_case(const Ledger& l, const BoundInputs& in, BoundCase c, bool drop_final_q) {
  const bool md = c == BoundCase::OoMd || c == BoundCase::OoMdStrong || c == BoundCase::SoMd ||
                  c == BoundCase::SoMdStrong || c == BoundCase::SmoothSoMd || c == BoundCase::SmoothSoMdStrong;
  const bool strong = c == BoundCase::OoMdStrong || c == BoundCase::SoMdStrong || c == BoundCase::SmoothSoMdStrong;
  const bool smooth = c == BoundCase::SmoothSoFtrl || c == BoundCase::SmoothSoMd || c == BoundCase::SmoothSoMdStrong;
  const bool exact_feedback = c == BoundCase::OoFtrl || c == BoundCase::OoMd || c == BoundCase::OoMdStrong;
  const std::string name = to_string(c);

  if (md != (l.algorithm == Algorithm::Md)) {
    throw BoundError("case " + name + " needs " + (md ? "a mirror-descent" : "an FTRL") + " ledger");
  }
  if (!l.certified) missing("strongly convex regularizer r_{1:t} (uncertified metric)");
  if (exact_feedback && in.stochastic) missing("exact local sub-gradient feedback (run is stochastic)");
  for (const RoundRecord& r : l.rounds) {
    if (r.breg_loss < -tol_of(r.loss, r.loss_star)) missing("non-negative B_{f_t}(x*, x_t) (round " + std::to_string(r.t) + ")");
    if (strong) {
      const double bp = smooth ? r.breg_p_base : r.breg_p;
      if (r.breg_loss < bp - tol_of(r.breg_loss, bp)) {
        missing("f_t strongly convex w.r.t. p_t (round " + std::to_string(r.t) + ")");
      }
    }
  }
  if (smooth) {
    if (!in.smooth_certified) missing("smooth losses");
    if (!(l.smooth_L > 0.0) || l.smooth_L + 1e-12 < in.L) missing("regularizer carrying the extra (L/2)||.||^2 term");
  }

  BoundReport rep;
  rep.name = name + (drop_final_q ? " (q_T=0)" : "");
  const QMode qm = l.composite ? QMode::Tilde : (smooth ? QMode::Base : QMode::Full);
  const double q = q_terms(l, qm, drop_final_q);
  rep.terms.emplace_back("q", q);
  double value = q;
  if (!strong) {
    double p;
    if (md) {
      p = sum(l, [smooth](const RoundRecord& r) { return smooth ? r.breg_p_base : r.breg_p; });
      rep.terms.emplace_back("breg_p", p);
    } else {
      p = sum(l, [](const RoundRecord& r) { return r.p_star - r.p_cur; });
      rep.terms.emplace_back("p", p);
    }
    value += p;
  }
  if (smooth) {
    const Point& c0 = md ? l.x1 : l.extra_center;
    const double extra = 0.5 * l.smooth_L * (l.x_star - c0).squaredNorm();
    const double dn = 0.5 * sum(l, [](const RoundRecord& r) { return r.dual_sigma; });
    rep.terms.emplace_back("extra", extra);
    rep.terms.emplace_back("dual_sigma", dn);
    rep.terms.emplace_back("D_init", in.D_init);
    value += extra + dn + in.D_init;
  } else {
    const double dn = 0.5 * sum(l, [](const RoundRecord& r) { return r.dual_g; });
    rep.terms.emplace_back("dual_g", dn);
    value += dn;
  }
  rep.value = value;
  rep.empirical = composite_or_plain(l);
  finish(rep);
  return rep;
}

BoundReport bound_ao(const Ledger& l, const BoundInputs&) {
  if (!l.certified) missing("strongly convex regularizer r_{1:t} (uncertified metric)");
  BoundReport rep;
  rep.name = l.algorithm == Algorithm::Ftrl ? "ao-ftrl" : "ao-md";
  const double q = q_terms(l, QMode::Tilde, true);
  rep.terms.emplace_back("q", q);
  double p;
  if (l.algorithm == Algorithm::Ftrl) {
    p = sum(l, [](const RoundRecord& r) { return r.p_star - r.p_cur; });
    rep.terms.emplace_back("p", p);
  } else {
    p = sum(l, [](const RoundRecord& r) { return r.breg_p; });
    rep.terms.emplace_back("breg_p", p);
  }
  const double h = 0.5 * sum(l, [](const RoundRecord& r) { return r.dual_hint; });
  rep.terms.emplace_back("dual_hint", h);
  rep.value = q + p + h;
  rep.empirical = composite_or_plain(l);
  finish(rep);
  return rep;
}

BoundReport bound_variational_smooth(const Ledger& l, const BoundInputs& in) {
  if (l.algorithm != Algorithm::Ftrl) throw BoundError("variational bound: needs an optimistic FTRL ledger");
  if (!l.certified) missing("strongly convex regularizer r_{1:t} (uncertified metric)");
  const int T = l.T();
  if (static_cast<int>(in.variation_per_round.size()) < T) {
    throw BoundError("variational bound: per-round variation estimates missing");
  }
  for (int i = 0; i < T; ++i) {
    const RoundRecord& r = l.rounds[static_cast<std::size_t>(i)];
    const Point expect = i == 0 ? Point::Zero(r.g.size()) : l.rounds[static_cast<std::size_t>(i - 1)].g;
    if (r.hint != expect) throw BoundError("variational bound: hints must be the previous gradients");
    const double next = i + 1 < T ? l.rounds[static_cast<std::size_t>(i + 1)].eta : r.eta;
    if (r.eta * next < 8.0 * in.L * in.L) {
      throw BoundError("variational bound: eta_t eta_{t+1} >= 8 L^2 fails at round " + std::to_string(r.t));
    }
  }
  BoundReport rep;
  rep.name = "variational-smooth";
  const double q = l.q0t_star + sum(l, [](const RoundRecord& r) { return r.qt_star; });
  const double p = sum(l, [](const RoundRecord& r) { return r.p_star; });
  double v = 0.0;
  for (int i = 0; i < T; ++i) {
    const double vt = in.variation_per_round[static_cast<std::size_t>(i)];
    if (vt == 0.0) continue;
    const double eta = l.rounds[static_cast<std::size_t>(i)].eta;
    v += eta > 0.0 ? 2.0 * vt / eta : kInf;
  }
  rep.terms = {{"q_tilde", q}, {"p", p}, {"variation", v}};
  rep.value = q + p + v;
  rep.empirical = composite_or_plain(l);
  rep.estimate_quality = in.variation_exact ? "exact" : "probe-estimated";
  finish(rep);
  return rep;
}

BoundReport bound_final_attack(const Ledger& l, const BoundInputs& in) {
  if (!std::isfinite(in.R) || !(in.R > 0.0)) throw BoundError("final-attack bound: unbounded set (R must be finite)");
  if (!in.D_variation) throw BoundError("final-attack bound: variation D missing");
  const double R = in.R;
  const double D = *in.D_variation;
  BoundReport rep;
  rep.name = "final-attack";
  rep.terms = {{"smooth", 2.0 * R * R * R * in.L * in.L}, {"diameter", R}, {"variation", 2.0 * R * std::sqrt(2.0 * D)}};
  rep.value = 2.0 * R * R * R * in.L * in.L + R + 2.0 * R * std::sqrt(2.0 * D);
  rep.empirical = composite_or_plain(l);
  rep.estimate_quality = in.variation_exact ? "exact" : "probe-estimated";
  finish(rep);
  return rep;
}

BoundReport linearized_bound(const Ledger& l) {
  BoundReport rep;
  rep.name = "linearized";
  const double lin = sum(l, [](const RoundRecord& r) { return r.lin_fwd + r.drift; });
  const double dl = sum(l, [](const RoundRecord& r) { return r.delta; });
  rep.terms = {{"linear", lin}, {"delta", dl}};
  rep.value = lin + dl;
  rep.empirical = empirical_regret(l, false);
  finish(rep);
  return rep;
}

BoundReport linearized_bound_strong(const Ledger& l, const Regularizer& r) {
  BoundReport rep = linearized_bound(l);
  rep.name = "linearized-strong";
  double b = 0.0;
  for (const RoundRecord& rr : l.rounds) b += fin(bregman(r, l.x_star, rr.x));
  rep.terms.emplace_back("breg_r", -b);
  rep.value -= b;
  finish(rep);
  return rep;
}

BoundReport scale_tau(const BoundReport& report, double tau) {
  if (!(tau > 0.0) || tau > 1.0) throw DomainError("scale_tau: tau must lie in (0, 1]");
  BoundReport rep = report;
  rep.name = report.name + "/tau";
  rep.value = report.value / tau;
  rep.terms.emplace_back("tau", tau);
  finish(rep);
  return rep;
}

std::pair<double, double> sum_sqrt_check(const std::vector<double>& a) {
  if (a.empty() || !(a.front() > 0.0)) throw DomainError("sum_sqrt_check: needs a_1 > 0");
  double acc = 0.0;
  double lhs = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) throw DomainError("sum_sqrt_check: entries must be non-negative");
    acc += v;
    lhs += v / std::sqrt(acc);
  }
  return {lhs, 2.0 * std::sqrt(acc)};
}

SeedAggregate aggregate(const std::vector<double>& v) {
  SeedAggregate a;
  a.n = static_cast<int>(v.size());
  if (v.empty()) return a;
  a.mean = std::accumulate(v.begin(), v.end(), 0.0) / a.n;
  if (a.n > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.se = std::sqrt(ss / (a.n - 1)) / std::sqrt(static_cast<double>(a.n));
  }
  return a;
}

namespace {

struct Group {
  const Loss* f;
  double weight;
};

std::vector<Group> group_losses(const LossSequence& seq) {
  std::vector<Group> out;
  for (const Loss& f : seq.losses()) {
    if (!out.empty() && out.back().f->same_function(f)) {
      out.back().weight += 1.0;
      continue;
    }
    out.push_back({&f, 1.0});
  }
  return out;
}

}  // namespace

Point offline_best(const LossSequence& seq, const FeasibleSet& set, double tol, double l1) {
  const Index d = set.dim();
  if (seq.rounds() == 0) return set.default_start();
  require_same_dim(d, seq.dim(), "offline_best");
  const std::vector<Group> groups = group_losses(seq);
  if (!(l1 >= 0.0)) throw DomainError("offline_best: l1 weight must be >= 0");
  const double total = static_cast<double>(seq.rounds());
  // per-round average of the composite weight
  const double a = l1;

  if (a > 0.0 && seq.all_linear() && (set.is<FeasibleSet::Box>() || set.is<FeasibleSet::Unconstrained>())) {
    Point g = Point::Zero(d);
    for (const Group& gr : groups) g += gr.weight * gr.f->meta().linear_coef;
    g /= total;
    Point x = Point::Zero(d);
    for (Index j = 0; j < d; ++j) {
      if (std::abs(g[j]) <= a) continue;
      if (!set.bounded()) throw BoundError("offline comparator: linear losses on an unbounded set; pin x* explicitly");
      const auto& b = set.as<FeasibleSet::Box>();
      double best_v = kInf;
      for (double c : {std::clamp(0.0, b.lo[j], b.hi[j]), b.lo[j], b.hi[j]}) {
        const double v = g[j] * c + a * std::abs(c);
        if (v < best_v) {
          best_v = v;
          x[j] = c;
        }
      }
    }
    return x;
  }

  if (a == 0.0 && seq.all_linear()) {
    Point g = Point::Zero(d);
    for (const Group& gr : groups) g += gr.weight * gr.f->meta().linear_coef;
    if (g.squaredNorm() == 0.0) return set.default_start();
    if (!set.bounded()) throw BoundError("offline comparator: linear losses on an unbounded set; pin x* explicitly");
    return set.minimize_linear(g);
  }

  bool quad = true;
  for (const Group& gr : groups) {
    const auto& m = gr.f->meta();
    quad = quad && m.quad_center.has_value() && m.strong_convexity.has_value() && *m.strong_convexity > 0.0;
  }
  if (quad && a == 0.0) {
    Point num = Point::Zero(d);
    double den = 0.0;
    for (const Group& gr : groups) {
      const double w = gr.weight * *gr.f->meta().strong_convexity;
      num += w * *gr.f->meta().quad_center;
      den += w;
    }
    return project(set, Point(num / den));
  }

  const auto& c0 = groups.front().f->meta().star_center;
  bool common = c0.has_value();
  for (const Group& gr : groups) {
    const auto& c = gr.f->meta().star_center;
    common = common && c.has_value() && c->size() == c0->size() && (*c - *c0).lpNorm<Eigen::Infinity>() == 0.0;
  }
  if (common && a == 0.0 && set.contains(*c0)) return *c0;

  // projected (sub)gradient on the average loss
  auto value = [&](const Point& x) {
    double v = 0.0;
    for (const Group& gr : groups) v += gr.weight * gr.f->value(x);
    return v / total + a * x.lpNorm<1>();
  };
  // exact prox of a|.| plus the set for boxes and R^d, otherwise shrink then project
  auto prox = [&](const Point& y, double step) {
    const double k = step * a;
    Point z = y.unaryExpr([k](double v) { return v > k ? v - k : (v < -k ? v + k : 0.0); });
    return project(set, z);
  };
  auto grad = [&](const Point& x) {
    Point g = Point::Zero(d);
    for (const Group& gr : groups) g += gr.weight * gr.f->gradient(x);
    return Point(g / total);
  };
  bool smooth = true;
  double Ls = 0.0;
  for (const Group& gr : groups) {
    const auto& m = gr.f->meta();
    smooth = smooth && m.differentiable && m.smoothness.has_value();
    if (m.smoothness) Ls = std::max(Ls, *m.smoothness);
  }
  Point x = project(set, set.default_start());
  if (smooth && Ls > 0.0) {
    const double step = 1.0 / Ls;
    for (int it = 0; it < 200000; ++it) {
      const Point xn = prox(Point(x - step * grad(x)), step);
      const double moved = (xn - x).norm();
      x = xn;
      if (moved <= tol * step) break;
    }
    return x;
  }
  const double scale = std::isfinite(set.diameter()) ? set.diameter() : 1.0;
  Point best = x;
  double best_v = value(x);
  for (int k = 1; k <= 50000; ++k) {
    Point g = grad(x);
    if (a > 0.0) g += a * x.unaryExpr([](double v) { return double((v > 0.0) - (v < 0.0)); });
    const double gn = g.norm();
    if (gn == 0.0) return x;
    x = project(set, Point(x - (scale / std::sqrt(static_cast<double>(k))) * g / gn));
    const double v = value(x);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
  }
  return best;
}

std::vector<std::string> csv_header(Index dim) {
  std::vector<std::string> h{"t"};
  for (Index j = 0; j < dim; ++j) h.push_back("x_" + std::to_string(j));
  for (Index j = 0; j < dim; ++j) h.push_back("g_" + std::to_string(j));
  for (const char* c : {"loss", "loss_star", "psi", "psi_star", "lin_fwd", "drift", "breg_loss", "delta", "breg_reg",
                        "q_star", "q_next", "p_star", "p_cur", "breg_p", "cum_regret", "cum_bound", "slack"}) {
    h.emplace_back(c);
  }
  return h;
}

void write_csv(std::ostream& os, const Ledger& l) {
  const Index d = l.x_star.size();
  const auto header = csv_header(d);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  double cum_regret = 0.0;
  double cum_bound = (l.q0_star + l.extra_star) - (l.q0_x1 + l.extra_x1);
  for (const RoundRecord& r : l.rounds) {
    cum_regret += r.loss - r.loss_star;
    const double p = l.algorithm == Algorithm::Ftrl ? r.p_star - r.p_cur : r.breg_p;
    cum_bound += (r.q_star - r.q_next) + p - r.breg_reg + r.drift - r.breg_loss + r.delta;
    os << r.t;
    for (Index j = 0; j < d; ++j) put(r.x[j]);
    for (Index j = 0; j < d; ++j) put(r.g[j]);
    for (double v : {r.loss, r.loss_star, r.psi, r.psi_star, r.lin_fwd, r.drift, r.breg_loss, r.delta, r.breg_reg,
                     r.q_star, r.q_next, r.p_star, r.p_cur, r.breg_p, cum_regret, cum_bound, cum_bound - cum_regret}) {
      put(v);
    }
    os << '\n';
  }
}

}  // namespace adaopt
