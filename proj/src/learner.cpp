#include "adaopt/learner.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace adaopt {

namespace {

constexpr int kProximalProbes = 50;
constexpr int kPsiProbes = 20;
constexpr std::uint64_t kProbeSeed = 0x5eedULL;

Regularizer quad_or_zero(const Point& center, const Metric& m) {
  if (m.is_zero()) return Regularizer::zero();
  return Regularizer::quadratic(center, m, 1.0);
}

void require_finite(const Point& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + ": non-finite entries");
}

/// p minimized at x, read off the structure when possible.
bool proximal_by_structure(const Regularizer& p, const Point& x, const FeasibleSet& set) {
  for (const Regularizer* leaf : p.leaves()) {
    if (leaf->is<Regularizer::Quadratic>()) {
      const auto& q = leaf->as<Regularizer::Quadratic>();
      if (q.scale < 0.0) return false;
      if ((q.center - x).lpNorm<Eigen::Infinity>() > 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>())) return false;
    } else if (leaf->is<Regularizer::Indicatrix>()) {
      const auto& s = leaf->as<Regularizer::Indicatrix>().set;
      if (!s.contains(x)) return false;
      if (!(s == set) && !set.is<FeasibleSet::Unconstrained>()) return false;
    } else {
      return false;
    }
  }
  return true;
}

void check_proximal(const LearnerState& s, const Regularizer& p) {
  if (!s.check_proximal || p.is_zero()) return;
  if (proximal_by_structure(p, s.x, s.set)) return;
  Rng rng(kProbeSeed + static_cast<std::uint64_t>(s.round));
  const double px = p.value(s.x);
  for (const Point& probe : make_probes(s.set, kProximalProbes, rng)) {
    if (px > p.value(probe) + 1e-9) {
      std::ostringstream os;
      os << "proximal condition violated at round " << s.round + 1 << ": p_t is not minimized at x_t";
      throw LearnerError(os.str());
    }
  }
}

/// Minimizer of b u + alpha |u| over [lo, hi].
double coordinate_min(double b, double alpha, double lo, double hi) {
  std::array<double, 3> cand{lo, hi, std::clamp(0.0, lo, hi)};
  double best = cand[0];
  double val = kInf;
  for (double u : cand) {
    if (!std::isfinite(u)) continue;
    const double v = b * u + alpha * std::abs(u);
    if (v < val) {
      val = v;
      best = u;
    }
  }
  return best;
}

/// argmin with flat coordinates resolved. A separable objective that has no
/// curvature on coordinate j is minimized coordinate-wise there; the chosen
/// minimizer is added as a pinning quadratic so the solver sees a
/// well-posed problem with the same solution set intersection.
Point solve(const Objective& obj, const Point& x_t, const SolverOptions& opts) {
  const Index d = obj.set.dim();
  const bool box = obj.set.is<FeasibleSet::Box>();
  if (obj.anchor || !obj.smooth.empty() || !(box || obj.set.is<FeasibleSet::Unconstrained>())) {
    return argmin(obj, opts);
  }
  const CanonicalForm c = canonicalize(obj.regularizer, d);
  if (!c.customs.empty() || !c.sets.empty() || (c.neg && !c.neg->is_zero())) return argmin(obj, opts);
  if (c.pos && c.pos->kind() == MetricKind::Full) return argmin(obj, opts);
  const Point w = c.pos ? c.pos->diag() : Point::Zero(d);
  if ((w.array() > 0.0).all()) return argmin(obj, opts);

  const Point lin = obj.linear + c.b;
  Point mask = Point::Zero(d);
  Point pin = Point::Zero(d);
  bool any = false;
  for (Index j = 0; j < d; ++j) {
    if (w[j] > 0.0) continue;
    double lo = -kInf;
    double hi = kInf;
    if (box) {
      lo = obj.set.as<FeasibleSet::Box>().lo[j];
      hi = obj.set.as<FeasibleSet::Box>().hi[j];
    }
    double v;
    if (lin[j] == 0.0 && c.alpha == 0.0) {
      v = std::clamp(x_t[j], lo, hi);
    } else if (std::abs(lin[j]) <= c.alpha) {
      v = std::clamp(0.0, lo, hi);
    } else if (box) {
      v = coordinate_min(lin[j], c.alpha, lo, hi);
    } else {
      continue;  // unbounded below; argmin reports it
    }
    mask[j] = 1.0;
    pin[j] = v;
    any = true;
  }
  if (!any) return argmin(obj, opts);
  Objective pinned = obj;
  pinned.regularizer = obj.regularizer + Regularizer::quadratic(pin, Metric::diagonal(mask), 1.0);
  return argmin(pinned, opts);
}

bool plain_quadratic(const CanonicalForm& c) { return c.customs.empty() && c.sets.empty() && c.alpha == 0.0; }

Point canonical_gradient(const CanonicalForm& c, const Point& x) {
  Point g = c.b;
  if (c.pos) g += c.pos->apply(x);
  if (c.neg) g -= c.neg->apply(x);
  return g;
}

}  // namespace

LearnerState init(Algorithm algorithm, const FeasibleSet& set, const Regularizer& q0, const std::optional<Point>& x1,
                  const std::optional<Point>& first_hint, const SolverOptions& solver) {
  const Index d = set.dim();
  LearnerState s;
  s.algorithm = algorithm;
  s.set = set;
  s.solver = solver;
  s.g_sum = Point::Zero(d);
  s.hint = first_hint ? *first_hint : Point::Zero(d);
  require_same_dim(d, s.hint.size(), "init: hint");
  require_finite(s.hint, "init: hint");
  s.q_last = s.hint.squaredNorm() == 0.0 ? q0 : merge(q0, Regularizer::linear(s.hint, 0.0));
  s.q_cum = s.q_last;

  const MetricCertificate cert = certified_metric(s.q_last, d);
  const CanonicalForm c = canonicalize(s.q_last, d);
  const bool curved = cert.metric.positive_definite() || !c.customs.empty();
  const Point start = x1 ? *x1 : set.default_start();
  require_same_dim(d, start.size(), "init: x1");
  auto minimizes = [&](const Point& x) {
    Rng rng(kProbeSeed);
    const double v1 = s.q_last.value(x);
    for (const Point& p : make_probes(set, kProximalProbes, rng))
      if (v1 > s.q_last.value(p) + 1e-9) return false;
    return true;
  };
  if (!curved && x1) {
    if (!set.contains(start)) throw LearnerError("init: x1 is not feasible");
    // x1 must still minimize q_0 + <hint, .>
    if (!minimizes(start)) throw LearnerError("init: x1 does not minimize q_0");
    s.x = start;
  } else if (!curved && set.contains(start) && minimizes(start)) {
    // flat q_0: any minimizer will do
    s.x = start;
  } else {
    Objective obj{Point::Zero(d), s.q_last, std::nullopt, {}, set};
    s.x = solve(obj, start, solver);
    ++s.solver_calls;
    if (x1 && (s.x - *x1).norm() > 1e-8 * (1.0 + x1->norm())) throw LearnerError("init: x1 does not minimize q_0");
  }
  return s;
}

Point ftrl_step(LearnerState& s, const Point& g, const Regularizer& p_t, const Regularizer& q_t) {
  require_same_dim(s.x.size(), g.size(), "ftrl_step: g");
  require_finite(g, "ftrl_step: g");
  check_proximal(s, p_t);
  const Index d = s.x.size();
  s.g_sum += g;
  s.p_cum = merge(s.p_cum, p_t);
  s.q_cum = merge(s.q_cum, q_t);
  s.r_cum = merge(s.r_cum, p_t + s.q_last);
  s.q_last = q_t;
  Objective obj{s.g_sum, merge(s.p_cum, s.q_cum), std::nullopt, {}, s.set};
  require_same_dim(d, obj.linear.size(), "ftrl_step");
  s.x = solve(obj, s.x, s.solver);
  ++s.solver_calls;
  ++s.round;
  return s.x;
}

Point md_step(LearnerState& s, const Point& g, const Regularizer& q_t, const Regularizer& r_t) {
  require_same_dim(s.x.size(), g.size(), "md_step: g");
  require_finite(g, "md_step: g");
  const Index d = s.x.size();
  s.r_cum = merge(s.r_cum, r_t);
  const CanonicalForm rc = canonicalize(s.r_cum, d);
  Objective obj;
  obj.set = s.set;
  if (plain_quadratic(rc)) {
    // B_r(x, x_t) = r(x) - <grad r(x_t), x> + const
    obj.linear = g - canonical_gradient(rc, s.x);
    obj.regularizer = merge(q_t, s.r_cum);
  } else {
    obj.linear = g;
    obj.regularizer = q_t;
    obj.anchor = BregmanAnchor{s.r_cum, s.x};
  }
  s.x = solve(obj, s.x, s.solver);
  s.q_last = q_t;
  ++s.solver_calls;
  ++s.round;
  return s.x;
}

Point ao_ftrl_step(LearnerState& s, const Point& g, const Point& hint_next, const Regularizer& p_t,
                   const Regularizer& q_tilde) {
  const Regularizer q_t = optimistic_shift(q_tilde, s.hint, hint_next);
  s.hint = hint_next;
  return ftrl_step(s, g, p_t, q_t);
}

Point ao_md_step(LearnerState& s, const Point& g, const Point& hint_prev, const Point& hint_next,
                 const Regularizer& q_tilde, const Regularizer& r_t) {
  const long before = s.solver_calls;
  const Regularizer q_t = optimistic_shift(q_tilde, hint_prev, hint_next);
  s.hint = hint_next;
  md_step(s, g, q_t, r_t);
  if (s.solver_calls != before + 1) throw LearnerError("ao_md_step: expected exactly one projection");
  return s.x;
}

Point composite_step(LearnerState& s, const Point& g, std::span<const Regularizer> psis, CompositeSetting setting,
                     const Regularizer& q_tilde, const Regularizer& p_or_r) {
  const int t = s.round + 1;
  if (setting == CompositeSetting::RevealedAfter && t == 1) {
    Rng rng(kProbeSeed);
    if (!validate_psi_sequence(psis, s.x, make_probes(s.set, kPsiProbes, rng))) {
      throw LearnerError("composite_step: psi sequence must satisfy psi_1(x_1) = 0 and be non-increasing, >= 0");
    }
  }
  const Regularizer q_t = composite_wrap(q_tilde, psis, setting, t);
  if (s.algorithm == Algorithm::Ftrl) return ftrl_step(s, g, p_or_r, q_t);
  return md_step(s, g, q_t, p_or_r);
}

Point implicit_md_step(LearnerState& s, const Loss& l, const Regularizer& q_tilde, const Regularizer& r_t) {
  const Point g = l.gradient(s.x);
  const Regularizer psi = Regularizer::custom(s.x.size(), loss_bregman_handle(l, s.x));
  return md_step(s, g, q_tilde + psi, r_t);
}

Point nonlinearized_ftrl_step(LearnerState& s, const Loss& l, const Regularizer& q_tilde, const Regularizer& p_t) {
  const Point g = l.gradient(s.x);
  const Regularizer psi = Regularizer::custom(s.x.size(), loss_bregman_handle(l, s.x));
  return ftrl_step(s, g, p_t, q_tilde + psi);
}

// ---------------------------------------------------------------------------

namespace {

struct PresetName {
  Preset p;
  const char* name;
};
constexpr std::array<PresetName, 9> kPresets{{{Preset::Ogd, "ogd"},
                                              {Preset::Da, "da"},
                                              {Preset::AdagradDa, "adagrad-da"},
                                              {Preset::FtrlProx, "ftrl-prox"},
                                              {Preset::AoFtrlProx, "ao-ftrl-prox"},
                                              {Preset::Md, "md"},
                                              {Preset::AoMd, "ao-md"},
                                              {Preset::ImplicitMd, "implicit-md"},
                                              {Preset::NonlinFtrl, "nonlin-ftrl"}}};

struct ScheduleName {
  ScheduleKind k;
  const char* name;
};
constexpr std::array<ScheduleName, 9> kSchedules{{{ScheduleKind::Default, "default"},
                                                  {ScheduleKind::None, "none"},
                                                  {ScheduleKind::Constant, "constant"},
                                                  {ScheduleKind::InvSqrt, "inv-sqrt"},
                                                  {ScheduleKind::StrongInvT, "strong-inv-t"},
                                                  {ScheduleKind::AdagradDiag, "adagrad-diag"},
                                                  {ScheduleKind::AdagradFull, "adagrad-full"},
                                                  {ScheduleKind::ScaleFree, "scale-free"},
                                                  {ScheduleKind::FinalAttack, "final-attack"}}};

bool q_style(Preset p) { return p == Preset::Ogd || p == Preset::Da || p == Preset::AdagradDa; }
bool adagrad(ScheduleKind k) { return k == ScheduleKind::AdagradDiag || k == ScheduleKind::AdagradFull; }
bool eta_schedule(ScheduleKind k) { return k == ScheduleKind::ScaleFree || k == ScheduleKind::FinalAttack; }

}  // namespace

std::string to_string(Preset p) {
  for (const auto& e : kPresets)
    if (e.p == p) return e.name;
  return "?";
}

std::string to_string(ScheduleKind k) {
  for (const auto& e : kSchedules)
    if (e.k == k) return e.name;
  return "?";
}

Preset parse_preset(const std::string& s) {
  for (const auto& e : kPresets)
    if (s == e.name) return e.p;
  throw std::invalid_argument("unknown preset '" + s + "'");
}

ScheduleKind parse_schedule(const std::string& s) {
  for (const auto& e : kSchedules)
    if (s == e.name) return e.k;
  throw std::invalid_argument("unknown schedule '" + s + "'");
}

HintPolicy parse_hint_policy(const std::string& s) {
  if (s == "none") return HintPolicy::None;
  if (s == "previous-gradient") return HintPolicy::PreviousGradient;
  if (s == "custom") return HintPolicy::Custom;
  throw std::invalid_argument("unknown hint policy '" + s + "'");
}

Algorithm LearnerConfig::algorithm() const {
  switch (preset) {
    case Preset::Md:
    case Preset::AoMd:
    case Preset::ImplicitMd: return Algorithm::Md;
    default: return Algorithm::Ftrl;
  }
}

ScheduleKind LearnerConfig::effective_schedule() const {
  if (schedule != ScheduleKind::Default) return schedule;
  switch (preset) {
    case Preset::Ogd: return ScheduleKind::Constant;
    case Preset::Da: return ScheduleKind::InvSqrt;
    case Preset::AdagradDa:
    case Preset::FtrlProx:
    case Preset::AoFtrlProx: return ScheduleKind::AdagradDiag;
    case Preset::Md:
    case Preset::AoMd:
    case Preset::ImplicitMd: return ScheduleKind::Constant;
    case Preset::NonlinFtrl: return ScheduleKind::None;
  }
  return ScheduleKind::Constant;
}

void LearnerConfig::validate() const {
  const ScheduleKind k = effective_schedule();
  if (!std::isfinite(eta) || !(eta > 0.0)) throw LearnerError("eta must be finite and > 0");
  if (!(gamma >= 0.0)) throw LearnerError("gamma must be >= 0");
  if (preset == Preset::AdagradDa && !(gamma > 0.0)) throw LearnerError("adagrad-da requires gamma > 0");
  if (algorithm() == Algorithm::Md && adagrad(k) && !(gamma > 0.0) && optimistic()) {
    throw LearnerError("optimistic mirror descent with AdaGrad needs gamma > 0 to define x_1");
  }
  if (k == ScheduleKind::StrongInvT && !(mu > 0.0)) throw LearnerError("strong-inv-t schedule requires mu > 0");
  if (k == ScheduleKind::AdagradFull && set.dim() > 256) throw LearnerError("adagrad-full is limited to d <= 256");
  if (q_style(preset) && eta_schedule(k)) {
    throw LearnerError("schedule '" + to_string(k) + "' needs a proximal or mirror-descent preset");
  }
  if (k == ScheduleKind::FinalAttack) {
    if (!(L >= 0.0)) throw LearnerError("final-attack schedule requires L >= 0");
    const double r = std::isnan(R) ? set.diameter() : R;
    if (!std::isfinite(r) || !(r > 0.0)) throw LearnerError("final-attack schedule requires a bounded set (finite R > 0)");
  }
  if (!(smooth_L >= 0.0)) throw LearnerError("smooth_L must be >= 0");
  if (!(composite_alpha >= 0.0)) throw LearnerError("composite alpha must be >= 0");
  if (implicit()) {
    if (optimistic()) throw LearnerError("implicit presets do not take hints");
    if (composite()) throw LearnerError("implicit presets already use the composite path");
  }
  if (hints == HintPolicy::Custom && !hint_stream) throw LearnerError("custom hint policy requires a hint stream");
  if (x1) {
    require_same_dim(set.dim(), x1->size(), "learner: x1");
    if (!set.contains(*x1)) throw LearnerError("learner: x1 is not feasible");
  }
}

Learner::Learner(LearnerConfig config, int horizon) : cfg_(std::move(config)), T_(horizon) {
  if (horizon < 1) throw LearnerError("horizon must be >= 1");
  if ((cfg_.preset == Preset::AoFtrlProx || cfg_.preset == Preset::AoMd) && cfg_.hints == HintPolicy::None) {
    cfg_.hints = HintPolicy::PreviousGradient;
  }
  cfg_.validate();
  d_ = cfg_.set.dim();
  sched_ = cfg_.effective_schedule();
  if (std::isnan(cfg_.R)) cfg_.R = cfg_.set.diameter();
  center_ = cfg_.x1 ? *cfg_.x1 : cfg_.set.default_start();

  if (cfg_.composite()) psis_.assign(static_cast<std::size_t>(T_), Regularizer::l1(d_, cfg_.composite_alpha));

  const Algorithm alg = cfg_.algorithm();
  const bool prox = !q_style(cfg_.preset) && alg == Algorithm::Ftrl;
  // K_0: curvature of q~_0
  Metric k0 = Metric::zero(d_);
  switch (sched_) {
    case ScheduleKind::Constant:
    case ScheduleKind::InvSqrt:
      if (!prox) k0 = Metric::scaled_identity(d_, 1.0 / cfg_.eta);
      break;
    case ScheduleKind::StrongInvT:
      if (!prox) k0 = Metric::scaled_identity(d_, cfg_.mu);
      break;
    case ScheduleKind::AdagradDiag:
    case ScheduleKind::AdagradFull:
      if (cfg_.gamma > 0.0) {
        k0 = adagrad_initial_metric(d_, cfg_.eta, cfg_.gamma);
        sstate_.cumulative = k0;
      }
      break;
    default: break;
  }
  k_prev_ = k0;

  const Regularizer q0_tilde = quad_or_zero(center_, k0);
  Regularizer q0 = q0_tilde;
  if (cfg_.composite() && cfg_.composite_setting == CompositeSetting::KnownBefore) {
    q0 = composite_wrap(q0_tilde, psis_, CompositeSetting::KnownBefore, 0);
  }
  trace_.extra = cfg_.smooth_L > 0.0 ? Regularizer::half_sq_norm(center_, cfg_.smooth_L) : Regularizer::zero();
  trace_.extra_center = center_;
  trace_.smooth_L = cfg_.smooth_L;

  std::optional<Point> hint1;
  if (cfg_.hints == HintPolicy::Custom) hint1 = cfg_.hint_stream(1);
  const Regularizer q0_solver = alg == Algorithm::Ftrl ? q0 + trace_.extra : q0;
  state_ = init(alg, cfg_.set, q0_solver, cfg_.x1, hint1, cfg_.solver);

  trace_.algorithm = alg;
  trace_.preset = to_string(cfg_.preset);
  trace_.x1 = state_.x;
  trace_.q0 = state_.hint.squaredNorm() == 0.0 ? q0 : merge(q0, Regularizer::linear(state_.hint, 0.0));
  trace_.q0_tilde = q0_tilde;
  trace_.composite = cfg_.composite() || cfg_.implicit();
  trace_.implicit = cfg_.implicit();
  trace_.solver_calls = state_.solver_calls;
  q_prev_base_ = trace_.q0;
}

RoundTrace Learner::step(const Point& g_in, const Loss* loss) {
  const int t = state_.round + 1;
  if (t > T_) throw LearnerError("learner: horizon exhausted");
  const Algorithm alg = cfg_.algorithm();
  const bool prox = !q_style(cfg_.preset) && alg == Algorithm::Ftrl;

  Point g = g_in;
  if (cfg_.implicit()) {
    if (!loss) throw LearnerError("implicit presets need the loss at step time");
    g = loss->gradient(state_.x);
  }
  require_same_dim(d_, g.size(), "learner step: g");
  require_finite(g, "learner step: g");

  RoundTrace rec;
  rec.t = t;
  rec.x = state_.x;
  rec.g = g;
  rec.hint = state_.hint;
  switch (cfg_.hints) {
    case HintPolicy::None: rec.hint_next = Point::Zero(d_); break;
    case HintPolicy::PreviousGradient: rec.hint_next = g; break;
    case HintPolicy::Custom: rec.hint_next = cfg_.hint_stream(t + 1); break;
  }
  require_same_dim(d_, rec.hint_next.size(), "learner step: hint");

  // cumulative curvature K_t and its increment
  Metric k_t = k_prev_;
  Metric inc = Metric::zero(d_);
  const double tt = static_cast<double>(t);
  switch (sched_) {
    case ScheduleKind::Default:
    case ScheduleKind::None: break;
    case ScheduleKind::Constant: k_t = Metric::scaled_identity(d_, 1.0 / cfg_.eta); break;
    case ScheduleKind::InvSqrt:
      k_t = Metric::scaled_identity(d_, std::sqrt(alg == Algorithm::Ftrl && !prox ? tt + 1.0 : tt) / cfg_.eta);
      break;
    case ScheduleKind::StrongInvT:
      k_t = Metric::scaled_identity(d_, (alg == Algorithm::Ftrl && !prox ? tt + 1.0 : tt) * cfg_.mu);
      break;
    case ScheduleKind::AdagradDiag: {
      MetricStep st = adagrad_diag_step(sstate_, g, cfg_.eta, cfg_.gamma);
      k_t = st.cumulative;
      break;
    }
    case ScheduleKind::AdagradFull: {
      MetricStep st = adagrad_full_step(sstate_, g, cfg_.eta, cfg_.gamma);
      k_t = st.cumulative;
      break;
    }
    case ScheduleKind::ScaleFree:
      k_t = Metric::scaled_identity(d_, scale_free_eta(sstate_, g, rec.hint, cfg_.eta));
      break;
    case ScheduleKind::FinalAttack:
      k_t = Metric::scaled_identity(d_, final_attack_eta(sstate_, g, rec.hint, cfg_.R, cfg_.L));
      break;
  }
  inc = difference(k_t, k_prev_);
  k_prev_ = k_t;

  Regularizer p_t;
  Regularizer q_tilde;
  Regularizer r_t;
  if (alg == Algorithm::Ftrl) {
    if (prox) {
      p_t = ftrl_prox_increment(state_.x, inc);
    } else {
      q_tilde = quad_or_zero(center_, inc);
    }
  } else {
    // r_1 also carries the curvature of q_0
    r_t = quad_or_zero(center_, t == 1 ? k_t : inc);
  }

  Regularizer psi;
  Regularizer q_t = q_tilde;
  if (cfg_.composite()) {
    q_t = composite_wrap(q_tilde, psis_, cfg_.composite_setting, t);
    psi = psis_[static_cast<std::size_t>(t - 1)];
    if (cfg_.composite_setting == CompositeSetting::RevealedAfter && t == 1) {
      Rng rng(kProbeSeed);
      if (!validate_psi_sequence(psis_, state_.x, make_probes(cfg_.set, kPsiProbes, rng))) {
        throw LearnerError("composite setting revealed-after needs psi_1(x_1) = 0 (start at the origin)");
      }
    }
  } else if (cfg_.implicit()) {
    psi = Regularizer::custom(d_, loss_bregman_handle(*loss, state_.x));
    q_t = q_tilde + psi;
  }
  if (cfg_.optimistic()) q_t = optimistic_shift(q_t, rec.hint, rec.hint_next);
  state_.hint = rec.hint_next;

  rec.q_prev = state_.q_last;
  const Regularizer q_prev_base = q_prev_base_;
  if (alg == Algorithm::Ftrl) {
    ftrl_step(state_, g, p_t, q_t);
    rec.r = p_t + q_prev_base;
  } else {
    const Regularizer r_solver = t == 1 ? r_t + trace_.extra : r_t;
    md_step(state_, g, q_t, r_solver);
    rec.r = r_t;
  }
  q_prev_base_ = q_t;
  r_cum_base_ = merge(r_cum_base_, rec.r);

  rec.x_next = state_.x;
  rec.p = p_t;
  rec.q = q_t;
  rec.q_tilde = q_tilde;
  rec.psi = psi;
  const ExtReal br = bregman(state_.r_cum, rec.x_next, rec.x);
  rec.breg_reg = br.is_inf() ? kInf : br.value();
  const MetricCertificate full = certified_metric(state_.r_cum, d_);
  const MetricCertificate base = certified_metric(r_cum_base_, d_);
  rec.cert = full.metric;
  rec.cert_base = base.metric;
  rec.certified = full.certified && base.certified;
  rec.eta = full.metric.dim() > 0 ? full.metric.min_eigenvalue() : 0.0;
  trace_.solver_calls = state_.solver_calls;
  trace_.rounds.push_back(rec);
  return rec;
}

}  // namespace adaopt
