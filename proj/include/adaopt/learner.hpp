#pragma once

#include "adaopt/losses.hpp"
#include "adaopt/regularizer.hpp"
#include "adaopt/schedules.hpp"
#include "adaopt/solvers.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace adaopt {

enum class Algorithm { Ftrl, Md };

class LearnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw Ada-FTRL / Ada-MD state. Single owner.
struct LearnerState {
  Algorithm algorithm = Algorithm::Ftrl;
  FeasibleSet set;
  SolverOptions solver;
  Point x;             // x_t
  Point g_sum;         // g_{1:t}
  Regularizer p_cum;   // p_{1:t}
  Regularizer q_cum;   // q_{0:t}
  Regularizer r_cum;   // r_{1:t}
  Regularizer q_last;  // q_t of the last completed round (q_0 initially)
  Point hint;          // g~_{t+1}, already folded into q_{0:t}
  int round = 0;       // completed rounds
  long solver_calls = 0;
  bool check_proximal = true;
};

/// x_1 = argmin q_0 + <g~_1, .> unless an explicit x1 is given.
LearnerState init(Algorithm algorithm, const FeasibleSet& set, const Regularizer& q0,
                  const std::optional<Point>& x1 = std::nullopt, const std::optional<Point>& first_hint = std::nullopt,
                  const SolverOptions& solver = {});

/// argmin <g_{1:t}, x> + p_{1:t}(x) + q_{0:t}(x). Throws when p_t is not
/// minimized at x_t.
Point ftrl_step(LearnerState& s, const Point& g, const Regularizer& p_t, const Regularizer& q_t);

/// argmin <g_t, x> + q_t(x) + B_{r_{1:t}}(x, x_t)
Point md_step(LearnerState& s, const Point& g, const Regularizer& q_t, const Regularizer& r_t);

/// ftrl_step with q_t = q~_t + <g~_{t+1} - g~_t, .>
Point ao_ftrl_step(LearnerState& s, const Point& g, const Point& hint_next, const Regularizer& p_t,
                   const Regularizer& q_tilde);

/// argmin <g_t + g~_{t+1} - g~_t, x> + q~_t(x) + B_{r_{1:t}}(x, x_t); one solver call.
Point ao_md_step(LearnerState& s, const Point& g, const Point& hint_prev, const Point& hint_next,
                 const Regularizer& q_tilde, const Regularizer& r_t);

/// q_t = composite_wrap(q~_t, psis, setting, t), then an FTRL (p_or_r = p_t)
/// or MD (p_or_r = r_t) step. psis[k] is psi_{k+1}. Revealed-after sequences
/// are validated on the first call.
Point composite_step(LearnerState& s, const Point& g, std::span<const Regularizer> psis, CompositeSetting setting,
                     const Regularizer& q_tilde, const Regularizer& p_or_r);

/// argmin l_t(x) + q~_t(x) + B_{r_{1:t}}(x, x_t), run as the composite MD step
/// with f_t = <grad l_t(x_t), .> and psi_t = B_{l_t}(., x_t).
Point implicit_md_step(LearnerState& s, const Loss& l, const Regularizer& q_tilde, const Regularizer& r_t);

/// argmin l_{1:t}(x) + q~_{0:t}(x) + p_{1:t}(x), run as composite FTRL.
Point nonlinearized_ftrl_step(LearnerState& s, const Loss& l, const Regularizer& q_tilde, const Regularizer& p_t);

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

enum class Preset { Ogd, Da, AdagradDa, FtrlProx, AoFtrlProx, Md, AoMd, ImplicitMd, NonlinFtrl };
enum class ScheduleKind { Default, None, Constant, InvSqrt, StrongInvT, AdagradDiag, AdagradFull, ScaleFree, FinalAttack };
enum class HintPolicy { None, PreviousGradient, Custom };

std::string to_string(Preset p);
std::string to_string(ScheduleKind k);
Preset parse_preset(const std::string& s);
ScheduleKind parse_schedule(const std::string& s);
HintPolicy parse_hint_policy(const std::string& s);

struct LearnerConfig {
  Preset preset = Preset::Ogd;
  ScheduleKind schedule = ScheduleKind::Default;
  FeasibleSet set;
  double eta = 1.0;
  double gamma = 0.0;
  double R = std::numeric_limits<double>::quiet_NaN();  // defaults to the set diameter
  double L = 0.0;          // final-attack smoothness
  double mu = 0.0;         // strong-convexity schedule
  double smooth_L = 0.0;   // extra (L/2)||.||^2 for smooth stochastic runs
  std::optional<Point> x1;
  HintPolicy hints = HintPolicy::None;
  std::function<Point(int)> hint_stream;  // g~_t for t >= 1 (custom policy)
  double composite_alpha = 0.0;           // psi_t = alpha ||.||_1
  CompositeSetting composite_setting = CompositeSetting::RevealedAfter;
  SolverOptions solver;

  Algorithm algorithm() const;
  ScheduleKind effective_schedule() const;
  bool optimistic() const { return hints != HintPolicy::None; }
  bool implicit() const { return preset == Preset::ImplicitMd || preset == Preset::NonlinFtrl; }
  bool composite() const { return composite_alpha > 0.0; }
  /// Throws LearnerError on inconsistent settings.
  void validate() const;
};

/// Everything a regret ledger needs from one round.
struct RoundTrace {
  int t = 0;
  Point x, x_next, g, hint, hint_next;
  Regularizer p;        // FTRL p_t
  Regularizer q;        // q_t as used
  Regularizer q_tilde;  // q~_t: no psi, no hint shift
  Regularizer r;        // r_t (MD: without the smooth extra)
  Regularizer q_prev;   // q_{t-1}
  Regularizer psi;      // psi_t of the composite regret (zero if none)
  double breg_reg = 0.0;          // B_{r_{1:t}}(x_{t+1}, x_t), full regularizers
  Metric cert;                    // certified metric of r_{1:t}
  Metric cert_base;               // the same without the smooth extra
  bool certified = true;
  double eta = 0.0;
};

struct Trace {
  Algorithm algorithm = Algorithm::Ftrl;
  std::string preset;
  Point x1;
  Regularizer q0;        // q_0 without the smooth extra
  Regularizer q0_tilde;
  Regularizer extra;     // (L/2)||x - c||^2 (FTRL: in q_0; MD: in r_1)
  std::vector<RoundTrace> rounds;
  long solver_calls = 0;
  bool composite = false;
  bool implicit = false;  // regret is measured on the losses themselves
  double smooth_L = 0.0;
  Point extra_center;
};

/// Preset-driven learner emitting RoundTrace records.
class Learner {
 public:
  Learner(LearnerConfig config, int horizon);

  const Point& current() const { return state_.x; }
  const LearnerState& state() const { return state_; }
  const LearnerConfig& config() const { return cfg_; }
  int horizon() const { return T_; }

  /// One round. The loss is required for implicit presets.
  RoundTrace step(const Point& g, const Loss* loss = nullptr);

  const Trace& trace() const { return trace_; }
  Trace release_trace() { return std::move(trace_); }

 private:
  LearnerConfig cfg_;
  int T_;
  Index d_;
  ScheduleKind sched_;
  ScheduleState sstate_;
  LearnerState state_;
  Point center_;
  std::vector<Regularizer> psis_;
  Trace trace_;
  Metric k_prev_;
  Regularizer q_prev_base_;
  Regularizer r_cum_base_;
};

}  // namespace adaopt
