#pragma once

#include "adaopt/learner.hpp"
#include "adaopt/losses.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adaopt {

class BoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoundRecord {
  int t = 0;
  Point x, x_next, g, hint, sigma;
  double loss = 0.0;       // f_t(x_t)
  double loss_star = 0.0;  // f_t(x*)
  double psi = 0.0;        // psi_t(x_t)
  double psi_star = 0.0;
  double lin_fwd = 0.0;    // <g_t, x_{t+1} - x*>
  double drift = 0.0;      // <g_t, x_t - x_{t+1}>
  double breg_loss = 0.0;  // B_{f_t}(x*, x_t)
  double delta = 0.0;      // <g_t, x* - x_t> - f_t'(x_t; x* - x_t)
  double breg_reg = 0.0;   // B_{r_{1:t}}(x_{t+1}, x_t)
  double q_star = 0.0, q_next = 0.0;    // q_t at x*, x_{t+1}
  double qt_star = 0.0, qt_next = 0.0;  // q~_t
  double p_star = 0.0, p_cur = 0.0;     // p_t at x*, x_t
  double breg_p = 0.0;                  // B_{p_t}(x*, x_t)
  double breg_p_base = 0.0;             // the same without the smooth extra
  double dual_g = 0.0;      // ||g_t||^2_{(t),*}
  double dual_sigma = 0.0;  // ||sigma_t||^2_{(t),*} in the metric without the extra
  double dual_hint = 0.0;   // ||g_t - g~_t||^2_{(t),*}
  double eta = 0.0;
  bool certified = true;
};

struct Ledger {
  Algorithm algorithm = Algorithm::Ftrl;
  std::string preset;
  Point x_star, x1;
  std::vector<RoundRecord> rounds;
  double q0_star = 0.0, q0_x1 = 0.0;    // q_0 without the smooth extra
  double q0t_star = 0.0, q0t_x1 = 0.0;  // q~_0
  double extra_star = 0.0, extra_x1 = 0.0;
  double smooth_L = 0.0;
  Point extra_center;
  bool composite = false;
  bool certified = true;

  int T() const { return static_cast<int>(rounds.size()); }
};

/// Evaluates every ledger column against the comparator. Implicit traces are
/// accounted with f_t = <g_t, .> and their psi_t, so the composite regret is
/// the regret on the original losses.
Ledger build_ledger(const Trace& trace, const LossSequence& seq, const Point& x_star);

struct BoundInputs {
  Point x_star;
  double G = std::numeric_limits<double>::quiet_NaN();
  double R = std::numeric_limits<double>::quiet_NaN();
  double L = 0.0;
  double tau = 1.0;
  std::optional<double> D_variation;
  std::vector<double> variation_per_round;
  bool variation_exact = true;
  double D_init = 0.0;            // f(x_1) - inf f
  bool smooth_certified = false;  // f_t L-smooth
  bool stochastic = false;
};

struct BoundReport {
  std::string name;
  double value = 0.0;
  double empirical = 0.0;
  double slack = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  std::vector<std::string> flags;
  std::string estimate_quality = "exact";
  bool certified = true;
};

nlohmann::json to_json(const BoundReport& r);

double empirical_regret(const Ledger& ledger, bool composite = false);
double forward_regret(const Ledger& ledger);
double decomposition_residual(const Ledger& ledger);

BoundReport bound_forward_ftrl(const Ledger& ledger);
BoundReport bound_forward_md(const Ledger& ledger);
/// Dispatches on the ledger's algorithm.
BoundReport bound_forward(const Ledger& ledger);

enum class BoundCase { OoFtrl, OoMd, OoMdStrong, SoFtrl, SoMd, SoMdStrong, SmoothSoFtrl, SmoothSoMd, SmoothSoMdStrong };
std::string to_string(BoundCase c);
BoundCase parse_bound_case(const std::string& s);
/// drop_final_q evaluates the q_T = 0 variant.
BoundReport bound_case(const Ledger& ledger, const BoundInputs& in, BoundCase c, bool drop_final_q = false);

BoundReport bound_ao(const Ledger& ledger, const BoundInputs& in);
BoundReport bound_variational_smooth(const Ledger& ledger, const BoundInputs& in);
BoundReport bound_final_attack(const Ledger& ledger, const BoundInputs& in);

/// sum_t <g_t, x_t - x*> + delta_t, optionally minus sum_t B_r(x*, x_t).
BoundReport linearized_bound(const Ledger& ledger);
BoundReport linearized_bound_strong(const Ledger& ledger, const Regularizer& r);
BoundReport scale_tau(const BoundReport& report, double tau);

/// (sum_t a_t / sqrt(a_{1:t}), 2 sqrt(a_{1:T}))
std::pair<double, double> sum_sqrt_check(const std::vector<double>& a);

struct SeedAggregate {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};
SeedAggregate aggregate(const std::vector<double>& values);

/// Best fixed feasible point for sum_t f_t: exact for linear, quadratic and
/// common-minimizer sequences, projected subgradient otherwise. l1 adds the
/// composite term l1*||x||_1 per round.
Point offline_best(const LossSequence& seq, const FeasibleSet& set, double tol = 1e-8, double l1 = 0.0);

/// Fixed-column CSV. cum_bound is the generic forward bound plus the
/// decomposition remainder, prefix by prefix.
void write_csv(std::ostream& os, const Ledger& ledger);
std::vector<std::string> csv_header(Index dim);

}  // namespace adaopt
