#pragma once

#include "adaopt/regularizer.hpp"

#include <span>
#include <vector>

namespace adaopt {

/// Running accumulators for the adaptive schedules. Single owner.
struct ScheduleState {
  Point accum_diag;      // sum_s g_s^2 per coordinate
  Matrix accum_full;     // sum_s g_s g_s^T
  double accum_hint_err = 0.0;  // sum_s ||g_s - hint_s||_*^2
  double eta_prev = 0.0;
  int round = 0;
  std::optional<Metric> cumulative;  // last cumulative metric
};

struct MetricStep {
  Metric increment;
  Metric cumulative;
};

/// (1/eta) diag sqrt(gamma0) : the t = 0 metric of dual-averaging AdaGrad.
Metric adagrad_initial_metric(Index dim, double eta, double gamma0);

/// Diagonal AdaGrad. The cumulative metric is (1/eta) diag sqrt(gamma0 + sum g^2)
/// and the increment is its change over this round. When the state has no
/// prior cumulative metric the increment is taken from zero.
MetricStep adagrad_diag_step(ScheduleState& state, const Point& g, double eta, double gamma0);

/// Full-matrix AdaGrad, (1/eta)(gamma0 I + sum g g^T)^{1/2}. Guarded to d <= 256.
MetricStep adagrad_full_step(ScheduleState& state, const Point& g, double eta, double gamma0);

/// Symmetric PSD square root.
Matrix psd_sqrt(const Matrix& a);

/// 0.5 ||x - x_t||^2_inc; zero regularizer for a zero increment.
Regularizer ftrl_prox_increment(const Point& x_t, const Metric& metric_increment);

/// q_tilde + <hint_next - hint_prev, .>
Regularizer optimistic_shift(const Regularizer& q_tilde, const Point& hint_prev, const Point& hint_next);

/// eta_t = eta0 * sqrt(sum_s ||g_s - hint_s||^2); updates the state.
double scale_free_eta(ScheduleState& state, const Point& g, const Point& hint, double eta0);

/// eta_t = 4 R L^2 + (2/R) sqrt(sum_s ||g_s - hint_s||^2); updates the state.
double final_attack_eta(ScheduleState& state, const Point& g, const Point& hint, double R, double L);

enum class CompositeSetting { KnownBefore, RevealedAfter };

/// q_t for a composite run. psis[k] holds psi_{k+1}; indices past the end are
/// treated as the zero function (psi_{T+1} = 0).
Regularizer composite_wrap(const Regularizer& q_tilde, std::span<const Regularizer> psis,
                           CompositeSetting setting, int t);

/// psi_1(x1) = 0 and psi_t >= psi_{t+1} >= 0 on every probe.
bool validate_psi_sequence(std::span<const Regularizer> psis, const Point& x1,
                           const std::vector<Point>& probes);

}  // namespace adaopt
