#include "adaopt/schedules.hpp"

namespace adaopt {

Metric adagrad_initial_metric(Index dim, double eta, double gamma0) {
  if (!(eta > 0.0)) throw DomainError("adagrad: eta must be > 0");
  if (!(gamma0 >= 0.0)) throw DomainError("adagrad: gamma0 must be >= 0");
  return Metric::scaled_identity(dim, std::sqrt(gamma0) / eta);
}

MetricStep adagrad_diag_step(ScheduleState& state, const Point& g, double eta, double gamma0) {
  if (!(eta > 0.0)) throw DomainError("adagrad_diag_step: eta must be > 0");
  if (!(gamma0 >= 0.0)) throw DomainError("adagrad_diag_step: gamma0 must be >= 0");
  if (state.accum_diag.size() == 0) state.accum_diag = Point::Zero(g.size());
  require_same_dim(state.accum_diag.size(), g.size(), "adagrad_diag_step");
  state.accum_diag += g.cwiseAbs2();
  ++state.round;
  const Metric cum = Metric::diagonal((state.accum_diag.array() + gamma0).sqrt().matrix() / eta);
  const Metric prev = state.cumulative ? *state.cumulative : Metric::zero(g.size());
  Metric inc = difference(cum, prev);
  state.cumulative = cum;
  return {std::move(inc), cum};
}

Matrix psd_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw DomainError("psd_sqrt: eigensolver failed");
  const Point ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

MetricStep adagrad_full_step(ScheduleState& state, const Point& g, double eta, double gamma0) {
  if (!(eta > 0.0)) throw DomainError("adagrad_full_step: eta must be > 0");
  if (!(gamma0 >= 0.0)) throw DomainError("adagrad_full_step: gamma0 must be >= 0");
  const Index d = g.size();
  if (d > 256) throw DimensionError("adagrad_full_step: dimension above 256");
  if (state.accum_full.size() == 0) state.accum_full = Matrix::Zero(d, d);
  require_same_dim(state.accum_full.rows(), d, "adagrad_full_step");
  state.accum_full += g * g.transpose();
  ++state.round;
  const Matrix root = psd_sqrt(state.accum_full + gamma0 * Matrix::Identity(d, d)) / eta;
  const Metric cum = Metric::full(root);
  const Metric prev = state.cumulative ? *state.cumulative : Metric::zero(d);
  Metric inc = difference(cum, prev);
  state.cumulative = cum;
  return {std::move(inc), cum};
}

Regularizer ftrl_prox_increment(const Point& x_t, const Metric& metric_increment) {
  if (metric_increment.is_zero()) return Regularizer::zero();
  return Regularizer::quadratic(x_t, metric_increment, 1.0);
}

Regularizer optimistic_shift(const Regularizer& q_tilde, const Point& hint_prev, const Point& hint_next) {
  require_same_dim(hint_prev.size(), hint_next.size(), "optimistic_shift");
  const Point diff = hint_next - hint_prev;
  if (diff.squaredNorm() == 0.0) return q_tilde;
  return q_tilde + Regularizer::linear(diff, 0.0);
}

namespace {

double accumulate_hint_error(ScheduleState& state, const Point& g, const Point& hint) {
  require_same_dim(g.size(), hint.size(), "hint error");
  state.accum_hint_err += (g - hint).squaredNorm();
  ++state.round;
  return state.accum_hint_err;
}

}  // namespace

double scale_free_eta(ScheduleState& state, const Point& g, const Point& hint, double eta0) {
  if (!(eta0 > 0.0)) throw DomainError("scale_free_eta: eta0 must be > 0");
  const double acc = accumulate_hint_error(state, g, hint);
  const double eta = std::max(state.eta_prev, eta0 * std::sqrt(acc));
  state.eta_prev = eta;
  return eta;
}

double final_attack_eta(ScheduleState& state, const Point& g, const Point& hint, double R, double L) {
  if (!std::isfinite(R) || !(R > 0.0)) throw DomainError("final_attack_eta: R must be finite and > 0");
  if (!(L >= 0.0)) throw DomainError("final_attack_eta: L must be >= 0");
  const double acc = accumulate_hint_error(state, g, hint);
  const double eta = std::max(state.eta_prev, 4.0 * R * L * L + (2.0 / R) * std::sqrt(acc));
  state.eta_prev = eta;
  return eta;
}

Regularizer composite_wrap(const Regularizer& q_tilde, std::span<const Regularizer> psis,
                           CompositeSetting setting, int t) {
  // psi index k (1-based) lives at psis[k - 1]
  const int k = setting == CompositeSetting::KnownBefore ? t + 1 : t;
  if (k < 1 || k > static_cast<int>(psis.size())) return q_tilde;
  const Regularizer& psi = psis[static_cast<std::size_t>(k - 1)];
  if (psi.is_zero()) return q_tilde;
  return q_tilde + psi;
}

bool validate_psi_sequence(std::span<const Regularizer> psis, const Point& x1,
                           const std::vector<Point>& probes) {
  constexpr double tol = 1e-12;
  if (psis.empty()) return true;
  if (std::abs(psis[0].value(x1)) > tol) return false;
  for (const Point& p : probes) {
    for (std::size_t k = 0; k < psis.size(); ++k) {
      const double cur = psis[k].value(p);
      const double next = k + 1 < psis.size() ? psis[k + 1].value(p) : 0.0;
      if (cur < -tol || next < -tol) return false;
      if (cur + tol * (1.0 + std::abs(cur)) < next) return false;
    }
  }
  return true;
}

}  // namespace adaopt
