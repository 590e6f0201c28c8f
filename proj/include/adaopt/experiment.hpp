#pragma once

#include "adaopt/config.hpp"
#include "adaopt/regret.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace adaopt {

/// Drives a learner over a loss sequence. Stochastic sequences draw g_t from
/// the oracle with noise_rng; `grads` (when given) replaces every g_t.
Trace simulate(const LearnerConfig& lc, const LossSequence& seq, int T, Rng& noise_rng,
               const std::vector<Point>* grads = nullptr);

/// Bound constants and certificates for a finished run.
BoundInputs make_bound_inputs(const LossSequence& seq, const FeasibleSet& set, const LearnerConfig& lc,
                              const Ledger& ledger, bool need_variation, Rng& rng);

/// Evaluates the named bounds ("forward", bound case names with an optional
/// "/q_T=0" suffix, "ao", "variational-smooth", "final-attack", "linearized",
/// "linearized-tau").
std::vector<BoundReport> evaluate_bounds(const std::vector<std::string>& names, const Ledger& ledger,
                                         const BoundInputs& in);

struct CellResult {
  std::uint64_t seed = 0;
  Ledger ledger;
  BoundInputs inputs;
  double regret = 0.0;
  double composite_regret = 0.0;
  double forward = 0.0;
  double residual = 0.0;
  long solver_calls = 0;
  std::vector<BoundReport> reports;
  std::string csv;
};

/// The learner config for one seed, with experiment-level hint streams installed.
LearnerConfig cell_learner(const ExperimentConfig& c, const LossSequence& seq);
LossSequence cell_losses(const ExperimentConfig& c, std::uint64_t seed);
CellResult run_cell(const ExperimentConfig& c, std::uint64_t seed);

struct ExperimentResult {
  std::vector<CellResult> cells;
  nlohmann::json report;
};

/// Runs every seed (jobs workers) and, when write is set, stores
/// seed-<s>.csv and report.json under out_dir.
ExperimentResult run_experiment(const ExperimentConfig& c, int jobs = 1, bool write = true);

struct SweepRow {
  std::vector<std::pair<std::string, nlohmann::json>> axes;
  int T = 0;
  double regret_mean = 0.0;
  double regret_se = 0.0;
  double bound_mean = 0.0;
  double ratio = 0.0;  // regret over the previous row's regret (0 for the first)
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& c, int jobs = 1, bool write = true);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct ReplayResult {
  bool ok = true;
  int rows = 0;
  std::string message;
};

/// Re-runs a seed from the (x_t, g_t) columns of its CSV and checks every row.
ReplayResult replay(const ExperimentConfig& c, std::uint64_t seed, const std::string& csv_path);

/// Atomic file write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace adaopt
