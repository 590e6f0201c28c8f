#pragma once

#include "adaopt/experiment.hpp"

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace adaopt {

struct PropertyResult {
  std::string name;
  int passed = 0;
  int total = 0;
  double worst = 0.0;  // largest margin recorded; meaning is per property
  std::string detail;

  bool ok() const { return passed == total; }
  void record(bool pass, double margin);
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyResult> properties;

  bool ok() const;
  nlohmann::json to_json() const;
};

std::vector<std::string> suite_names();

/// tol overrides the per-property tolerance when given (NaN keeps defaults).
SuiteResult verify_suite(const std::string& name, double tol = std::numeric_limits<double>::quiet_NaN(),
                         std::uint64_t seed = 20240601);

/// A small randomized run covering one learner variant.
struct RandomRun {
  std::string label;
  LearnerConfig lc;
  LossSequence seq;
  int T = 0;
  Point x_star;
};

constexpr int kRandomVariants = 16;

/// Variant index % kRandomVariants, parameters drawn from rng.
RandomRun random_run(int index, Rng& rng);

struct RunCheck {
  std::string label;
  Ledger ledger;
  double regret = 0.0;
  double residual = 0.0;
  double forward_slack = 0.0;
  long solver_calls = 0;
};

RunCheck execute(const RandomRun& run, Rng& noise);

}  // namespace adaopt
