#pragma once

#include "adaopt/learner.hpp"
#include "adaopt/losses.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace adaopt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One sweep axis: a dotted path into the config ("T", "losses.sigma") and
/// the values it takes.
struct SweepAxis {
  std::string path;
  std::vector<nlohmann::json> values;
};

struct ExperimentConfig {
  std::string name;
  int T = 0;
  std::vector<std::uint64_t> seeds;
  nlohmann::json set;
  nlohmann::json learner;
  nlohmann::json losses;
  std::optional<Point> comparator;  // offline best when empty
  std::vector<std::string> bounds;
  std::string out_dir;
  std::vector<SweepAxis> sweep;
  nlohmann::json raw;
};

/// Schema validation; throws ConfigError naming the offending field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// The config with one field replaced (sweeps).
ExperimentConfig with_override(const ExperimentConfig& c, const std::string& path, const nlohmann::json& value);

FeasibleSet make_set(const nlohmann::json& j);
LearnerConfig make_learner_config(const nlohmann::json& j, const FeasibleSet& set);
/// Data drawn from rng (centers, random gradients).
LossSequence make_losses(const nlohmann::json& j, Index dim, int T, Rng& rng);

Point json_point(const nlohmann::json& j, const char* what);

}  // namespace adaopt
