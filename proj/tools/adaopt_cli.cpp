#include "adaopt/experiment.hpp"
#include "adaopt/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <limits>

using namespace adaopt;
using nlohmann::json;

namespace {

int fail(const std::string& kind, const std::string& message) {
  json e = {{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << e.dump() << "\n";
  return 2;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const SolverError*>(&e)) return "solver";
  if (dynamic_cast<const BoundError*>(&e)) return "certificate";
  if (dynamic_cast<const LearnerError*>(&e)) return "learner";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
  return "runtime";
}

bool all_hold(const json& report) {
  if (!report.contains("summary") || !report["summary"].contains("bounds")) return true;
  for (const auto& [name, b] : report["summary"]["bounds"].items())
    if (!b.value("holds", true)) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive FTRL / mirror descent experiments and regret accounting"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out;
  int jobs = 1;
  double tol = std::numeric_limits<double>::quiet_NaN();
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "tolerance override for verify suites")->check(CLI::PositiveNumber);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run every seed of a config");
  run->add_option("config", config_path, "config JSON")->required();

  auto* sweep = app.add_subcommand("sweep", "run the grid axes of a config");
  sweep->add_option("config", config_path, "config JSON")->required();

  std::string suite;
  std::uint64_t vseed = 20240601;
  auto* verify = app.add_subcommand("verify", "property suites");
  verify->add_option("suite", suite, "suite name or 'all'")->required();
  verify->add_option("--seed", vseed, "rng seed");

  std::uint64_t rseed = 1;
  std::string csv_path;
  auto* rep = app.add_subcommand("replay", "recompute a seed CSV from its x_t, g_t columns");
  rep->add_option("config", config_path, "config JSON")->required();
  rep->add_option("--seed", rseed, "seed of the CSV")->required();
  rep->add_option("--csv", csv_path, "CSV path (default <out>/seed-<s>.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      std::vector<std::string> names = suite == "all" ? suite_names() : std::vector<std::string>{suite};
      bool ok = true;
      json all = json::array();
      for (const auto& n : names) {
        SuiteResult r = verify_suite(n, tol, vseed);
        ok = ok && r.ok();
        all.push_back(r.to_json());
      }
      std::cout << (names.size() == 1 ? all[0] : all).dump(2) << "\n";
      return ok ? 0 : 1;
    }

    ExperimentConfig c = load_config(config_path);
    if (!out.empty()) c.out_dir = out;

    if (*run) {
      ExperimentResult r = run_experiment(c, jobs, true);
      std::cout << r.report["summary"].dump(2) << "\n";
      return all_hold(r.report) ? 0 : 1;
    }
    if (*sweep) {
      auto rows = run_sweep(c, jobs, true);
      std::cout << sweep_csv(rows);
      return 0;
    }
    if (*rep) {
      if (csv_path.empty()) csv_path = c.out_dir + "/seed-" + std::to_string(rseed) + ".csv";
      ReplayResult r = replay(c, rseed, csv_path);
      json j = {{"ok", r.ok}, {"rows", r.rows}, {"message", r.message}};
      std::cout << j.dump() << "\n";
      return r.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    return fail(error_kind(e), e.what());
  }
  return 0;
}
