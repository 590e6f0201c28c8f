#include "adaopt/experiment.hpp"
#include "adaopt/verify.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace adaopt;
using nlohmann::json;

namespace {
std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json base() {
  return json::parse(R"({
    "name": "t",
    "T": 50,
    "set": {"kind": "ball", "dim": 3, "radius": 1.0},
    "learner": {"preset": "ogd", "eta": 0.2},
    "losses": {"kind": "linear-random", "G": 1.0},
    "bounds": ["forward", "oo-ftrl"]
  })");
}

std::string tmpdir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("adaopt-test-" + name);
  std::filesystem::remove_all(p);
  return p.string();
}
}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(parse_config(base()));
  auto j = base();
  j["learner"]["eta"] = 0.0;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base();
  j["learner"]["eta"] = -1.0;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base();
  j["bogus"] = 1;
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base();
  j["losses"] = {{"kind", "quadratic"}, {"sigma", 0.5}};
  CHECK_THROWS_WITH(parse_config(j), doctest::Contains("seeds"));
  j["seeds"] = {1, 2};
  CHECK_NOTHROW(parse_config(j));
  j = base();
  j["comparator"] = {5.0, 0.0, 0.0};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base();
  j["bounds"] = {"table-9"};
  CHECK_THROWS_AS(parse_config(j), ConfigError);
  j = base();
  j["set"]["kind"] = "cube";
  CHECK_THROWS_AS(parse_config(j), ConfigError);
}

TEST_CASE("ogd-linear example config") {
  ExperimentConfig c = load_config(std::string(ADAOPT_SOURCE_DIR) + "/configs/ogd-linear.json");
  c.out_dir = tmpdir("ogd");
  run_experiment(c, 1, true);
  std::ifstream in(c.out_dir + "/seed-1.csv");
  std::string header;
  std::getline(in, header);
  std::vector<std::string> cols;
  {
    std::stringstream hs(header);
    for (std::string s; std::getline(hs, s, ',');) cols.push_back(s);
  }
  std::vector<std::string> last;
  int rows = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    last.clear();
    std::stringstream ls(line);
    for (std::string s; std::getline(ls, s, ',');) last.push_back(s);
  }
  CHECK(rows == 100);
  const auto col = [&](const std::string& n) {
    return std::stod(last[static_cast<std::size_t>(std::find(cols.begin(), cols.end(), n) - cols.begin())]);
  };
  CHECK(col("cum_regret") <= col("cum_bound"));
  const json rep = json::parse(slurp(c.out_dir + "/report.json"));
  CHECK(rep["summary"]["bounds"]["oo-ftrl"]["holds"].get<bool>());
}

TEST_CASE("runs are byte-identical") {
  auto j = base();
  j["losses"] = {{"kind", "huber"}, {"delta", 0.5}, {"sigma", 0.3}};
  j["seeds"] = {3, 4, 5};
  j["bounds"] = {"forward", "so-ftrl"};
  ExperimentConfig c = parse_config(j);
  c.out_dir = tmpdir("det-a");
  run_experiment(c, 2, true);
  ExperimentConfig d = c;
  d.out_dir = tmpdir("det-b");
  run_experiment(d, 1, true);
  for (const char* f : {"seed-3.csv", "seed-4.csv", "seed-5.csv", "report.json"})
    CHECK(slurp(c.out_dir + "/" + f) == slurp(d.out_dir + "/" + f));
}

TEST_CASE("replay recomputes every csv row") {
  auto j = base();
  j["learner"] = {{"preset", "ftrl-prox"}, {"gamma", 0.1}};
  ExperimentConfig c = parse_config(j);
  c.out_dir = tmpdir("replay");
  run_experiment(c, 1, true);
  const ReplayResult r = replay(c, 1, c.out_dir + "/seed-1.csv");
  CHECK(r.ok);
  CHECK(r.rows == 50);

  std::string csv = slurp(c.out_dir + "/seed-1.csv");
  const auto pos = csv.find('\n', csv.find('\n') + 1) + 1;
  csv.insert(csv.find(',', pos) + 1, "9");
  std::ofstream(c.out_dir + "/seed-1.csv") << csv;
  CHECK_FALSE(replay(c, 1, c.out_dir + "/seed-1.csv").ok);
}

TEST_CASE("sweep produces one row per cell") {
  auto j = base();
  j["sweep"] = {{"T", {20, 40, 80}}};
  ExperimentConfig c = parse_config(j);
  const auto rows = run_sweep(c, 1, false);
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].T == 80);
  CHECK(rows[1].ratio == doctest::Approx(rows[1].regret_mean / rows[0].regret_mean));
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("T,regret_mean,regret_se,bound_mean,ratio\n", 0) == 0);
}

TEST_CASE("override paths") {
  const ExperimentConfig c = parse_config(base());
  CHECK(with_override(c, "learner.eta", 0.7).learner["eta"].get<double>() == 0.7);
  CHECK(with_override(c, "T", 7).T == 7);
  CHECK_THROWS_AS(with_override(c, "learner.nope.x", 1), ConfigError);
}

TEST_CASE("verify suites report per-property counts") {
  for (const auto& n : suite_names()) {
    if (n == "decomposition" || n == "bregman") continue;
    const SuiteResult r = verify_suite(n);
    CHECK_MESSAGE(r.ok(), r.to_json().dump());
    for (const auto& p : r.properties) CHECK(p.total > 0);
  }
  CHECK_THROWS(verify_suite("nope"));
}

TEST_CASE("random runs cover every variant") {
  Rng rng(1);
  for (int v = 0; v < kRandomVariants; ++v) {
    const RandomRun run = random_run(v, rng);
    Rng noise(2);
    const RunCheck rc = execute(run, noise);
    CHECK_MESSAGE(rc.residual <= 1e-8 * (1.0 + std::abs(rc.regret)), run.label);
    CHECK_MESSAGE(rc.forward_slack >= -1e-8, run.label);
  }
}
