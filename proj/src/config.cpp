#include "adaopt/config.hpp"

#include "adaopt/regret.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace adaopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

double num(const json& j, const char* key, double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) fail(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::string str(const json& j, const char* key, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) fail(std::string("field '") + key + "' must be a string");
  return j[key].get<std::string>();
}

Point vec_or_scalar(const json& j, const char* key, Index d, double def) {
  if (!j.contains(key)) return Point::Constant(d, def);
  if (j[key].is_number()) return Point::Constant(d, j[key].get<double>());
  Point p = json_point(j[key], key);
  if (p.size() != d) fail(std::string("field '") + key + "' has the wrong dimension");
  return p;
}

Point random_center(const json& j, Index d, Rng& rng) {
  if (j.contains("center")) return vec_or_scalar(j, "center", d, 0.0);
  const double s = num(j, "center_scale", 0.0);
  std::uniform_real_distribution<double> u(-s, s);
  Point c(d);
  for (Index i = 0; i < d; ++i) c[i] = s > 0.0 ? u(rng) : 0.0;
  return c;
}

Point random_direction(Index d, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Point v(d);
  for (;;) {
    for (Index i = 0; i < d; ++i) v[i] = n(rng);
    const double nv = v.norm();
    if (nv > 0.0) return v / nv;
  }
}

const std::set<std::string> kTopKeys{"name", "T", "seeds", "set", "learner", "losses", "comparator", "bounds", "out", "sweep"};

}  // namespace

Point json_point(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string("field '") + what + "' must be an array of numbers");
  Point p(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(std::string("field '") + what + "' must be an array of numbers");
    p[static_cast<Index>(i)] = j[i].get<double>();
  }
  return p;
}

FeasibleSet make_set(const json& j) {
  if (!j.is_object()) fail("'set' must be an object");
  const std::string kind = str(j, "kind", "");
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long>() < 1) fail("'set.dim' must be a positive integer");
  const Index d = j["dim"].get<Index>();
  try {
    if (kind == "unconstrained") return FeasibleSet::unconstrained(d);
    if (kind == "box") return FeasibleSet::box(vec_or_scalar(j, "lo", d, -1.0), vec_or_scalar(j, "hi", d, 1.0));
    if (kind == "ball") {
      const Point c = vec_or_scalar(j, "center", d, 0.0);
      return FeasibleSet::ball(c, num(j, "radius", 1.0));
    }
    if (kind == "simplex") return FeasibleSet::simplex(d, num(j, "scale", 1.0));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    fail(std::string("invalid set: ") + e.what());
  }
  fail("unknown set kind '" + kind + "'");
}

LearnerConfig make_learner_config(const json& j, const FeasibleSet& set) {
  if (!j.is_object()) fail("'learner' must be an object");
  LearnerConfig c;
  c.set = set;
  try {
    c.preset = parse_preset(str(j, "preset", "ogd"));
    c.schedule = parse_schedule(str(j, "schedule", "default"));
    const std::string hints = str(j, "hints", "none");
    c.hints = hints == "perfect" ? HintPolicy::Custom : parse_hint_policy(hints);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  c.eta = num(j, "eta", 1.0);
  if (!(c.eta > 0.0)) fail("learner.eta must be > 0");
  c.gamma = num(j, "gamma", 0.0);
  c.R = num(j, "R", std::numeric_limits<double>::quiet_NaN());
  c.L = num(j, "L", 0.0);
  c.mu = num(j, "mu", 0.0);
  c.smooth_L = num(j, "smooth_L", 0.0);
  if (j.contains("x1")) c.x1 = json_point(j["x1"], "learner.x1");
  if (j.contains("composite")) {
    const json& cj = j["composite"];
    c.composite_alpha = num(cj, "alpha", 0.0);
    const std::string s = str(cj, "setting", "revealed-after");
    if (s == "known-before") {
      c.composite_setting = CompositeSetting::KnownBefore;
    } else if (s == "revealed-after") {
      c.composite_setting = CompositeSetting::RevealedAfter;
    } else {
      fail("unknown composite setting '" + s + "'");
    }
  }
  if (j.contains("solver")) {
    c.solver.tol = num(j["solver"], "tol", c.solver.tol);
    c.solver.max_iter = static_cast<int>(num(j["solver"], "max_iter", c.solver.max_iter));
  }
  if (c.hints == HintPolicy::Custom) {
    // placeholder; the experiment installs the stream
    c.hint_stream = [d = set.dim()](int) { return Point(Point::Zero(d)); };
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    fail(std::string("invalid learner: ") + e.what());
  }
  return c;
}

LossSequence make_losses(const json& j, Index d, int T, Rng& rng) {
  if (!j.is_object()) fail("'losses' must be an object");
  const std::string kind = str(j, "kind", "");
  const double sigma = num(j, "sigma", 0.0);
  if (!(sigma >= 0.0)) fail("losses.sigma must be >= 0");
  const std::string noise = str(j, "noise", "gaussian");
  NoiseModel model;
  if (noise == "gaussian") {
    model = NoiseModel::Gaussian;
  } else if (noise == "uniform") {
    model = NoiseModel::Uniform;
  } else {
    fail("unknown noise model '" + noise + "'");
  }
  auto single = [&](const Loss& f) {
    return sigma > 0.0 ? LossSequence::stochastic(f, T, sigma, model) : LossSequence::fixed(f, T);
  };

  if (kind == "linear-random") {
    const double G = num(j, "G", 1.0);
    const Point bias = vec_or_scalar(j, "bias", d, 0.0);
    std::vector<Point> gs;
    gs.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) gs.push_back(bias + G * random_direction(d, rng));
    return LossSequence::adversarial_linear(gs);
  }
  if (kind == "linear-fixed") return LossSequence::adversarial_linear(std::vector<Point>(static_cast<std::size_t>(T), vec_or_scalar(j, "g", d, 1.0)));
  if (kind == "linear-piecewise") {
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) fail("losses.values must be a non-empty array");
    std::vector<Point> vals;
    for (const auto& v : j["values"]) {
      vals.push_back(json_point(v, "losses.values"));
      if (vals.back().size() != d) fail("losses.values entries have the wrong dimension");
    }
    const int switches = static_cast<int>(num(j, "switches", static_cast<double>(vals.size() - 1)));
    if (switches < 0 || switches >= T) fail("losses.switches must lie in [0, T)");
    std::vector<Point> gs;
    gs.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      const int seg = static_cast<int>(static_cast<long>(t) * (switches + 1) / T);
      gs.push_back(vals[static_cast<std::size_t>(seg) % vals.size()]);
    }
    return LossSequence::adversarial_linear(gs);
  }
  if (kind == "quadratic") return single(losses::quadratic(random_center(j, d, rng), num(j, "mu", 1.0)));
  if (kind == "drifting-quadratic") {
    const double step = num(j, "drift", 0.0);
    Point c = random_center(j, d, rng);
    std::vector<Point> cs;
    for (int t = 0; t < T; ++t) {
      cs.push_back(c);
      if (step > 0.0) c += step * random_direction(d, rng);
    }
    return LossSequence::drifting_quadratic(cs, num(j, "mu", 1.0));
  }
  if (kind == "abs") return single(losses::abs_l1(random_center(j, d, rng), num(j, "w", 1.0)));
  if (kind == "huber") return single(losses::huber(random_center(j, d, rng), num(j, "delta", 1.0)));
  if (kind == "star-piecewise") return single(losses::star_piecewise(random_center(j, d, rng)));
  if (kind == "sqrt-abs") return single(losses::sqrt_abs(random_center(j, d, rng)));
  if (kind == "pl-sine") return single(losses::pl_sine(random_center(j, d, rng)));
  if (kind == "product-power") return single(losses::product_power(vec_or_scalar(j, "p", d, 1.0)));
  fail("unknown loss kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kTopKeys.count(k)) fail("unknown field '" + k + "'");
  }
  ExperimentConfig c;
  c.raw = j;
  c.name = str(j, "name", "");
  if (c.name.empty()) fail("'name' is required");
  if (!j.contains("T") || !j["T"].is_number_integer() || j["T"].get<long>() < 1) fail("'T' must be a positive integer");
  c.T = j["T"].get<int>();
  if (!j.contains("set")) fail("'set' is required");
  if (!j.contains("learner")) fail("'learner' is required");
  if (!j.contains("losses")) fail("'losses' is required");
  c.set = j["set"];
  c.learner = j["learner"];
  c.losses = j["losses"];

  const FeasibleSet set = make_set(c.set);
  const LearnerConfig lc = make_learner_config(c.learner, set);
  (void)lc;
  {
    Rng probe(0);
    const LossSequence seq = make_losses(c.losses, set.dim(), c.T, probe);
    if (j.contains("seeds")) {
      if (!j["seeds"].is_array() || j["seeds"].empty()) fail("'seeds' must be a non-empty array");
      for (const auto& s : j["seeds"]) {
        if (!s.is_number_integer() || s.get<long long>() < 0) fail("'seeds' entries must be non-negative integers");
        c.seeds.push_back(s.get<std::uint64_t>());
      }
    } else if (seq.stochastic()) {
      fail("'seeds' is required for stochastic configs");
    } else {
      c.seeds = {1};
    }
  }

  if (j.contains("comparator")) {
    const json& cj = j["comparator"];
    if (cj.is_string()) {
      if (cj.get<std::string>() != "offline-best") fail("comparator must be \"offline-best\" or a point");
    } else {
      c.comparator = json_point(cj, "comparator");
      if (c.comparator->size() != set.dim()) fail("comparator has the wrong dimension");
      if (!set.contains(*c.comparator)) fail("comparator is not feasible");
    }
  }
  if (j.contains("bounds")) {
    if (!j["bounds"].is_array()) fail("'bounds' must be an array");
    static const std::set<std::string> extra{"forward", "ao", "variational-smooth", "final-attack", "linearized", "linearized-tau"};
    for (const auto& b : j["bounds"]) {
      if (!b.is_string()) fail("'bounds' entries must be strings");
      const std::string s = b.get<std::string>();
      if (!extra.count(s)) {
        try {
          parse_bound_case(s.size() > 7 && s.ends_with("/q_T=0") ? s.substr(0, s.size() - 6) : s);
        } catch (const std::invalid_argument& e) {
          fail(e.what());
        }
      }
      c.bounds.push_back(s);
    }
  } else {
    c.bounds = {"forward"};
  }
  c.out_dir = str(j, "out", "out/" + c.name);
  if (j.contains("sweep")) {
    if (!j["sweep"].is_object()) fail("'sweep' must be an object of axis -> values");
    for (const auto& [k, v] : j["sweep"].items()) {
      if (!v.is_array() || v.empty()) fail("sweep axis '" + k + "' needs a non-empty array");
      SweepAxis ax;
      ax.path = k;
      for (const auto& e : v) ax.values.push_back(e);
      c.sweep.push_back(std::move(ax));
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig with_override(const ExperimentConfig& c, const std::string& path, const json& value) {
  json j = c.raw;
  j.erase("sweep");
  json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) fail("empty sweep path");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) fail("sweep path '" + path + "' does not exist");
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
  return parse_config(j);
}

}  // namespace adaopt
