#include "adaopt/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace adaopt {

using nlohmann::json;

namespace {

constexpr std::uint64_t kNoiseSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kProbeSalt = 0xc2b2ae3d27d4eb4fULL;
constexpr int kVariationProbes = 64;
constexpr int kSmoothProbes = 16;

std::vector<const Loss*> distinct_losses(const LossSequence& seq) {
  std::vector<const Loss*> out;
  for (const Loss& f : seq.losses()) {
    if (!out.empty() && out.back()->same_function(f)) continue;
    out.push_back(&f);
  }
  return out;
}

// so-* and smooth-so-* bound the expected regret; the rest hold per path
bool in_expectation(const std::string& name) {
  return name.rfind("so-", 0) == 0 || name.rfind("smooth-so-", 0) == 0;
}

bool holds(const std::vector<const BoundReport*>& reps, bool expectation) {
  if (reps.empty()) return true;
  if (expectation) {
    std::vector<double> emp;
    double val = 0.0;
    for (const auto* r : reps) {
      emp.push_back(r->empirical);
      val += r->value;
    }
    const SeedAggregate a = aggregate(emp);
    return a.mean + 2.0 * a.se <= val / static_cast<double>(reps.size());
  }
  for (const auto* r : reps) {
    if (r->empirical > r->value + 1e-6 * std::abs(r->value) + 1e-8) return false;
  }
  return true;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

Trace simulate(const LearnerConfig& lc, const LossSequence& seq, int T, Rng& noise_rng, const std::vector<Point>* grads) {
  if (seq.rounds() < T) throw ConfigError("loss sequence shorter than the horizon");
  if (grads && static_cast<int>(grads->size()) < T) throw ConfigError("replay gradients shorter than the horizon");
  Learner learner(lc, T);
  for (int t = 1; t <= T; ++t) {
    const Loss& f = seq.loss(t);
    const Point& x = learner.current();
    Point g;
    if (grads) {
      g = (*grads)[static_cast<std::size_t>(t - 1)];
    } else if (seq.stochastic()) {
      g = stochastic_gradient(seq, t, x, noise_rng).g;
    } else {
      g = f.gradient(x);
    }
    learner.step(g, &f);
  }
  return learner.release_trace();
}

BoundInputs make_bound_inputs(const LossSequence& seq, const FeasibleSet& set, const LearnerConfig& lc,
                              const Ledger& ledger, bool need_variation, Rng& rng) {
  BoundInputs in;
  in.x_star = ledger.x_star;
  in.R = std::isnan(lc.R) ? set.diameter() : lc.R;
  in.stochastic = seq.stochastic();
  double G = 0.0;
  for (const RoundRecord& r : ledger.rounds) G = std::max(G, r.g.norm());
  in.G = G;

  const auto fs = distinct_losses(seq);
  bool smooth = !fs.empty();
  double Lmax = 0.0;
  for (const Loss* f : fs) {
    const auto& m = f->meta();
    smooth = smooth && m.differentiable && m.convex && m.smoothness.has_value();
    if (m.smoothness) Lmax = std::max(Lmax, *m.smoothness);
  }
  in.L = lc.effective_schedule() == ScheduleKind::FinalAttack ? lc.L : Lmax;
  if (smooth) {
    const auto probes = make_probes(set, kSmoothProbes, rng);
    bool ok = true;
    for (const Loss* f : fs) ok = ok && certify_smooth(*f, Lmax, probes);
    in.smooth_certified = ok;
  }
  if (!fs.empty()) in.tau = fs.front()->meta().tau.value_or(1.0);
  if ((seq.kind() == LossSequence::Kind::Fixed || seq.kind() == LossSequence::Kind::Stochastic) && seq.rounds() > 0) {
    const Loss& f = seq.loss(1);
    const Point best = offline_best(seq, set);
    in.D_init = std::max(0.0, f.value(ledger.x1) - f.value(best));
  }
  if (need_variation) {
    const VariationEstimate v = variation_estimate(seq, set, kVariationProbes, rng);
    in.variation_per_round = v.per_round;
    in.D_variation = v.total;
    in.variation_exact = v.exact;
  }
  return in;
}

std::vector<BoundReport> evaluate_bounds(const std::vector<std::string>& names, const Ledger& ledger,
                                         const BoundInputs& in) {
  std::vector<BoundReport> out;
  for (const std::string& n : names) {
    if (n == "forward") {
      out.push_back(bound_forward(ledger));
    } else if (n == "ao") {
      out.push_back(bound_ao(ledger, in));
    } else if (n == "variational-smooth") {
      out.push_back(bound_variational_smooth(ledger, in));
    } else if (n == "final-attack") {
      out.push_back(bound_final_attack(ledger, in));
    } else if (n == "linearized") {
      out.push_back(linearized_bound(ledger));
    } else if (n == "linearized-tau") {
      out.push_back(scale_tau(linearized_bound(ledger), in.tau));
    } else if (n.ends_with("/q_T=0")) {
      out.push_back(bound_case(ledger, in, parse_bound_case(n.substr(0, n.size() - 6)), true));
    } else {
      out.push_back(bound_case(ledger, in, parse_bound_case(n), false));
    }
    out.back().name = n;
  }
  return out;
}

LossSequence cell_losses(const ExperimentConfig& c, std::uint64_t seed) {
  Rng data(seed);
  return make_losses(c.losses, make_set(c.set).dim(), c.T, data);
}

LearnerConfig cell_learner(const ExperimentConfig& c, const LossSequence& seq) {
  const FeasibleSet set = make_set(c.set);
  LearnerConfig lc = make_learner_config(c.learner, set);
  if (c.learner.value("hints", std::string("none")) == "perfect") {
    if (!seq.all_linear()) throw ConfigError("perfect hints need a linear loss sequence");
    const int T = seq.rounds();
    const Index d = set.dim();
    lc.hint_stream = [seq, T, d](int t) -> Point {
      if (t < 1 || t > T) return Point::Zero(d);
      return seq.loss(t).meta().linear_coef;
    };
  }
  return lc;
}

CellResult run_cell(const ExperimentConfig& c, std::uint64_t seed) {
  const FeasibleSet set = make_set(c.set);
  const LossSequence seq = cell_losses(c, seed);
  const LearnerConfig lc = cell_learner(c, seq);
  Rng noise(seed ^ kNoiseSalt);
  const Trace tr = simulate(lc, seq, c.T, noise);
  const Point xs = c.comparator ? *c.comparator : offline_best(seq, set, 1e-8, lc.composite_alpha);

  CellResult res;
  res.seed = seed;
  res.ledger = build_ledger(tr, seq, xs);
  res.solver_calls = tr.solver_calls;
  bool need_var = false;
  for (const auto& b : c.bounds) need_var = need_var || b == "variational-smooth" || b == "final-attack";
  Rng probe(seed ^ kProbeSalt);
  res.inputs = make_bound_inputs(seq, set, lc, res.ledger, need_var, probe);
  res.regret = empirical_regret(res.ledger, false);
  res.composite_regret = empirical_regret(res.ledger, true);
  res.forward = forward_regret(res.ledger);
  res.residual = decomposition_residual(res.ledger);
  res.reports = evaluate_bounds(c.bounds, res.ledger, res.inputs);
  std::ostringstream os;
  write_csv(os, res.ledger);
  res.csv = os.str();
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& c, int jobs, bool write) {
  ExperimentResult out;
  const std::size_t n = c.seeds.size();
  out.cells.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out.cells[i] = run_cell(c, c.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int w = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (w == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const bool stochastic = cell_losses(c, c.seeds.front()).stochastic();
  json rep;
  rep["name"] = c.name;
  rep["T"] = c.T;
  rep["seeds"] = c.seeds;
  rep["stochastic"] = stochastic;
  json cells = json::array();
  std::vector<double> regrets;
  for (const CellResult& cell : out.cells) {
    json cj;
    cj["seed"] = cell.seed;
    cj["regret"] = cell.regret;
    cj["composite_regret"] = cell.composite_regret;
    cj["forward_regret"] = cell.forward;
    cj["decomposition_residual"] = cell.residual;
    cj["solver_calls"] = cell.solver_calls;
    json bs = json::array();
    for (const auto& r : cell.reports) bs.push_back(to_json(r));
    cj["bounds"] = bs;
    cells.push_back(cj);
    regrets.push_back(cell.ledger.composite ? cell.composite_regret : cell.regret);
  }
  rep["cells"] = cells;
  const SeedAggregate ra = aggregate(regrets);
  json summary;
  summary["regret"] = {{"mean", ra.mean}, {"se", ra.se}, {"n", ra.n}};
  json bsum = json::object();
  for (std::size_t b = 0; b < c.bounds.size(); ++b) {
    std::vector<const BoundReport*> reps;
    std::vector<double> vals;
    std::vector<double> emps;
    for (const CellResult& cell : out.cells) {
      reps.push_back(&cell.reports[b]);
      vals.push_back(cell.reports[b].value);
      emps.push_back(cell.reports[b].empirical);
    }
    const SeedAggregate va = aggregate(vals);
    const SeedAggregate ea = aggregate(emps);
    bsum[c.bounds[b]] = {{"mean_value", va.mean},
                         {"mean_empirical", ea.mean},
                         {"se_empirical", ea.se},
                         {"estimate_quality", reps.front()->estimate_quality},
                         {"holds", holds(reps, stochastic && in_expectation(c.bounds[b]))}};
  }
  summary["bounds"] = bsum;
  rep["summary"] = summary;
  out.report = rep;

  if (write) {
    for (const CellResult& cell : out.cells) {
      write_file_atomic(c.out_dir + "/seed-" + std::to_string(cell.seed) + ".csv", cell.csv);
    }
    write_file_atomic(c.out_dir + "/report.json", rep.dump(2) + "\n");
  }
  return out;
}

namespace {

void expand(const ExperimentConfig& base, std::size_t axis, ExperimentConfig cur,
            std::vector<std::pair<std::string, json>> vals, std::vector<std::pair<ExperimentConfig, decltype(vals)>>& out) {
  if (axis == base.sweep.size()) {
    out.emplace_back(std::move(cur), std::move(vals));
    return;
  }
  for (const json& v : base.sweep[axis].values) {
    ExperimentConfig next = with_override(cur, base.sweep[axis].path, v);
    auto nv = vals;
    nv.emplace_back(base.sweep[axis].path, v);
    expand(base, axis + 1, std::move(next), std::move(nv), out);
  }
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& c, int jobs, bool write) {
  if (c.sweep.empty()) throw ConfigError("sweep: config has no 'sweep' axes");
  std::vector<std::pair<ExperimentConfig, std::vector<std::pair<std::string, json>>>> cells;
  ExperimentConfig root = c;
  expand(c, 0, root, {}, cells);
  std::vector<SweepRow> rows;
  for (auto& [cfg, axes] : cells) {
    const ExperimentResult r = run_experiment(cfg, jobs, false);
    SweepRow row;
    row.axes = axes;
    row.T = cfg.T;
    row.regret_mean = r.report["summary"]["regret"]["mean"].get<double>();
    row.regret_se = r.report["summary"]["regret"]["se"].get<double>();
    if (!cfg.bounds.empty()) row.bound_mean = r.report["summary"]["bounds"][cfg.bounds.front()]["mean_value"].get<double>();
    row.ratio = rows.empty() || rows.back().regret_mean == 0.0 ? 0.0 : row.regret_mean / rows.back().regret_mean;
    rows.push_back(std::move(row));
  }
  if (write) write_file_atomic(c.out_dir + "/sweep.csv", sweep_csv(rows));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  if (rows.empty()) return "";
  for (const auto& [k, v] : rows.front().axes)
    if (k != "T") os << k << ',';
  os << "T,regret_mean,regret_se,bound_mean,ratio\n";
  for (const SweepRow& r : rows) {
    for (const auto& [k, v] : r.axes)
      if (k != "T") os << v.dump() << ',';
    os << r.T << ',' << fmt(r.regret_mean) << ',' << fmt(r.regret_se) << ',' << fmt(r.bound_mean) << ','
       << fmt(r.ratio) << '\n';
  }
  return os.str();
}

ReplayResult replay(const ExperimentConfig& c, std::uint64_t seed, const std::string& csv_path) {
  ReplayResult res;
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open '" + csv_path + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  const FeasibleSet set = make_set(c.set);
  const Index d = set.dim();
  if (lines.empty()) throw ConfigError("replay: empty CSV");

  std::vector<Point> xs;
  std::vector<Point> gs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<Index>(vals.size()) < 1 + 2 * d) throw ConfigError("replay: short CSV row");
    xs.push_back(Eigen::Map<const Point>(vals.data() + 1, d));
    gs.push_back(Eigen::Map<const Point>(vals.data() + 1 + d, d));
  }

  ExperimentConfig cc = c;
  cc.T = static_cast<int>(gs.size());
  const LossSequence seq = cell_losses(c, seed);
  const LearnerConfig lc = cell_learner(c, seq);
  Rng unused(0);
  const Trace tr = simulate(lc, seq, cc.T, unused, &gs);
  for (std::size_t t = 0; t < tr.rounds.size(); ++t) {
    if (tr.rounds[t].x != xs[t]) {
      res.ok = false;
      res.message = "x_t differs at row " + std::to_string(t + 1);
      return res;
    }
  }
  const Point star = c.comparator ? *c.comparator : offline_best(seq, set, 1e-8, lc.composite_alpha);
  std::ostringstream os;
  write_csv(os, build_ledger(tr, seq, star));
  std::stringstream regen(os.str());
  std::size_t i = 0;
  for (std::string line; std::getline(regen, line); ++i) {
    if (i >= lines.size() || line != lines[i]) {
      res.ok = false;
      res.message = "row " + std::to_string(i) + " does not match its recomputation";
      return res;
    }
  }
  res.rows = static_cast<int>(lines.size()) - 1;
  if (i != lines.size()) {
    res.ok = false;
    res.message = "row count differs";
  }
  return res;
}

}  // namespace adaopt
