// Copyright 2026 The freqalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// freqalloc command-line driver.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 solver failure,
// 4 infeasible result or failed precondition.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "freqalloc/assembly.hpp"
#include "freqalloc/constraints.hpp"
#include "freqalloc/error.hpp"
#include "freqalloc/io.hpp"
#include "freqalloc/model.hpp"
#include "freqalloc/solve.hpp"
#include "freqalloc/topology.hpp"
#include "freqalloc/yield.hpp"

namespace fa = freqalloc;
using fa::io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;
constexpr int kExitInfeasible = 4;

struct TopoArgs {
  std::string file;
  std::string kind = "square";
  int rows = 4;
  int cols = 4;
  int cells_x = 1;
  int cells_y = 1;
  int rings = 0;
  int n = 2;
  std::string bc;
  std::string orient = "none";
  std::uint64_t orient_seed = 1;
};

struct ParamArgs {
  std::string file;
  std::optional<double> eps_tol;
  std::optional<double> diff;
  std::string comparator;
  std::string window;
  std::optional<double> alpha;
  Json config;  // params section of the config file
};

struct ModelArgs {
  std::string mode = "free";
  std::optional<double> big_m;
  std::optional<std::size_t> diff_cap;
};

struct SolverArgs {
  std::string backend = "anneal";
  std::string cmd;
  std::string budget = "60";
  std::uint64_t seed = 1;
  std::optional<std::size_t> moves;
  std::string temp_dir;
  bool keep_files = false;
  Json anneal;  // anneal section of the config file
};

struct YieldArgs {
  std::string sigmas = "10";
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
};

struct ThresholdArgs {
  double target = 0.10;
  double sigma_lo = 0.0;
  double sigma_hi = 100.0;
  double tol = 0.1;
  std::size_t max_trials = 1u << 20;
};

struct AssembleArgs {
  std::string bc = "PBC1";
  int nx = 1;
  int ny = 1;
  bool force = false;
  std::optional<double> sigma;
};

struct Args {
  std::string config;
  unsigned jobs = 0;
  std::string presets_file;
  Json presets_config;
  TopoArgs topo;
  ParamArgs params;
  ModelArgs model;
  SolverArgs solver;
  YieldArgs yield;
  ThresholdArgs threshold;
  AssembleArgs assemble;
  std::string solution;
  std::string out;
  std::string json_out;
  std::string lp_out;
  bool base_bounds = false;
};

// ---- config file --------------------------------------------------------

void allow_keys(const Json& j, const std::string& what, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw fa::ParseError("config: " + what + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto k : keys) ok = ok || key == k;
    if (!ok) throw fa::ParseError("config: unknown key '" + key + "' in " + what);
  }
}

template <class T>
void take(const Json& j, const char* key, T& dst, const std::string& what) {
  if (!j.contains(key)) return;
  try {
    dst = j[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw fa::ParseError("config: '" + std::string(key) + "' in " + what + " has the wrong type");
  }
}

template <class T>
void take(const Json& j, const char* key, std::optional<T>& dst, const std::string& what) {
  if (!j.contains(key)) return;
  T v{};
  take(j, key, v, what);
  dst = v;
}

// Values in the config file take precedence over command-line flags.
void apply_config(Args& a, const Json& c) {
  allow_keys(c, "config", {"topology", "params", "model", "solver", "yield", "threshold",
                           "assemble", "presets", "jobs"});
  take(c, "jobs", a.jobs, "config");
  if (c.contains("topology")) {
    const Json& t = c["topology"];
    allow_keys(t, "topology", {"file", "kind", "rows", "cols", "cells_x", "cells_y", "rings", "n",
                               "bc", "orient", "orient_seed"});
    take(t, "file", a.topo.file, "topology");
    take(t, "kind", a.topo.kind, "topology");
    take(t, "rows", a.topo.rows, "topology");
    take(t, "cols", a.topo.cols, "topology");
    take(t, "cells_x", a.topo.cells_x, "topology");
    take(t, "cells_y", a.topo.cells_y, "topology");
    take(t, "rings", a.topo.rings, "topology");
    take(t, "n", a.topo.n, "topology");
    take(t, "bc", a.topo.bc, "topology");
    take(t, "orient", a.topo.orient, "topology");
    take(t, "orient_seed", a.topo.orient_seed, "topology");
  }
  if (c.contains("params")) a.params.config = c["params"];
  if (c.contains("model")) {
    const Json& m = c["model"];
    allow_keys(m, "model", {"mode", "big_m", "diff_pair_cap"});
    take(m, "mode", a.model.mode, "model");
    take(m, "big_m", a.model.big_m, "model");
    take(m, "diff_pair_cap", a.model.diff_cap, "model");
  }
  if (c.contains("solver")) {
    const Json& s = c["solver"];
    allow_keys(s, "solver", {"backend", "command", "time_budget_s", "seed", "temp_dir",
                             "keep_files", "anneal"});
    take(s, "backend", a.solver.backend, "solver");
    take(s, "command", a.solver.cmd, "solver");
    if (s.contains("time_budget_s")) {
      double b = 0;
      take(s, "time_budget_s", b, "solver");
      std::ostringstream os;
      os << b;
      a.solver.budget = os.str();
    }
    take(s, "seed", a.solver.seed, "solver");
    take(s, "temp_dir", a.solver.temp_dir, "solver");
    take(s, "keep_files", a.solver.keep_files, "solver");
    if (s.contains("anneal")) a.solver.anneal = s["anneal"];
  }
  if (c.contains("yield")) {
    const Json& y = c["yield"];
    allow_keys(y, "yield", {"sigmas", "trials", "seed"});
    if (y.contains("sigmas")) {
      std::vector<double> sig;
      take(y, "sigmas", sig, "yield");
      std::ostringstream os;
      for (std::size_t i = 0; i < sig.size(); ++i) os << (i ? "," : "") << sig[i];
      a.yield.sigmas = os.str();
    }
    take(y, "trials", a.yield.trials, "yield");
    take(y, "seed", a.yield.seed, "yield");
  }
  if (c.contains("threshold")) {
    const Json& t = c["threshold"];
    allow_keys(t, "threshold", {"target", "sigma_lo", "sigma_hi", "tol_mhz", "max_trials"});
    take(t, "target", a.threshold.target, "threshold");
    take(t, "sigma_lo", a.threshold.sigma_lo, "threshold");
    take(t, "sigma_hi", a.threshold.sigma_hi, "threshold");
    take(t, "tol_mhz", a.threshold.tol, "threshold");
    take(t, "max_trials", a.threshold.max_trials, "threshold");
  }
  if (c.contains("assemble")) {
    const Json& t = c["assemble"];
    allow_keys(t, "assemble", {"bc", "nx", "ny", "force", "sigma"});
    take(t, "bc", a.assemble.bc, "assemble");
    take(t, "nx", a.assemble.nx, "assemble");
    take(t, "ny", a.assemble.ny, "assemble");
    take(t, "force", a.assemble.force, "assemble");
    take(t, "sigma", a.assemble.sigma, "assemble");
  }
  if (c.contains("presets")) a.presets_config = c["presets"];
}

// ---- builders -----------------------------------------------------------

fa::PresetTable presets(const Args& a) {
  fa::PresetTable table = fa::builtin_presets();
  auto merge = [&](const Json& j) {
    for (auto& [name, bc] : fa::io::presets_from_json(j)) table[name] = bc;
  };
  if (!a.presets_file.empty()) merge(fa::io::read_json_file(a.presets_file));
  if (!a.presets_config.is_null()) merge(a.presets_config);
  return table;
}

fa::Topology make_topology(const Args& a) {
  const TopoArgs& t = a.topo;
  fa::Topology topo;
  if (!t.file.empty()) {
    topo = fa::io::topology_from_json(fa::io::read_json_file(t.file));
  } else if (t.kind == "square") {
    topo = fa::square_grid(t.rows, t.cols);
  } else if (t.kind == "hex") {
    topo = t.rings > 0 ? fa::hex_rings(t.rings) : fa::hex_grid(t.cells_x, t.cells_y);
  } else if (t.kind == "hex-brick") {
    topo = fa::hex_brick(t.rows, t.cols);
  } else if (t.kind == "path") {
    topo = fa::path_graph(t.n);
  } else if (t.kind == "cycle") {
    topo = fa::cycle_graph(t.n);
  } else if (t.kind == "star") {
    topo = fa::star_graph(t.n);
  } else {
    throw fa::InvalidArgument("unknown topology kind '" + t.kind + "'");
  }
  if (!t.bc.empty()) topo = fa::wrap(topo, fa::preset_bc(t.bc, presets(a)));
  if (t.orient == "checkerboard") {
    topo.set_orientation(fa::checkerboard_orientation(topo));
  } else if (t.orient == "lower") {
    topo.set_orientation(std::vector<std::uint8_t>(topo.n_edges(), 0));
  } else if (t.orient == "random") {
    topo.set_orientation(fa::random_orientation(topo, t.orient_seed));
  } else if (t.orient != "none") {
    throw fa::InvalidArgument("unknown orientation scheme '" + t.orient + "'");
  }
  return topo;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fa::InvalidArgument("not a number: '" + item + "'");
    }
  }
  return out;
}

fa::ConstraintParams make_params(const ParamArgs& p, fa::ConstraintParams base) {
  if (!p.file.empty()) base = fa::io::params_from_json(fa::io::read_json_file(p.file), base);
  if (p.eps_tol) fa::apply_uniform_tolerance(base, *p.eps_tol);
  if (p.diff) base.delta_diff_mhz = *p.diff;
  if (!p.comparator.empty()) {
    if (p.comparator == "separation") {
      base.diff_comparator = fa::DiffComparator::Separation;
    } else if (p.comparator == "literal") {
      base.diff_comparator = fa::DiffComparator::Literal;
    } else {
      throw fa::InvalidArgument("comparator must be 'separation' or 'literal'");
    }
  }
  if (!p.window.empty()) {
    const auto w = parse_list(p.window);
    if (w.size() != 2) throw fa::InvalidArgument("--window takes lo,hi");
    base.f_min_mhz = w[0];
    base.f_max_mhz = w[1];
  }
  if (p.alpha) base.alpha_mhz = *p.alpha;
  if (!p.config.is_null()) base = fa::io::params_from_json(p.config, base);
  base.validate();
  for (const auto& w : base.warnings()) std::cerr << "warning: " << w << "\n";
  return base;
}

fa::Mode parse_mode(const std::string& m) {
  if (m == "fixed") return fa::Mode::Fixed;
  if (m == "free") return fa::Mode::Free;
  throw fa::InvalidArgument("mode must be 'fixed' or 'free'");
}

double parse_seconds(std::string s) {
  double scale = 1.0;
  if (!s.empty() && (s.back() == 's' || s.back() == 'm' || s.back() == 'h')) {
    scale = s.back() == 's' ? 1.0 : s.back() == 'm' ? 60.0 : 3600.0;
    s.pop_back();
  }
  const auto v = parse_list(s);
  if (v.size() != 1) throw fa::InvalidArgument("bad duration");
  return v[0] * scale;
}

fa::SolverConfig make_solver(const SolverArgs& s) {
  fa::SolverConfig cfg;
  if (s.backend == "anneal") {
    cfg.backend = fa::Backend::Anneal;
  } else if (s.backend == "external") {
    cfg.backend = fa::Backend::External;
  } else {
    throw fa::InvalidArgument("backend must be 'anneal' or 'external'");
  }
  cfg.command_template = s.cmd;
  cfg.time_budget_s = parse_seconds(s.budget);
  cfg.seed = s.seed;
  cfg.temp_dir = s.temp_dir;
  cfg.keep_files = s.keep_files;
  if (s.moves) cfg.anneal.max_moves = *s.moves;
  if (!s.anneal.is_null()) {
    const std::string w = "solver.anneal";
    allow_keys(s.anneal, w, {"init_temp", "cooling_rate", "moves_per_temp", "freq_step_mhz",
                             "grid_mhz", "max_moves", "reward_weight"});
    take(s.anneal, "init_temp", cfg.anneal.init_temp, w);
    take(s.anneal, "cooling_rate", cfg.anneal.cooling_rate, w);
    take(s.anneal, "moves_per_temp", cfg.anneal.moves_per_temp, w);
    take(s.anneal, "freq_step_mhz", cfg.anneal.freq_step_mhz, w);
    take(s.anneal, "grid_mhz", cfg.anneal.grid_mhz, w);
    take(s.anneal, "max_moves", cfg.anneal.max_moves, w);
    take(s.anneal, "reward_weight", cfg.anneal.reward_weight, w);
  }
  cfg.validate();
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    fa::io::write_text_file(path, text);
  }
}

fa::ModelIR make_model(const Args& a, const fa::Topology& topo, const fa::ConstraintParams& params,
                       std::vector<fa::ConstraintRecord>& records) {
  const fa::Mode mode = parse_mode(a.model.mode);
  if (mode == fa::Mode::Fixed && !topo.has_orientation()) {
    throw fa::InvalidArgument("fixed mode needs a topology with orientations");
  }
  records = fa::enumerate(topo, mode, params);
  fa::ModelOptions opts;
  opts.mode = mode;
  opts.big_m = a.model.big_m;
  opts.diff_pair_cap = a.model.diff_cap;
  return fa::build(topo, records, params, opts);
}

fa::io::SolutionDoc load_solution(const Args& a) {
  if (a.solution.empty()) throw fa::InvalidArgument("--solution is required");
  auto doc = fa::io::solution_from_json(fa::io::read_json_file(a.solution));
  if (!doc.solution.has_values()) {
    throw fa::PreconditionError("solution file has status " +
                                std::string(fa::to_string(doc.solution.status)) + " and no values");
  }
  fa::require_complete(doc.solution.assignment, doc.topology);
  return doc;
}

void print_violations(const fa::ViolationReport& report, const fa::Topology& topo,
                      const fa::ChipAssembly* chip = nullptr) {
  for (const auto& v : report.violations) {
    std::cerr << "  " << fa::to_string(v.record.family) << " (";
    const auto qs = v.record.qubits();
    for (std::size_t i = 0; i < qs.size(); ++i) std::cerr << (i ? "," : "") << qs[i];
    std::cerr << ") measured " << v.measured_mhz << " required " << v.required_mhz << " margin "
              << v.margin_mhz;
    if (v.record.edge != fa::ConstraintRecord::kNoEdge) std::cerr << " edge " << topo.edge_key(v.record.edge);
    if (chip != nullptr && fa::touches_seam(*chip, v.record)) std::cerr << " [seam]";
    std::cerr << "\n";
  }
}

// ---- subcommands ----------------------------------------------------------

int cmd_topo(const Args& a) {
  emit(a.out, fa::io::dump(fa::io::to_json(make_topology(a))));
  return kExitOk;
}

int cmd_build(const Args& a) {
  const fa::Topology topo = make_topology(a);
  const fa::ConstraintParams params = make_params(a.params, fa::default_params());
  std::vector<fa::ConstraintRecord> records;
  const fa::ModelIR model = make_model(a, topo, params, records);
  emit(a.out, fa::export_lp(model));
  std::cerr << "model: " << model.variables.size() << " variables ("
            << model.count(fa::VarType::Binary) << " binary), " << model.rows.size() << " rows\n";
  return kExitOk;
}

int cmd_solve(const Args& a) {
  fa::Topology topo = make_topology(a);
  const fa::ConstraintParams params = make_params(a.params, fa::default_params());
  const fa::SolverConfig cfg = make_solver(a.solver);
  const fa::Mode mode = parse_mode(a.model.mode);
  std::vector<fa::ConstraintRecord> records;
  fa::Solution sol;
  if (cfg.backend == fa::Backend::External) {
    const fa::ModelIR model = make_model(a, topo, params, records);
    if (!a.lp_out.empty()) fa::io::write_text_file(a.lp_out, fa::export_lp(model));
    sol = fa::solve_external(model, cfg);
  } else {
    if (mode == fa::Mode::Fixed && !topo.has_orientation()) {
      throw fa::InvalidArgument("fixed mode needs a topology with orientations");
    }
    records = fa::enumerate(topo, mode, params);
    sol = fa::solve_anneal(topo, records, params, mode, cfg);
  }
  if (sol.has_values()) topo.set_orientation(sol.assignment.orientation);
  emit(a.out, fa::io::dump(fa::io::solution_to_json(sol, topo, &params, mode)));
  std::cerr << "status " << fa::to_string(sol.status);
  if (sol.has_values()) std::cerr << ", objective " << sol.objective_mhz << " MHz";
  std::cerr << "\n";
  if (sol.has_values()) {
    const auto report = fa::verify(sol, topo, records, params, true);
    if (sol.status != fa::SolveStatus::Infeasible && !report.is_feasible()) {
      std::cerr << "verify: " << report.violations.size() << " violations at tightened bounds\n";
      print_violations(report, topo);
      return kExitInfeasible;
    }
  }
  return sol.status == fa::SolveStatus::Infeasible ? kExitInfeasible : kExitOk;
}

int cmd_verify(const Args& a) {
  const auto doc = load_solution(a);
  const fa::ConstraintParams params =
      make_params(a.params, doc.params.value_or(fa::default_params()));
  const auto records = fa::enumerate(doc.topology, fa::Mode::Fixed, params, doc.solution.assignment.orientation);
  const auto report = fa::verify(doc.solution, doc.topology, records, params, !a.base_bounds);
  std::cout << (report.is_feasible() ? "ok" : "violations") << " " << report.violations.size()
            << " at " << (a.base_bounds ? "base" : "tightened") << " bounds\n";
  print_violations(report, doc.topology);
  return report.is_feasible() ? kExitOk : kExitInfeasible;
}

int cmd_yield(const Args& a) {
  const auto doc = load_solution(a);
  const fa::ConstraintParams params =
      make_params(a.params, doc.params.value_or(fa::default_params()));
  fa::YieldOptions yo;
  yo.trials = a.yield.trials;
  yo.seed = a.yield.seed;
  yo.jobs = a.jobs;
  std::vector<fa::YieldEstimate> rows;
  for (double sigma : parse_list(a.yield.sigmas)) {
    rows.push_back(fa::estimate_yield(doc.solution.assignment, doc.topology, params, sigma, yo));
  }
  emit(a.out, fa::yield_csv(rows));
  if (!a.json_out.empty()) fa::io::write_text_file(a.json_out, fa::io::dump(fa::io::to_json(rows)));
  return kExitOk;
}

int cmd_threshold(const Args& a) {
  const auto doc = load_solution(a);
  const fa::ConstraintParams params =
      make_params(a.params, doc.params.value_or(fa::default_params()));
  fa::ThresholdOptions to;
  to.target_yield = a.threshold.target;
  to.sigma_lo_mhz = a.threshold.sigma_lo;
  to.sigma_hi_mhz = a.threshold.sigma_hi;
  to.tol_mhz = a.threshold.tol;
  to.max_trials = a.threshold.max_trials;
  to.yield.trials = a.yield.trials;
  to.yield.seed = a.yield.seed;
  to.yield.jobs = a.jobs;
  const auto res = fa::threshold_dispersion(doc.solution.assignment, doc.topology, params, to);
  std::ostringstream os;
  os << "target,sigma_star,bracket_lo,bracket_hi\n"
     << to.target_yield << "," << res.sigma_mhz << "," << res.bracket_lo << "," << res.bracket_hi << "\n";
  emit(a.out, os.str());
  if (!a.json_out.empty()) {
    fa::io::write_text_file(a.json_out, fa::io::dump(fa::io::to_json(res.evaluations)));
  }
  return kExitOk;
}

int cmd_assemble(const Args& a) {
  const auto doc = load_solution(a);
  const fa::ConstraintParams params =
      make_params(a.params, doc.params.value_or(fa::default_params()));
  const fa::BoundaryCondition bc = fa::preset_bc(a.assemble.bc, presets(a));
  fa::TileOptions opts;
  opts.require_feasible = !a.assemble.force;
  const fa::ChipAssembly chip =
      fa::tile(doc.topology, doc.solution, bc, a.assemble.nx, a.assemble.ny, params, opts);
  if (!a.out.empty()) fa::io::write_text_file(a.out, fa::io::dump(fa::io::chip_to_json(chip)));
  const auto report = fa::chip_check(chip, params);
  std::size_t seam = 0;
  for (const auto& v : report.violations) seam += fa::touches_seam(chip, v.record) ? 1 : 0;
  std::cout << "chip " << chip.chip.n_qubits() << " qubits, " << chip.chip.n_edges()
            << " edges; violations " << report.violations.size() << " (" << seam << " on seams)\n";
  print_violations(report, chip.chip, &chip);
  if (a.assemble.sigma) {
    fa::YieldOptions yo;
    yo.trials = a.yield.trials;
    yo.seed = a.yield.seed;
    yo.jobs = a.jobs;
    const auto est = fa::estimate_yield(chip.assignment, chip.chip, params, *a.assemble.sigma, yo);
    const std::vector<fa::YieldEstimate> rows{est};
    std::cout << fa::yield_csv(rows);
  }
  return report.is_feasible() ? kExitOk : kExitInfeasible;
}

void add_topo_options(CLI::App* sub, Args& a) {
  sub->add_option("-t,--topology", a.topo.file, "Topology JSON file");
  sub->add_option("--kind", a.topo.kind, "square | hex | hex-brick | path | cycle | star");
  sub->add_option("--rows", a.topo.rows, "Rows (square, hex-brick)");
  sub->add_option("--cols", a.topo.cols, "Columns (square, hex-brick)");
  sub->add_option("--cells-x", a.topo.cells_x, "Hexagon cells along x (hex)");
  sub->add_option("--cells-y", a.topo.cells_y, "Hexagon cells along y (hex)");
  sub->add_option("--rings", a.topo.rings, "Hexagon rings (hex); overrides cells");
  sub->add_option("--n", a.topo.n, "Qubits (path, cycle) or leaves (star)");
  sub->add_option("--bc", a.topo.bc, "Wrap the unit cell with a boundary-condition preset");
  sub->add_option("--orient", a.topo.orient, "none | checkerboard | lower | random");
  sub->add_option("--orient-seed", a.topo.orient_seed, "Seed for --orient random");
}

void add_param_options(CLI::App* sub, Args& a) {
  sub->add_option("--params", a.params.file, "Constraint parameter JSON file");
  sub->add_option("--eps-tol", a.params.eps_tol, "Uniform tightening in MHz (all families but D1)");
  sub->add_option("--diff", a.params.diff, "Edgewise-difference separation in MHz (0 = off)");
  sub->add_option("--comparator", a.params.comparator, "separation | literal");
  sub->add_option("--window", a.params.window, "Frequency window lo,hi in MHz");
  sub->add_option("--alpha", a.params.alpha, "Anharmonicity in MHz");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency allocation for fixed-frequency qubit lattices"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  app.add_option("--config", a.config, "JSON config file; its values override flags");
  app.add_option("--jobs", a.jobs, "Worker threads for Monte Carlo (0 = all cores)");
  app.add_option("--presets", a.presets_file, "Boundary-condition preset table (JSON)");

  auto* topo = app.add_subcommand("topo", "Generate a topology JSON file");
  add_topo_options(topo, a);
  topo->add_option("-o,--out", a.out, "Output file (default stdout)");

  auto* build = app.add_subcommand("build", "Build the optimization model and write LP");
  add_topo_options(build, a);
  add_param_options(build, a);
  build->add_option("--mode", a.model.mode, "fixed | free");
  build->add_option("--big-m", a.model.big_m, "Override big-M (MHz)");
  build->add_option("--diff-cap", a.model.diff_cap, "Keep only the N nearest edge-difference pairs");
  build->add_option("-o,--out", a.out, "Output LP file (default stdout)");

  auto* solve = app.add_subcommand("solve", "Solve and write a solution JSON file");
  add_topo_options(solve, a);
  add_param_options(solve, a);
  solve->add_option("--mode", a.model.mode, "fixed | free");
  solve->add_option("--big-m", a.model.big_m, "Override big-M (MHz)");
  solve->add_option("--diff-cap", a.model.diff_cap, "Keep only the N nearest edge-difference pairs");
  solve->add_option("--backend", a.solver.backend, "anneal | external");
  solve->add_option("--cmd", a.solver.cmd, "External solver command with {lp} {out} {time}");
  solve->add_option("--budget", a.solver.budget, "Time budget, e.g. 30s, 5m");
  solve->add_option("--seed", a.solver.seed, "Anneal seed");
  solve->add_option("--moves", a.solver.moves, "Anneal moves");
  solve->add_option("--temp-dir", a.solver.temp_dir, "Directory for solver files");
  solve->add_flag("--keep-files", a.solver.keep_files, "Keep LP and solution files");
  solve->add_option("--lp-out", a.lp_out, "Also write the LP here");
  solve->add_option("-o,--out", a.out, "Output solution file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Check a solution; exit 4 on any violation");
  verify->add_option("-s,--solution", a.solution, "Solution JSON file")->required();
  add_param_options(verify, a);
  verify->add_flag("--base", a.base_bounds, "Check base bounds instead of tightened bounds");

  auto* yield = app.add_subcommand("yield", "Monte Carlo yield at one or more dispersions");
  yield->add_option("-s,--solution", a.solution, "Solution JSON file")->required();
  add_param_options(yield, a);
  yield->add_option("--sigma", a.yield.sigmas, "Comma-separated dispersions in MHz");
  yield->add_option("--trials", a.yield.trials, "Trials per dispersion");
  yield->add_option("--seed", a.yield.seed, "Seed");
  yield->add_option("-o,--out", a.out, "CSV output (default stdout)");
  yield->add_option("--json", a.json_out, "Also write JSON here");

  auto* threshold = app.add_subcommand("threshold", "Dispersion at which yield hits a target");
  threshold->add_option("-s,--solution", a.solution, "Solution JSON file")->required();
  add_param_options(threshold, a);
  threshold->add_option("--target", a.threshold.target, "Target yield");
  threshold->add_option("--sigma-lo", a.threshold.sigma_lo, "Lower end of the sigma bracket");
  threshold->add_option("--sigma-hi", a.threshold.sigma_hi, "Upper end of the sigma bracket");
  threshold->add_option("--tol", a.threshold.tol, "Bracket width to stop at (MHz)");
  threshold->add_option("--trials", a.yield.trials, "Initial trials per evaluation");
  threshold->add_option("--max-trials", a.threshold.max_trials, "Trial cap near the target");
  threshold->add_option("--seed", a.yield.seed, "Seed");
  threshold->add_option("-o,--out", a.out, "CSV output (default stdout)");
  threshold->add_option("--json", a.json_out, "Write every evaluation as JSON here");

  auto* assemble = app.add_subcommand("assemble", "Tile a unit solution into a chip");
  assemble->add_option("-s,--solution", a.solution, "Unit solution JSON file")->required();
  add_param_options(assemble, a);
  assemble->add_option("--bc", a.assemble.bc, "Boundary-condition preset");
  assemble->add_option("--nx", a.assemble.nx, "Copies along x");
  assemble->add_option("--ny", a.assemble.ny, "Copies along y");
  assemble->add_flag("--force", a.assemble.force, "Skip the unit feasibility precondition");
  assemble->add_option("--sigma", a.assemble.sigma, "Also estimate whole-chip yield");
  assemble->add_option("--trials", a.yield.trials, "Trials for --sigma");
  assemble->add_option("--seed", a.yield.seed, "Seed for --sigma");
  assemble->add_option("-o,--out", a.out, "Chip JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!a.config.empty()) apply_config(a, fa::io::read_json_file(a.config));
    if (*topo) return cmd_topo(a);
    if (*build) return cmd_build(a);
    if (*solve) return cmd_solve(a);
    if (*verify) return cmd_verify(a);
    if (*yield) return cmd_yield(a);
    if (*threshold) return cmd_threshold(a);
    if (*assemble) return cmd_assemble(a);
  } catch (const fa::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fa::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fa::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const fa::PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const fa::BracketError& e) {
    std::cerr << "bracket: " << e.what() << "\n";
    return kExitInfeasible;
  }
  return kExitUsage;
}
