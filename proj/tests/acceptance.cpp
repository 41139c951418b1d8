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

// Acceptance gate: one PASS/FAIL line per criterion. Criterion 10 is
// informational and does not affect the exit status.
//
//   acceptance            run everything
//   acceptance 3 7        run only the listed criteria
//   --known-fail N        still run and report N, but leave it out of the
//                         exit status
//
// FREQALLOC_ACCEPT_BUDGET overrides the per-solve budget (seconds) used by
// criteria 7 and 10.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "freqalloc/assembly.hpp"
#include "freqalloc/constraints.hpp"
#include "freqalloc/model.hpp"
#include "freqalloc/solve.hpp"
#include "freqalloc/topology.hpp"
#include "freqalloc/yield.hpp"
#include "naive.hpp"
#include "support.hpp"
#include "yield_oracle.hpp"

using namespace freqalloc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double budget(double fallback) {
  if (const char* s = std::getenv("FREQALLOC_ACCEPT_BUDGET")) return std::atof(s);
  return fallback;
}

// Solutions gathered along the way; criterion 9 re-checks all of them.
struct Solved {
  std::string name;
  Topology topo;
  FrequencyAssignment a;
};
std::vector<Solved> g_solved;

test::NaiveBounds naive_bounds(const ConstraintParams& p, bool tightened) {
  auto b = [&](Family f) { return p.base(f) + (tightened ? p.eps(f) : 0.0); };
  return {b(Family::A1), b(Family::A2), b(Family::E1), b(Family::E2),
          b(Family::D1), b(Family::S1), b(Family::S2), b(Family::T1), p.alpha_mhz};
}

// ---- 1 ----------------------------------------------------------------

Outcome naive_agreement() {
  const Topology t = square_grid(3, 3);
  const ConstraintParams p = default_params();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> freq(4900.0, 5600.0);
  std::uniform_int_distribution<int> grid(0, 700);
  std::size_t mismatches = 0, hits = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int n = 0; n < 1000; ++n) {
    FrequencyAssignment a;
    for (int q = 0; q < 9; ++q) a.frequency_mhz.push_back(n % 2 ? freq(rng) : 4900.0 + grid(rng));
    a.orientation = random_orientation(t, rng());
    std::vector<test::NaiveHit> got;
    for (const auto& v : check(a, t, p).violations) {
      const auto& q = v.record.participants;
      got.push_back({std::string(to_string(v.record.family)), q[0], q[1],
                     v.record.arity == 3 ? q[2] : 0, v.margin_mhz});
    }
    auto want = test::naive_check(t, a.frequency_mhz, a.orientation);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    mismatches += got != want;
    hits += want.size();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {mismatches == 0 && hits > 0 && secs < 5.0,
          fmt("1000 assignments, %zu violations seen, %zu mismatches, %.2f s", hits, mismatches, secs)};
}

// ---- 2 ----------------------------------------------------------------

Outcome soundness() {
  if (!test::have_solver()) return {false, "no external MILP solver configured"};
  ConstraintParams p = default_params();
  apply_uniform_tolerance(p, 5.0);
  std::size_t checked = 0, bad = 0, instances = 0;
  std::string failures;
  auto audit = [&](const std::string& name, const Topology& topo, const Solution& s) {
    if (!s.has_values()) return;
    ++checked;
    const auto records = enumerate(topo, Mode::Fixed, p, s.assignment.orientation);
    const auto rep = verify(s, topo, records, p, true);
    const auto naive = test::naive_check(topo, s.assignment.frequency_mhz, s.assignment.orientation,
                                         naive_bounds(p, true));
    if (!rep.is_feasible() || !naive.empty()) {
      ++bad;
      failures += " " + name;
    }
    g_solved.push_back({name, topo, s.assignment});
  };
  for (const auto& inst : test::soundness_suite()) {
    ++instances;
    SolverConfig cfg;
    cfg.seed = 3;
    const auto records = enumerate(inst.topo, Mode::Free, p);
    audit(inst.name + "/anneal", inst.topo, solve_anneal(inst.topo, records, p, Mode::Free, cfg));
    const double b = inst.topo.n_qubits() >= 9 ? 30.0 : 20.0;
    audit(inst.name + "/milp", inst.topo, test::solve_mode(inst.topo, p, Mode::Free, b));
  }
  return {bad == 0 && checked >= instances,
          fmt("%zu instances, %zu solutions checked at eps 5, %zu failing%s", instances, checked, bad,
              failures.c_str())};
}

// ---- 3 ----------------------------------------------------------------

// Brute-force oracle: the table written out as linear forms |c.f + k|.
constexpr std::array<const char*, 8> kFam = {"A1", "A2", "E1", "E2", "D1", "S1", "S2", "T1"};
constexpr std::array<double, 8> kBase = {17, 30, 17, 30, 2, 17, 25, 17};

struct Form {
  int fam;
  int n;
  std::array<int, 3> q;
  std::array<double, 3> c;
  double k;
};

struct Forms {
  std::vector<Form> abs;
  std::vector<std::pair<int, int>> c1;  // (control, target)
  std::array<bool, 8> present{};
};

Forms forms_for(const Topology& t, const std::vector<std::uint8_t>& o, double alpha) {
  Forms out;
  auto add = [&](int fam, std::initializer_list<std::pair<int, double>> terms, double k) {
    Form f{fam, 0, {}, {}, k};
    for (auto [q, c] : terms) {
      f.q[f.n] = q;
      f.c[f.n] = c;
      ++f.n;
    }
    out.abs.push_back(f);
    out.present[fam] = true;
  };
  for (std::size_t e = 0; e < t.n_edges(); ++e) {
    const int u = t.edge(e).a, v = t.edge(e).b;
    add(0, {{u, 1}, {v, -1}}, 0);
    add(1, {{u, 1}, {v, -1}}, -alpha);
    const int i = o[e] ? v : u;
    const int d = o[e] ? u : v;
    out.c1.emplace_back(i, d);
    add(2, {{d, 1}, {i, -1}}, 0);
    add(3, {{d, 1}, {i, -1}}, -alpha);
    add(4, {{d, 1}, {i, -1}}, -alpha / 2);
    for (std::size_t g = 0; g < t.n_edges(); ++g) {
      if (g == e) continue;
      int k = -1;
      if (static_cast<int>(t.edge(g).a) == d) k = t.edge(g).b;
      if (static_cast<int>(t.edge(g).b) == d) k = t.edge(g).a;
      if (k < 0) continue;
      add(5, {{d, 1}, {k, -1}}, 0);
      add(6, {{d, 1}, {k, -1}}, -alpha);
      add(7, {{d, 1}, {k, 1}, {i, -2}}, -alpha);
    }
  }
  return out;
}

// Best objective on the integer grid of [lo, lo + w] over every orientation.
// All table expressions are translation invariant, so some optimum has its
// lowest qubit at lo; pinning each qubit in turn keeps the search exhaustive.
double grid_optimum(const Topology& t, double alpha, double lo, int w) {
  const int n = static_cast<int>(t.n_qubits());
  const int m = static_cast<int>(t.n_edges());
  const double cap = 2.0 * w + std::fabs(alpha);
  std::array<bool, 8> present{};
  std::vector<Forms> per;
  for (int bits = 0; bits < (1 << m); ++bits) {
    std::vector<std::uint8_t> o(m);
    for (int e = 0; e < m; ++e) o[e] = (bits >> e) & 1;
    per.push_back(forms_for(t, o, alpha));
    for (int f = 0; f < 8; ++f) present[f] = present[f] || per.back().present[f];
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> f(n);
  std::vector<int> idx(n);
  for (const Forms& fm : per) {
    for (int pin = 0; pin < n; ++pin) {
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        for (int q = 0; q < n; ++q) f[q] = lo + (q == pin ? 0 : idx[q]);
        bool ok = true;
        for (auto [i, d] : fm.c1) ok = ok && f[i] + alpha <= f[d] && f[d] <= f[i];
        if (ok) {
          std::array<double, 8> mins;
          mins.fill(cap);
          for (const Form& x : fm.abs) {
            double s = x.k;
            for (int r = 0; r < x.n; ++r) s += x.c[r] * f[x.q[r]];
            mins[x.fam] = std::min(mins[x.fam], std::fabs(s));
          }
          double obj = 0;
          for (int g = 0; g < 8 && ok; ++g) {
            if (!present[g]) continue;
            ok = mins[g] >= kBase[g];
            obj += mins[g] - kBase[g];
          }
          if (ok) best = std::max(best, obj);
        }
        int q = 0;
        for (; q < n; ++q) {
          if (q == pin) continue;
          if (++idx[q] <= w) break;
          idx[q] = 0;
        }
        if (q == n) break;
      }
    }
  }
  return best;
}

Outcome brute_force() {
  if (!test::have_solver()) return {false, "no external MILP solver configured"};
  ConstraintParams p = default_params();
  p.f_max_mhz = p.f_min_mhz + 100.0;
  std::size_t n = 0, bad = 0;
  double worst = 0;
  std::string fails;
  for (const auto& inst : test::soundness_suite()) {
    if (inst.topo.n_edges() > 3) continue;
    ++n;
    const Solution s = test::solve_mode(inst.topo, p, Mode::Free, 300);
    const double grid = grid_optimum(inst.topo, p.alpha_mhz, p.f_min_mhz, 100);
    const bool ok = s.status == SolveStatus::Optimal && grid <= s.objective_mhz + 1e-6 &&
                    s.objective_mhz - grid <= 1.0;
    worst = std::max(worst, std::fabs(s.objective_mhz - grid));
    if (!ok) {
      ++bad;
      fails += fmt(" %s(milp %.3f grid %.3f)", inst.name.c_str(), s.objective_mhz, grid);
    }
  }
  return {bad == 0 && n > 0,
          fmt("%zu instances with <= 3 edges, window 100 MHz, largest gap %.3f MHz%s", n, worst,
              fails.c_str())};
}

// ---- 4 ----------------------------------------------------------------

Outcome dominance() {
  if (!test::have_solver()) return {false, "no external MILP solver configured"};
  const ConstraintParams p = default_params();
  std::string detail;
  bool pass = true;
  for (const auto& [name, topo] :
       std::vector<std::pair<std::string, Topology>>{{"star4", star_graph(4)}, {"cycle4", cycle_graph(4)}}) {
    const Solution free_s = test::solve_mode(topo, p, Mode::Free, 600);
    double best_fixed = -std::numeric_limits<double>::infinity();
    bool all_optimal = free_s.status == SolveStatus::Optimal;
    for (int bits = 0; bits < 16; ++bits) {
      std::vector<std::uint8_t> o(4);
      for (int e = 0; e < 4; ++e) o[e] = (bits >> e) & 1;
      const Solution s = test::solve_mode(topo, p, Mode::Fixed, 600, o);
      if (s.status == SolveStatus::Infeasible) continue;
      all_optimal = all_optimal && s.status == SolveStatus::Optimal;
      best_fixed = std::max(best_fixed, s.objective_mhz);
    }
    const bool ok = all_optimal && free_s.objective_mhz >= best_fixed - 1e-6;
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s free %.4f vs best fixed %.4f%s", name.c_str(), free_s.objective_mhz, best_fixed,
                  all_optimal ? "" : " (not all optimal)");
  }
  return {pass, detail};
}

// ---- 5 ----------------------------------------------------------------

Outcome quadrature() {
  ConstraintParams p = default_params();
  for (Family f : kAllFamilies) p.enabled[index_of(f)] = f == Family::A1;
  const Topology t = path_graph(2);
  YieldOptions yo;
  yo.trials = 100000;
  yo.seed = 1;  // library default
  bool pass = true;
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  for (double m : {0.0, 10.0, 50.0}) {
    const FrequencyAssignment a{{5200.0, 5217.0 + m}, {0}};
    const auto e = estimate_yield(a, t, p, 10.0, yo);
    const double want = test::a1_survival(17.0 + m, 17.0, 10.0);
    const bool ok = e.ci_lo <= want && want <= e.ci_hi;
    pass = pass && ok;
    detail += fmt("m=%g: MC %.4f [%.4f, %.4f] vs %.4f; ", m, e.yield, e.ci_lo, e.ci_hi, want);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {pass && secs < 30.0, detail + fmt("%.2f s", secs)};
}

// ---- 6 ----------------------------------------------------------------

Outcome composed() {
  const double y = composed_yield(0.965, 62);
  return {y >= 0.105 && y <= 0.115, fmt("composed_yield(0.965, 62) = %.5f", y)};
}

// ---- 7 ----------------------------------------------------------------

Outcome tightening() {
  if (!test::have_solver()) return {false, "no external MILP solver configured"};
  Topology t = square_grid(4, 4);
  const auto bits = checkerboard_orientation(t);
  t.set_orientation(bits);
  const double b = budget(120.0);
  YieldOptions yo;
  yo.trials = 100000;
  yo.seed = 1;
  std::array<YieldEstimate, 2> est;
  std::string detail;
  for (int k = 0; k < 2; ++k) {
    ConstraintParams p = default_params();
    apply_uniform_tolerance(p, k == 0 ? 0.0 : 10.0);
    const Solution s = test::solve_mode(t, p, Mode::Fixed, b, bits);
    if (!s.has_values()) return {false, fmt("eps %d: solver returned no assignment", k * 10)};
    const auto rep = verify(s, t, enumerate(t, Mode::Fixed, p, bits), p, true);
    if (!rep.is_feasible()) return {false, fmt("eps %d: solution fails verify", k * 10)};
    est[k] = estimate_yield(s.assignment, t, default_params(), 10.0, yo);
    g_solved.push_back({fmt("grid4x4/eps%d", k * 10), t, s.assignment});
    detail += fmt("eps %d (%s, obj %.2f): yield %.5f [%.5f, %.5f]; ", k * 10,
                  std::string(to_string(s.status)).c_str(), s.objective_mhz, est[k].yield,
                  est[k].ci_lo, est[k].ci_hi);
  }
  return {est[1].ci_lo > est[0].ci_hi, detail + fmt("budget %.0f s per solve", b)};
}

// ---- 8 ----------------------------------------------------------------

Outcome seams() {
  const ConstraintParams p = default_params();
  std::size_t units = 0, tilings = 0, violations = 0, skipped = 0;
  for (int n : {3, 4}) {
    for (const auto& [name, bc] : builtin_presets()) {
      Topology w = wrap(square_grid(n, n), bc);
      const Solution s = test::anneal_unit(w, p, 1);
      if (!s.has_values() || !check(s.assignment, w, p).is_feasible()) {
        ++skipped;
        continue;
      }
      ++units;
      w.set_orientation(s.assignment.orientation);
      g_solved.push_back({fmt("unit%d/%s", n, name.c_str()), w, s.assignment});
      for (int nx = 1; nx <= 3; ++nx) {
        for (int ny = 1; ny <= 3; ++ny) {
          const ChipAssembly chip = tile(w, s, bc, nx, ny, p);
          violations += chip_check(chip, p).violations.size();
          ++tilings;
        }
      }
    }
  }
  return {units > 0 && violations == 0,
          fmt("%zu wrap-feasible units (%zu presets x sizes without one), %zu tilings, %zu violations",
              units, skipped, tilings, violations)};
}

// ---- 9 ----------------------------------------------------------------

// Checks every solution produced by criteria 2, 7 and 8.
Outcome monotone() {
  YieldOptions yo;
  yo.trials = 20000;
  yo.seed = 99;
  std::size_t bad = 0;
  std::string fails;
  for (const auto& s : g_solved) {
    double prev = 1.0;
    for (int sigma = 2; sigma <= 20; sigma += 2) {
      const double y = estimate_yield(s.a, s.topo, default_params(), sigma, yo).yield;
      if (y > prev) {
        ++bad;
        fails += fmt(" %s@%d", s.name.c_str(), sigma);
      }
      prev = y;
    }
  }
  // Two-qubit D1-only witness with quadrature: a band 8 MHz away catches less
  // probability mass at sigma 20 than at sigma 6.
  ConstraintParams d1 = default_params();
  d1.enabled.fill(false);
  d1.enabled[index_of(Family::D1)] = true;
  const FrequencyAssignment w{{5300.0, 5133.0}, {0}};
  YieldOptions wo;
  wo.trials = 100000;
  wo.seed = 1;
  const double mc6 = estimate_yield(w, path_graph(2), d1, 6.0, wo).yield;
  const double mc20 = estimate_yield(w, path_graph(2), d1, 20.0, wo).yield;
  const double q6 = 1.0 - test::gaussian_mass(0.0, 6.0 * std::sqrt(2.0), -10.0, -6.0);
  const double q20 = 1.0 - test::gaussian_mass(0.0, 20.0 * std::sqrt(2.0), -10.0, -6.0);
  return {bad == 0 && !g_solved.empty(),
          fmt("%zu solutions, sigma 2..20 step 2, 20000 trials each, %zu increases%s; D1 band witness: "
              "yield %.4f at sigma 6 vs %.4f at sigma 20 (quadrature %.4f vs %.4f)",
              g_solved.size(), bad, fails.c_str(), mc6, mc20, q6, q20)};
}

// ---- 10 ---------------------------------------------------------------

Outcome headline() {
  ConstraintParams p = default_params();
  apply_uniform_tolerance(p, 20.0);
  const BoundaryCondition bc = preset_bc("PBC3");
  Topology w = wrap(square_grid(4, 4), bc);
  Solution s;
  std::string how = "anneal";
  if (test::have_solver()) {
    s = test::solve_mode(w, p, Mode::Free, budget(300.0));
    how = std::string("milp ") + std::string(to_string(s.status));
  }
  auto ok = [&](const Solution& x) {
    if (!x.has_values()) return false;
    return verify(x, w, enumerate(w, Mode::Fixed, p, x.assignment.orientation), p, true).is_feasible();
  };
  if (!ok(s)) {
    s = test::anneal_unit(w, p, 1, 1000000);
    how += ", anneal fallback";
  }
  if (!ok(s)) return {false, "no unit solution feasible at eps 20 (" + how + ")"};
  w.set_orientation(s.assignment.orientation);
  const ChipAssembly chip = tile(w, s, bc, 8, 8, p);
  const auto rep = chip_check(chip, default_params());
  ThresholdOptions to;
  to.target_yield = 0.10;
  to.sigma_hi_mhz = 50.0;
  to.tol_mhz = 0.1;
  to.yield.trials = 2000;
  to.max_trials = 32000;
  try {
    const auto res = threshold_dispersion(chip.assignment, chip.chip, default_params(), to);
    return {rep.is_feasible(),
            fmt("%zu-qubit chip from %s unit (obj %.2f), %zu violations, threshold sigma %.2f MHz at 10%% "
                "yield (reference value 6.5 MHz)",
                chip.chip.n_qubits(), how.c_str(), s.objective_mhz, rep.violations.size(), res.sigma_mhz)};
  } catch (const std::exception& e) {
    return {false, std::string("threshold search: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"check agrees with the naive evaluator", naive_agreement},
      {"linearization soundness", soundness},
      {"MILP matches exhaustive grid search", brute_force},
      {"free orientation dominates fixed", dominance},
      {"yield matches quadrature", quadrature},
      {"composed yield", composed},
      {"tightening raises yield", tightening},
      {"seam equivalence", seams},
      {"yield monotone in sigma", monotone},
      {"full pipeline, informational", headline},
  };
  std::set<int> only, known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-fail" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      only.insert(std::atoi(argv[i]));
    }
  }
  // Criterion 9 re-checks the solutions of 2, 7 and 8; produce them quietly
  // when those were not selected.
  if (!only.empty() && only.count(9)) {
    for (int dep : {2, 7, 8}) {
      if (only.count(dep)) continue;
      try {
        criteria[dep - 1].second();
      } catch (const std::exception&) {
      }
    }
  }
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool info = id == 10;
    const bool excused = !o.pass && known.count(id);
    std::printf("criterion %2d %s%s: %s (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL",
                info ? " (informational)" : excused ? " (known failure, not counted)" : "",
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass && !info && !excused) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
