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

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "freqalloc/error.hpp"
#include "freqalloc/solve.hpp"
#include "support.hpp"

using namespace freqalloc;

namespace {

SolverConfig anneal_cfg(std::uint64_t seed, std::size_t moves) {
  SolverConfig c;
  c.backend = Backend::Anneal;
  c.seed = seed;
  c.anneal.max_moves = moves;
  return c;
}

ConstraintParams only(std::initializer_list<Family> fams) {
  auto p = default_params();
  p.enabled.fill(false);
  for (Family f : fams) p.enabled[index_of(f)] = true;
  return p;
}

// Writes an executable shell script and returns a command template for it.
std::string script(const test::TempDir& dir, const std::string& name, const std::string& body) {
  auto path = dir / name;
  test::write_file(path, "#!/bin/sh\n" + body);
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return "'" + path.string() + "'";
}

ModelIR edge_model(Mode mode, const ConstraintParams& p) {
  auto t = test::oriented_forward(path_graph(2));
  ModelOptions o;
  o.mode = mode;
  return build(t, enumerate(t, mode, p), p, o);
}

}  // namespace

TEST_CASE("anneal: single qubit is immediately feasible") {
  auto t = path_graph(1);
  auto p = default_params();
  auto recs = enumerate(t, Mode::Free, p);
  auto s = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(1, 10));
  CHECK(s.status == SolveStatus::Feasible);
  REQUIRE(s.assignment.frequency_mhz.size() == 1);
  CHECK(s.assignment.frequency_mhz[0] >= p.f_min_mhz);
  CHECK(s.assignment.frequency_mhz[0] <= p.f_max_mhz);
}

TEST_CASE("anneal: two qubits with A1 only") {
  auto t = path_graph(2);
  auto p = only({Family::A1});
  apply_uniform_tolerance(p, 10);
  auto recs = enumerate(t, Mode::Free, p);
  auto s = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(3, 20000));
  REQUIRE(s.status == SolveStatus::Feasible);
  CHECK(std::abs(s.assignment.frequency_mhz[0] - s.assignment.frequency_mhz[1]) >= 27.0);
  CHECK(verify(s, t, recs, p, true).is_feasible());
}

TEST_CASE("anneal: 2x2 grid, base bounds, seed 42") {
  auto t = square_grid(2, 2);
  auto p = default_params();
  auto recs = enumerate(t, Mode::Free, p);
  auto s = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(42, 100000));
  CHECK(s.status == SolveStatus::Feasible);
  CHECK(verify(s, t, recs, p, true).is_feasible());
  CHECK(check(s.assignment, t, p).is_feasible());
  for (double f : s.assignment.frequency_mhz) CHECK(f == std::round(f));
  CHECK(s.objective_mhz == doctest::Approx(s.recomputed_objective(p)));
}

TEST_CASE("anneal: fixed mode keeps the orientation") {
  auto t = square_grid(2, 3);
  t.set_orientation(checkerboard_orientation(t));
  auto p = default_params();
  auto recs = enumerate(t, Mode::Fixed, p);
  auto s = solve_anneal(t, recs, p, Mode::Fixed, anneal_cfg(5, 100000));
  CHECK(s.assignment.orientation == std::vector<std::uint8_t>(t.orientation().begin(), t.orientation().end()));
  if (s.status == SolveStatus::Feasible) CHECK(verify(s, t, recs, p, true).is_feasible());
  CHECK_THROWS_AS(solve_anneal(square_grid(2, 2), enumerate(t, Mode::Free, p), p, Mode::Fixed,
                               anneal_cfg(1, 10)),
                  InvalidArgument);
}

TEST_CASE("anneal is deterministic for a seed") {
  auto t = square_grid(2, 3);
  auto p = default_params();
  apply_uniform_tolerance(p, 5);
  auto recs = enumerate(t, Mode::Free, p);
  auto a = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(9, 30000));
  auto b = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(9, 30000));
  auto c = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(10, 30000));
  CHECK(a.assignment == b.assignment);
  CHECK(a.status == b.status);
  CHECK(a.objective_mhz == b.objective_mhz);
  CHECK_FALSE(a.assignment == c.assignment);
}

TEST_CASE("anneal reports infeasible when the window is too narrow") {
  auto t = path_graph(2);
  auto p = default_params();
  p.f_max_mhz = 5010;
  auto recs = enumerate(t, Mode::Free, p);
  auto s = solve_anneal(t, recs, p, Mode::Free, anneal_cfg(1, 2000));
  CHECK(s.status == SolveStatus::Infeasible);
  CHECK_FALSE(verify(s, t, recs, p, true).is_feasible());
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  c.time_budget_s = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.anneal.cooling_rate = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.anneal.cooling_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("verify: constructed A1 violation and bound monotonicity") {
  auto t = test::oriented_forward(path_graph(3));
  auto p = default_params();
  apply_uniform_tolerance(p, 10);
  auto recs = enumerate(t, Mode::Fixed, p);
  Solution s;
  // tight on A1 between 0 and 1 at the tightened bound (27 MHz)
  s.assignment = {{5400, 5373, 5100}, {0, 0}};
  auto base = verify(s, t, recs, p, false);
  auto tight = verify(s, t, recs, p, true);
  for (const auto& v : base.violations) {
    bool also = false;
    for (const auto& w : tight.violations) also |= w.record == v.record;
    CHECK(also);
  }
  bool a1_before = false;
  for (const auto& v : tight.violations) a1_before |= v.record.family == Family::A1;
  CHECK_FALSE(a1_before);
  s.assignment.frequency_mhz[0] -= 17;
  bool a1_after = false;
  for (const auto& v : verify(s, t, recs, p, true).violations) a1_after |= v.record.family == Family::A1;
  CHECK(a1_after);
  s.assignment.frequency_mhz.pop_back();
  CHECK_THROWS_AS(verify(s, t, recs, p, true), InvalidArgument);
}

TEST_CASE("verify: base never stricter than tightened on random points") {
  auto t = square_grid(2, 3);
  auto p = default_params();
  apply_uniform_tolerance(p, 15);
  p.delta_diff_mhz = 2;
  auto recs = enumerate(t, Mode::Free, p);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> fq(5000, 5500);
  for (int n = 0; n < 300; ++n) {
    Solution s;
    for (std::size_t q = 0; q < t.n_qubits(); ++q) s.assignment.frequency_mhz.push_back(fq(rng));
    s.assignment.orientation = random_orientation(t, rng());
    auto base = verify(s, t, recs, p, false).violations.size();
    auto tight = verify(s, t, recs, p, true).violations.size();
    CHECK(base <= tight);
  }
}

TEST_CASE("fill_slacks takes the smallest active value") {
  auto t = test::oriented_forward(path_graph(2));
  auto p = default_params();
  auto recs = enumerate(t, Mode::Fixed, p);
  Solution s;
  s.assignment = {{5300, 5100}, {0}};
  fill_slacks(s, recs, p, 1350);
  CHECK(*s.slack_mhz[index_of(Family::A1)] == 200);
  CHECK(*s.slack_mhz[index_of(Family::A2)] == 550);
  CHECK(*s.slack_mhz[index_of(Family::E1)] == 200);
  CHECK(*s.slack_mhz[index_of(Family::E2)] == 150);
  CHECK(*s.slack_mhz[index_of(Family::D1)] == 25);
  CHECK_FALSE(s.slack_mhz[index_of(Family::S1)]);
  CHECK(s.objective_mhz == doctest::Approx(200 - 17 + 550 - 30 + 200 - 17 + 150 - 30 + 25 - 2));
}

TEST_CASE("external: wrapper failures") {
  test::TempDir dir;
  auto p = default_params();
  auto m = edge_model(Mode::Fixed, p);
  SolverConfig c;
  c.backend = Backend::External;
  c.time_budget_s = 1;
  c.temp_dir = dir.path().string();

  c.command_template = script(dir, "fail.sh", "exit 3\n");
  CHECK_THROWS_AS(solve_external(m, c), SolverFailure);

  c.command_template = script(dir, "junk.sh", "echo 'not json' > \"$2\"\n");
  CHECK_THROWS_AS(solve_external(m, c), ParseError);

  c.command_template = script(dir, "bad.sh", "echo '{\"status\":\"optimal\",\"values\":{\"zz\":1}}' > \"$2\"\n");
  CHECK_THROWS_AS(solve_external(m, c), ParseError);

  c.command_template = script(dir, "inf.sh", "echo '{\"status\":\"infeasible\"}' > \"$2\"\n");
  CHECK(solve_external(m, c).status == SolveStatus::Infeasible);

  // the work directory is removed unless keep_files is set
  std::size_t left = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path()))
    left += e.path().filename().string().rfind("freqalloc-", 0) == 0;
  CHECK(left == 0);
  c.keep_files = true;
  CHECK(solve_external(m, c).status == SolveStatus::Infeasible);
  for (const auto& e : std::filesystem::directory_iterator(dir.path()))
    left += e.path().filename().string().rfind("freqalloc-", 0) == 0;
  CHECK(left == 1);
}

TEST_CASE("external: placeholders and environment fallback") {
  test::TempDir dir;
  auto p = default_params();
  auto m = edge_model(Mode::Fixed, p);
  auto log = dir / "args.txt";
  std::string body = "echo \"$@\" > '" + log.string() +
                     "'\ntest -s \"$1\" || exit 9\necho '{\"status\":\"infeasible\"}' > \"$2\"\n";
  auto cmd = script(dir, "echo.sh", body);
  SolverConfig c;
  c.backend = Backend::External;
  c.time_budget_s = 7;
  c.command_template = cmd + " {lp} {out} {time}";
  CHECK(solve_external(m, c).status == SolveStatus::Infeasible);
  auto args = test::read_file(log);
  CHECK(args.find("model.lp") != std::string::npos);
  CHECK(args.find("solution.json 7") != std::string::npos);

  c.command_template = cmd;  // {lp} {out} appended
  CHECK(solve_external(m, c).status == SolveStatus::Infeasible);

  c.command_template.clear();
  setenv("FREQALLOC_SOLVER_CMD", cmd.c_str(), 1);
  CHECK(solve_external(m, c).status == SolveStatus::Infeasible);
  unsetenv("FREQALLOC_SOLVER_CMD");
  CHECK_THROWS_AS(solve_external(m, c), SolverFailure);
}

TEST_CASE("external: hung wrapper maps to timeout") {
  test::TempDir dir;
  auto m = edge_model(Mode::Fixed, default_params());
  SolverConfig c;
  c.backend = Backend::External;
  c.time_budget_s = 0.5;
  c.command_template = script(dir, "hang.sh", "sleep 60\n");
  auto start = std::chrono::steady_clock::now();
  auto s = solve_external(m, c);
  double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(s.status == SolveStatus::Timeout);
  CHECK_FALSE(s.has_values());
  CHECK(took < 20);
}

TEST_CASE("external: real solver") {
  if (!test::have_solver()) {
    MESSAGE("SciPy MILP not available; skipped");
    return;
  }
  auto p = default_params();
  SUBCASE("infeasible toy model") {
    auto q = p;
    q.f_max_mhz = 5010;  // A1 needs 17 MHz of room
    auto m = edge_model(Mode::Fixed, q);
    CHECK(solve_external(m, test::external_config(30)).status == SolveStatus::Infeasible);
  }
  SUBCASE("single edge optimum passes verify") {
    for (Mode mode : {Mode::Fixed, Mode::Free}) {
      auto m = edge_model(mode, p);
      auto s = solve_external(m, test::external_config(30));
      REQUIRE(s.status == SolveStatus::Optimal);
      CHECK(verify(s, m.topology, m.records, p, true).is_feasible());
      CHECK(s.objective_mhz == doctest::Approx(s.recomputed_objective(p)).epsilon(1e-9));
    }
  }
  SUBCASE("1 s budget on a 4x4 free model is never a silent optimum") {
    auto t = square_grid(4, 4);
    auto q = p;
    apply_uniform_tolerance(q, 10);
    auto recs = enumerate(t, Mode::Free, q);
    auto m = build(t, recs, q, {});
    auto s = solve_external(m, test::external_config(1));
    CHECK(s.status != SolveStatus::Optimal);
    if (s.has_values()) CHECK(verify(s, t, recs, q, true).is_feasible());
  }
  SUBCASE("big-M inertness") {
    for (const auto& t : {path_graph(3), star_graph(3), cycle_graph(4)}) {
      auto recs = enumerate(t, Mode::Free, p);
      ModelOptions o;
      auto a = solve_external(build(t, recs, p, o), test::external_config(60));
      o.big_m = 2 * default_big_m(p);
      auto b = solve_external(build(t, recs, p, o), test::external_config(60));
      REQUIRE(a.status == SolveStatus::Optimal);
      REQUIRE(b.status == SolveStatus::Optimal);
      CHECK(std::abs(a.objective_mhz - b.objective_mhz) <= 1e-6);
    }
  }
}
