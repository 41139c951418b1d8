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

#include "freqalloc/solve.hpp"

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "freqalloc/error.hpp"

namespace freqalloc {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

void replace_all(std::string& s, std::string_view from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

fs::path make_work_dir(const SolverConfig& cfg) {
  fs::path base;
  if (!cfg.temp_dir.empty()) {
    base = cfg.temp_dir;
  } else if (const char* env = std::getenv("FREQALLOC_TMPDIR"); env != nullptr && *env != '\0') {
    base = env;
  } else {
    base = fs::temp_directory_path();
  }
  fs::create_directories(base);
  std::string templ = (base / "freqalloc-XXXXXX").string();
  if (::mkdtemp(templ.data()) == nullptr) {
    throw SolverFailure("cannot create a work directory under " + base.string());
  }
  return templ;
}

struct ChildResult {
  bool timed_out = false;
  int exit_code = 0;
};

ChildResult run_shell(const std::string& command, double limit_s) {
  const pid_t pid = ::fork();
  if (pid < 0) throw SolverFailure("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  using clock = std::chrono::steady_clock;
  const auto deadline = clock::now() + std::chrono::duration<double>(limit_s);
  ChildResult result;
  int status = 0;
  for (;;) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw SolverFailure("waitpid failed");
    if (clock::now() >= deadline) {
      result.timed_out = true;
      ::kill(-pid, SIGTERM);
      const auto hard = clock::now() + std::chrono::seconds(2);
      while (::waitpid(pid, &status, WNOHANG) == 0) {
        if (clock::now() >= hard) {
          ::kill(-pid, SIGKILL);
          ::waitpid(pid, &status, 0);
          break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  }
  return result;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void SolverConfig::validate() const {
  if (!(time_budget_s > 0.0)) throw InvalidArgument("time budget must be positive");
  if (!(anneal.cooling_rate > 0.0 && anneal.cooling_rate < 1.0)) {
    throw InvalidArgument("cooling rate must lie in (0, 1)");
  }
  if (!(anneal.init_temp > 0.0)) throw InvalidArgument("initial temperature must be positive");
  if (!(anneal.freq_step_mhz > 0.0)) throw InvalidArgument("frequency step must be positive");
  if (!(anneal.grid_mhz > 0.0)) throw InvalidArgument("grid must be positive");
  if (anneal.moves_per_temp < 1) throw InvalidArgument("moves per temperature must be at least 1");
}

Solution solve_external(const ModelIR& model, const SolverConfig& cfg) {
  cfg.validate();
  std::string command = cfg.command_template;
  if (command.empty()) {
    if (const char* env = std::getenv("FREQALLOC_SOLVER_CMD"); env != nullptr) command = env;
  }
  if (command.empty()) {
    throw SolverFailure("no solver command (set one or export FREQALLOC_SOLVER_CMD)");
  }
  if (command.find("{lp}") == std::string::npos && command.find("{out}") == std::string::npos) {
    command += " {lp} {out}";
  }
  const fs::path dir = make_work_dir(cfg);
  const fs::path lp = dir / "model.lp";
  const fs::path out = dir / "solution.json";
  {
    std::ofstream f(lp, std::ios::binary);
    f << export_lp(model);
    if (!f) throw SolverFailure("cannot write " + lp.string());
  }
  replace_all(command, "{lp}", shell_quote(lp.string()));
  replace_all(command, "{out}", shell_quote(out.string()));
  std::ostringstream budget;
  budget << cfg.time_budget_s;
  replace_all(command, "{time}", budget.str());

  // The wrapper gets the budget via {time}; the grace period lets it write
  // its incumbent before we step in.
  const double grace = std::max(5.0, 0.1 * cfg.time_budget_s);
  const ChildResult child = run_shell(command, cfg.time_budget_s + grace);

  auto cleanup = [&] {
    if (!cfg.keep_files) {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  };
  std::string text;
  if (fs::exists(out)) text = read_file(out);
  cleanup();

  if (text.empty()) {
    if (child.timed_out) {
      Solution timeout;
      timeout.status = SolveStatus::Timeout;
      return timeout;
    }
    throw SolverFailure("solver exited with code " + std::to_string(child.exit_code) +
                        " and wrote no solution");
  }
  Solution sol = import_solution(text, model);
  if (child.timed_out) sol.status = SolveStatus::Timeout;
  return sol;
}

ViolationReport verify(const Solution& solution, const Topology& topo,
                       std::span<const ConstraintRecord> records, const ConstraintParams& params,
                       bool tightened, double tol_mhz) {
  require_complete(solution.assignment, topo);
  ViolationReport report;
  for (const ConstraintRecord& r : records) {
    if (r.family == Family::DIFF && !tightened) continue;
    for (QubitId q : r.qubits()) {
      if (q >= topo.n_qubits()) throw InvalidArgument("record references an unknown qubit");
    }
    if (!r.active(solution.assignment.orientation)) continue;
    Violation v = evaluate(r, solution.assignment.frequency_mhz, params, tightened);
    if (v.margin_mhz < -tol_mhz) report.violations.push_back(v);
  }
  return report;
}

void fill_slacks(Solution& solution, std::span<const ConstraintRecord> records,
                 const ConstraintParams& params, double slack_cap) {
  solution.slack_mhz = {};
  for (const ConstraintRecord& r : records) {
    if (!has_slack(r.family)) continue;
    auto& slot = solution.slack_mhz[index_of(r.family)];
    if (!slot) slot = slack_cap;
    if (!r.active(solution.assignment.orientation)) continue;
    const Violation v = evaluate(r, solution.assignment.frequency_mhz, params, false);
    slot = std::min(*slot, v.measured_mhz);
  }
  solution.objective_mhz = solution.recomputed_objective(params);
}

}  // namespace freqalloc
