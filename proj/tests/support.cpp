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

#include "support.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace freqalloc::test {

std::string solver_command() { return FREQALLOC_TEST_SOLVER_CMD; }
bool have_solver() { return !solver_command().empty(); }
std::string cli_path() { return FREQALLOC_CLI_PATH; }
std::filesystem::path source_dir() { return FREQALLOC_SOURCE_DIR; }

TempDir::TempDir() {
  auto base = std::filesystem::temp_directory_path();
  std::string pattern = (base / "freqalloc-test-XXXXXX").string();
  if (mkdtemp(pattern.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = pattern;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

RunResult run(const std::string& command) {
  RunResult r;
  std::string full = command + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

RunResult run_cli(const std::string& args) { return run("'" + cli_path() + "' " + args); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Topology oriented_forward(Topology topo) {
  topo.set_orientation(std::vector<std::uint8_t>(topo.n_edges(), 0));
  return topo;
}

std::vector<Instance> soundness_suite() {
  std::vector<Instance> out;
  for (int n = 2; n <= 7; ++n) out.push_back({"path" + std::to_string(n), path_graph(n)});
  for (int n = 3; n <= 7; ++n) out.push_back({"cycle" + std::to_string(n), cycle_graph(n)});
  for (int l = 2; l <= 4; ++l) out.push_back({"star" + std::to_string(l), star_graph(l)});
  out.push_back({"grid1x2", square_grid(1, 2)});
  out.push_back({"grid1x3", square_grid(1, 3)});
  out.push_back({"grid2x2", square_grid(2, 2)});
  out.push_back({"grid2x3", square_grid(2, 3)});
  out.push_back({"grid3x2", square_grid(3, 2)});
  out.push_back({"grid3x3", square_grid(3, 3)});
  return out;
}

SolverConfig external_config(double budget_s) {
  SolverConfig cfg;
  cfg.backend = Backend::External;
  cfg.command_template = solver_command();
  cfg.time_budget_s = budget_s;
  return cfg;
}

Solution solve_mode(const Topology& topo, const ConstraintParams& params, Mode mode,
                    double budget_s, std::optional<std::vector<std::uint8_t>> orientation) {
  std::vector<ConstraintRecord> records;
  ModelOptions opts;
  opts.mode = mode;
  if (mode == Mode::Fixed) {
    std::vector<std::uint8_t> bits =
        orientation ? *orientation
                    : std::vector<std::uint8_t>(topo.orientation().begin(), topo.orientation().end());
    records = enumerate(topo, Mode::Fixed, params, bits);
    opts.orientation = bits;
  } else {
    records = enumerate(topo, Mode::Free, params);
  }
  ModelIR model = build(topo, records, params, opts);
  return solve_external(model, external_config(budget_s));
}

Solution anneal_unit(const Topology& wrapped, const ConstraintParams& params, std::uint64_t seed,
                     std::size_t moves) {
  SolverConfig cfg;
  cfg.seed = seed;
  cfg.anneal.max_moves = moves;
  auto records = enumerate(wrapped, Mode::Free, params);
  return solve_anneal(wrapped, records, params, Mode::Free, cfg);
}

}  // namespace freqalloc::test
