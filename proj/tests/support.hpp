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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freqalloc/constraints.hpp"
#include "freqalloc/model.hpp"
#include "freqalloc/solve.hpp"
#include "freqalloc/topology.hpp"

namespace freqalloc::test {

/// Solver command template configured at build time; empty when SciPy is missing.
std::string solver_command();
bool have_solver();

std::string cli_path();
std::filesystem::path source_dir();

/// Fresh directory under the build tree's temp area, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs a shell command and captures its output.
RunResult run(const std::string& command);
/// Runs the CLI binary with the given argument string.
RunResult run_cli(const std::string& args);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Topology with every edge oriented a -> b.
Topology oriented_forward(Topology topo);

/// Path/cycle/grid instances used by the soundness suites.
struct Instance {
  std::string name;
  Topology topo;
};
std::vector<Instance> soundness_suite();

/// External-backend config for tests; budget in seconds.
SolverConfig external_config(double budget_s);

/// Build + external solve in the given mode; orientation is required in
/// fixed mode and taken from the topology when absent.
Solution solve_mode(const Topology& topo, const ConstraintParams& params, Mode mode,
                    double budget_s,
                    std::optional<std::vector<std::uint8_t>> orientation = std::nullopt);

/// Free-mode anneal on an already wrapped unit cell.
Solution anneal_unit(const Topology& wrapped, const ConstraintParams& params, std::uint64_t seed,
                     std::size_t moves = 300000);

}  // namespace freqalloc::test
