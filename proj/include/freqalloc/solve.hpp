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
#include <optional>
#include <span>
#include <string>

#include "freqalloc/constraints.hpp"
#include "freqalloc/model.hpp"
#include "freqalloc/topology.hpp"

namespace freqalloc {

struct AnnealConfig {
  double init_temp = 20.0;       // MHz of energy
  double cooling_rate = 0.95;    // per temperature step
  std::size_t moves_per_temp = 1000;
  double freq_step_mhz = 20.0;   // std-dev of a single-qubit jump
  double grid_mhz = 1.0;         // frequencies are kept on this grid
  std::size_t max_moves = 100000;
  double reward_weight = 0.01;   // weight of the min-margin reward once feasible
};

enum class Backend : std::uint8_t { External, Anneal };

struct SolverConfig {
  Backend backend = Backend::Anneal;
  /// Shell command; {lp}, {out} and {time} are substituted. Without
  /// {lp}/{out}, " {lp} {out}" is appended.
  std::string command_template;
  double time_budget_s = 60.0;
  std::uint64_t seed = 1;
  AnnealConfig anneal;
  /// Directory for LP/solution files; empty means FREQALLOC_TMPDIR or the
  /// system temp directory.
  std::string temp_dir;
  bool keep_files = false;

  /// Throws InvalidArgument on a non-positive budget or a cooling rate
  /// outside (0, 1).
  void validate() const;
};

/// Writes the model as LP, runs the command and reads the solution file.
/// A command that outlives time_budget_s (+ a grace period) is killed; any
/// solution file it left behind is read and reported with status timeout.
Solution solve_external(const ModelIR& model, const SolverConfig& cfg);

/// Simulated annealing over on-grid frequencies and, in free mode,
/// orientation bits. `records` must be enumerated for `mode`; fixed mode uses
/// the topology's orientation. Returns the best state found; status is
/// feasible iff it has no violation at tightened bounds.
Solution solve_anneal(const Topology& topo, std::span<const ConstraintRecord> records,
                      const ConstraintParams& params, Mode mode, const SolverConfig& cfg);

/// Evaluates every record active under the solution's orientation directly
/// (no big-M). DIFF records count only at tightened bounds. `tol_mhz`
/// absorbs solver round-off.
ViolationReport verify(const Solution& solution, const Topology& topo,
                       std::span<const ConstraintRecord> records, const ConstraintParams& params,
                       bool tightened, double tol_mhz = 1e-6);

/// Slack values and objective implied by an assignment: per family the
/// smallest active |expression|, capped at `slack_cap`.
void fill_slacks(Solution& solution, std::span<const ConstraintRecord> records,
                 const ConstraintParams& params, double slack_cap);

}  // namespace freqalloc
