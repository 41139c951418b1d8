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

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "freqalloc/boundary.hpp"
#include "freqalloc/constraints.hpp"
#include "freqalloc/model.hpp"
#include "freqalloc/topology.hpp"

namespace freqalloc {

using PresetTable = std::map<std::string, BoundaryCondition, std::less<>>;

/// Built-in presets. The x axis closes columns with a row shift (and a flip
/// for the MBC family); the y axis is a plain wrap:
///   PBC1 shift 0, PBC2 shift 1, PBC3 shift 2,
///   MBC1 flip + shift 0, MBC2 flip + shift 1, MBC3 flip + shift 2.
const PresetTable& builtin_presets();

/// Looks `name` up in `table` (default: built-in). Throws InvalidArgument
/// for unknown names and for presets that flip the y axis.
BoundaryCondition preset_bc(std::string_view name, const PresetTable& table = builtin_presets());

struct ChipAssembly {
  Topology chip;                    // oriented; seam edges tagged via_bc = false
  FrequencyAssignment assignment;   // over `chip`
  Topology unit;                    // wrapped unit the chip was tiled from
  FrequencyAssignment unit_assignment;
  int unit_rows = 0;
  int unit_cols = 0;
  int nx = 0;
  int ny = 0;
  BoundaryCondition bc;
  std::vector<QubitId> unit_qubit_of;    // per chip qubit
  std::vector<std::size_t> unit_edge_of;  // per chip edge, index into `unit`

  bool is_seam(std::size_t chip_edge) const {
    const auto& w = chip.edge(chip_edge).wrap;
    return w.has_value() && !w->via_bc;
  }
};

struct TileOptions {
  /// Require the unit solution to be feasible on wrap(unit, bc) at
  /// tightened bounds (collision families only).
  bool require_feasible = true;
};

/// Tiles `nx` x `ny` copies of the unit pattern. `solved` is the topology the
/// unit solution refers to (plain or wrapped with any bc); its orientation
/// bits carry over to every chip edge whose unit image exists in `solved`.
/// Images missing there (a bc other than the one optimized for) are oriented
/// from the higher to the lower frequency.
///
/// Chip qubits are numbered row-major over a (rows*ny) x (cols*nx) window of
/// the unit's lattice kind.
ChipAssembly tile(const Topology& solved, const Solution& unit_solution,
                  const BoundaryCondition& bc, int nx, int ny, const ConstraintParams& params,
                  const TileOptions& options = {});

/// check() on the whole chip at base bounds.
ViolationReport chip_check(const ChipAssembly& chip, const ConstraintParams& params_base);

/// Whether a record involves a seam edge of the chip.
bool touches_seam(const ChipAssembly& chip, const ConstraintRecord& record);

}  // namespace freqalloc
