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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"

#include "freqalloc/assembly.hpp"
#include "freqalloc/boundary.hpp"
#include "freqalloc/constraints.hpp"
#include "freqalloc/model.hpp"
#include "freqalloc/topology.hpp"
#include "freqalloc/yield.hpp"

// JSON documents. Readers reject unknown keys and wrong types with
// ParseError; writers emit keys in a fixed order so output is byte-stable.
namespace freqalloc::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// {n_qubits, edges: [[a, b] | [a, b, "x"|"y"|"sx"|"sy"]], orientation: {"a-b": bit},
//  geometry: {kind, rows, cols, cells_x, cells_y, rings, sites, bc}}
Json to_json(const Topology& topo);
Topology topology_from_json(const Json& j);

// {name, x_wrap: {shift, flip, enabled}, y_wrap: {...}}
Json to_json(const BoundaryCondition& bc);
BoundaryCondition bc_from_json(const Json& j);
// {"PBC1": {x_wrap, y_wrap}, ...}
PresetTable presets_from_json(const Json& j);

// {bounds: {A1: 17, ...}, alpha_mhz, eps_tol: {...}, delta_diff_mhz,
//  diff_comparator: "separation"|"literal", f_window_mhz: [lo, hi], enabled: {A1: true, ...}}
// Missing keys keep the values of `base`.
Json to_json(const ConstraintParams& params);
ConstraintParams params_from_json(const Json& j, const ConstraintParams& base = default_params());

// {schema_version, status, objective_mhz, frequencies_mhz: [...],
//  orientation: {"a-b": bit}, slacks_mhz: {A1: ...}, mode, params, topology: {...}}
struct SolutionDoc {
  Solution solution;
  Topology topology;  // with the solution's orientation applied
  std::optional<ConstraintParams> params;
  std::optional<Mode> mode;
};

Json solution_to_json(const Solution& solution, const Topology& topo,
                      const ConstraintParams* params = nullptr,
                      std::optional<Mode> mode = std::nullopt);
SolutionDoc solution_from_json(const Json& j);

Json to_json(std::span<const YieldEstimate> estimates);

Json chip_to_json(const ChipAssembly& chip);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string dump(const Json& j);

}  // namespace freqalloc::io
