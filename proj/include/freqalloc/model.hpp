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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqalloc/constraints.hpp"
#include "freqalloc/topology.hpp"

namespace freqalloc {

enum class VarType : std::uint8_t { Continuous, Binary };

struct Variable {
  std::string name;
  VarType type = VarType::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

enum class Sense : std::uint8_t { GreaterEqual, LessEqual, Equal };

using Terms = std::vector<std::pair<std::size_t, double>>;

struct LinearRow {
  std::string name;
  Terms terms;
  Sense sense = Sense::GreaterEqual;
  double rhs = 0.0;
};

/// Affine expression over model variables.
struct AffineExpr {
  Terms terms;
  double constant = 0.0;
};

/// Orientation gate: the constraint only binds when the orientation
/// variable equals `active_when`.
struct Gate {
  std::size_t orientation_var = 0;
  std::uint8_t active_when = 0;
};

/// Solver-agnostic mixed-integer model. Treated as immutable once built.
///
/// Variable names: f_<q> frequency, o_<a>_<b> orientation (free mode),
/// s<FAMILY> per-family slack, d_<a>_<b> |f_a - f_b| auxiliary, b_<n>
/// disjunction and sign selectors. Closure edges append _wx / _wy and seam
/// edges _sx / _sy to edge-derived names.
struct ModelIR {
  Mode mode = Mode::Free;
  double big_m = 0.0;
  double slack_cap = 0.0;
  std::vector<Variable> variables;
  std::vector<LinearRow> rows;
  Terms objective;
  double objective_constant = 0.0;

  std::vector<std::size_t> freq_var;                       // per qubit
  std::vector<std::optional<std::size_t>> orientation_var;  // per edge
  std::array<std::optional<std::size_t>, kFamilyCount> slack_var{};
  std::vector<std::uint8_t> fixed_orientation;  // fixed mode only

  Topology topology;
  ConstraintParams params;
  std::vector<ConstraintRecord> records;  // as encoded (after any DIFF cap)

  std::size_t count(VarType type) const;
  std::optional<std::size_t> find_variable(std::string_view name) const;
};

/// Incremental row/variable builder used by `build`.
class ModelBuilder {
 public:
  explicit ModelBuilder(double big_m) : big_m_(big_m) {}

  std::size_t add_variable(std::string name, VarType type, double lower, double upper);
  void add_row(LinearRow row);
  std::size_t fresh_binary();

  /// Encodes |expr| >= slack + rhs_constant (slack optional) as a disjunction
  /// on a fresh binary b:
  ///    expr >= slack + k - M*b - G
  ///   -expr >= slack + k - M*(1-b) - G
  /// where G is M*o (binds when o = 0), M*(1-o) (binds when o = 1) or absent.
  /// Returns the index of the fresh binary.
  std::size_t linearize_abs_geq(const AffineExpr& expr, std::optional<std::size_t> slack,
                                double rhs_constant, std::optional<Gate> gate,
                                const std::string& name);

  /// Encodes expr >= rhs_constant, relaxed by the gate when inactive.
  void gated_geq(const AffineExpr& expr, double rhs_constant, std::optional<Gate> gate,
                 const std::string& name);

  double big_m() const { return big_m_; }
  std::vector<Variable>& variables() { return variables_; }
  std::vector<LinearRow>& rows() { return rows_; }

 private:
  double big_m_;
  std::size_t binary_counter_ = 0;
  std::vector<Variable> variables_;
  std::vector<LinearRow> rows_;
};

struct ModelOptions {
  Mode mode = Mode::Free;
  std::optional<double> big_m;
  std::optional<std::size_t> diff_pair_cap;
  /// Fixed-mode orientation bits; defaults to the topology's own orientation.
  std::optional<std::vector<std::uint8_t>> orientation;
};

/// Upper bound placed on every slack variable: 2W + |alpha|, which no
/// instance expression can exceed inside a window of width W.
double default_slack_cap(const ConstraintParams& params);
/// Default big-M: large enough that every disjunct and gate can be relaxed
/// for any slack up to the cap, plus a 100 MHz margin.
double default_big_m(const ConstraintParams& params);
/// Smallest big-M accepted: window width + |alpha| + max base bound.
double minimum_big_m(const ConstraintParams& params);

ModelIR build(const Topology& topo, std::span<const ConstraintRecord> records,
              const ConstraintParams& params, const ModelOptions& options);

/// CPLEX-LP text (Maximize / Subject To / Bounds / Binary / End).
/// Byte-identical for identical models.
std::string export_lp(const ModelIR& model);

std::string variable_suffix(const Edge& e);

enum class SolveStatus : std::uint8_t { Optimal, Feasible, Infeasible, Timeout };

std::string_view to_string(SolveStatus s);
SolveStatus status_from_string(std::string_view s);

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  FrequencyAssignment assignment;
  std::array<std::optional<double>, kFamilyCount> slack_mhz{};
  double objective_mhz = 0.0;

  bool has_values() const { return !assignment.frequency_mhz.empty(); }
  /// sum over present slacks of (slack - base bound)
  double recomputed_objective(const ConstraintParams& params) const;
};

/// Reads the solver output format: {"status": ..., "values": {name: number},
/// "objective": number (optional)}. Binary values within 1e-6 of 0 or 1 are
/// rounded; unknown names raise ParseError, far-from-integral binaries
/// IntegralityError.
Solution import_solution(std::string_view text, const ModelIR& model);

}  // namespace freqalloc
