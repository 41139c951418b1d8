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
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqalloc/topology.hpp"

namespace freqalloc {

/// Collision families. All frequencies are in MHz.
///
///   A1  |f_i - f_j| >= d                  per edge
///   A2  |f_i - f_j - alpha| >= d          per edge (canonical order i < j)
///   C1  f_i + alpha <= f_d <= f_i         per gate i -> j, f_d = f_j
///   E1  |f_d - f_i| >= d                  per gate
///   E2  |f_d - f_i - alpha| >= d          per gate
///   D1  |f_d - f_i - alpha/2| >= d        per gate
///   S1  |f_d - f_k| >= d                  per spectator triple (i, j, k)
///   S2  |f_d - f_k - alpha| >= d          per spectator triple
///   T1  |f_d + f_k - 2 f_i - alpha| >= d  per spectator triple
///   DIFF ||f_k1 - f_k2| - |f_l1 - f_l2|| >= delta_diff  per vertex-disjoint edge pair
enum class Family : std::uint8_t { A1, A2, C1, E1, E2, D1, S1, S2, T1, DIFF };

inline constexpr std::size_t kFamilyCount = 10;
inline constexpr std::array<Family, kFamilyCount> kAllFamilies = {
    Family::A1, Family::A2, Family::C1, Family::E1, Family::E2,
    Family::D1, Family::S1, Family::S2, Family::T1, Family::DIFF};
/// Families that own a slack variable in the optimization model.
inline constexpr std::array<Family, 8> kSlackFamilies = {
    Family::A1, Family::A2, Family::E1, Family::E2, Family::D1, Family::S1, Family::S2, Family::T1};

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);
constexpr std::size_t index_of(Family f) { return static_cast<std::size_t>(f); }
bool has_slack(Family f);
bool is_gate_family(Family f);       // C1, E1, E2, D1
bool is_spectator_family(Family f);  // S1, S2, T1

/// Comparator used for the edgewise-difference family.
enum class DiffComparator : std::uint8_t {
  Separation,  // ||dk| - |dl|| >= delta_diff
  Literal,     // ||dk| - |dl|| <= delta_diff
};

struct ConstraintParams {
  std::array<double, kFamilyCount> base_bound_mhz{};  // C1 and DIFF unused
  double alpha_mhz = -350.0;
  std::array<double, kFamilyCount> eps_tol_mhz{};
  double delta_diff_mhz = 0.0;
  DiffComparator diff_comparator = DiffComparator::Separation;
  double f_min_mhz = 5000.0;
  double f_max_mhz = 5500.0;
  /// Families taking part in enumeration and checking.
  std::array<bool, kFamilyCount> enabled{true, true, true, true, true,
                                         true, true, true, true, true};

  double base(Family f) const { return base_bound_mhz[index_of(f)]; }
  double eps(Family f) const { return eps_tol_mhz[index_of(f)]; }
  /// Required value at base or tightened bounds. C1's requirement is the
  /// distance of f_d inside its window (0 at base bounds).
  double required(Family f, bool tightened) const;
  bool is_enabled(Family f) const { return enabled[index_of(f)]; }
  double window_width() const { return f_max_mhz - f_min_mhz; }

  /// Throws InvalidArgument when a base bound is not positive or the window is empty.
  void validate() const;
  /// Non-fatal configuration oddities.
  std::vector<std::string> warnings() const;

  friend bool operator==(const ConstraintParams&, const ConstraintParams&) = default;
};

/// Table bounds: A1 17, A2 30, E1 17, E2 30, D1 2, S1 17, S2 25, T1 17 MHz;
/// alpha -350 MHz; no tightening; edgewise differences off; window [5000, 5500].
ConstraintParams default_params();

/// Tightens every bounded family except D1 by `eps_mhz`.
void apply_uniform_tolerance(ConstraintParams& params, double eps_mhz);

enum class OrientationCase : std::uint8_t { Forward = 0, Reverse = 1, Undirected = 2 };

enum class Mode : std::uint8_t { Fixed, Free };

/// One constraint instance.
///
/// Participants: A1/A2 (a, b) canonical; gate families (control, target);
/// spectator families (control, target, spectator); DIFF (k1, k2, l1, l2).
/// `edge` is the gate edge (or the first DIFF edge); `aux_edge` is the
/// spectator edge or the second DIFF edge.
struct ConstraintRecord {
  static constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();

  Family family = Family::A1;
  std::array<QubitId, 4> participants{};
  std::uint8_t arity = 0;
  OrientationCase orientation = OrientationCase::Undirected;
  std::size_t edge = kNoEdge;
  std::size_t aux_edge = kNoEdge;

  std::span<const QubitId> qubits() const { return {participants.data(), arity}; }
  /// Whether the record applies under the given per-edge orientation bits.
  bool active(std::span<const std::uint8_t> orientation_bits) const {
    return orientation == OrientationCase::Undirected ||
           orientation_bits[edge] == static_cast<std::uint8_t>(orientation);
  }
  friend bool operator==(const ConstraintRecord&, const ConstraintRecord&) = default;
};

/// Affine form c + sum coef_t * f[qubit_t] with up to three terms.
struct LinearForm {
  struct Term {
    QubitId qubit = 0;
    double coef = 0.0;
  };
  std::array<Term, 3> terms{};
  std::uint8_t size = 0;
  double constant = 0.0;

  double eval(std::span<const double> freq) const {
    double v = constant;
    for (std::uint8_t t = 0; t < size; ++t) v += terms[t].coef * freq[terms[t].qubit];
    return v;
  }
};

/// Linear shape of a non-DIFF record: abs families give one form F with the
/// requirement |F| >= bound; C1 gives two forms, each required >= bound.
struct RecordForms {
  bool absolute = true;
  std::array<LinearForm, 2> forms{};
  std::uint8_t count = 0;
};

RecordForms linear_forms(const ConstraintRecord& record, double alpha_mhz);

/// Frequencies (MHz) per qubit and orientation bits per edge of a topology.
struct FrequencyAssignment {
  std::vector<double> frequency_mhz;
  std::vector<std::uint8_t> orientation;
  friend bool operator==(const FrequencyAssignment&, const FrequencyAssignment&) = default;
};

struct Violation {
  ConstraintRecord record;
  double measured_mhz = 0.0;
  double required_mhz = 0.0;
  double margin_mhz = 0.0;  // negative when violated
};

struct ViolationReport {
  std::vector<Violation> violations;
  bool is_feasible() const { return violations.empty(); }
};

/// Constraint instances for a topology.
///
/// Fixed mode uses `orientation_bits` (or the topology's own orientation) and
/// emits each gate and spectator record once. Free mode emits both
/// orientation cases of every gate and spectator record. DIFF records are
/// emitted for every vertex-disjoint edge pair when delta_diff > 0.
std::vector<ConstraintRecord> enumerate(const Topology& topo, Mode mode,
                                        const ConstraintParams& params);
std::vector<ConstraintRecord> enumerate(const Topology& topo, Mode mode,
                                        const ConstraintParams& params,
                                        std::span<const std::uint8_t> orientation_bits);

/// All unordered pairs of edges sharing no endpoint, as edge indices.
std::vector<std::pair<std::size_t, std::size_t>> edge_difference_pairs(const Topology& topo);

/// Evaluates one record under `freq`. Returns the measured value and
/// required value; DIFF honours params.diff_comparator.
Violation evaluate(const ConstraintRecord& record, std::span<const double> freq,
                   const ConstraintParams& params, bool tightened);

/// Checks the assignment against every collision instance at base bounds
/// (no tightening, no DIFF) under the assignment's own orientation.
ViolationReport check(const FrequencyAssignment& assignment, const Topology& topo,
                      const ConstraintParams& params_at_base);

void require_complete(const FrequencyAssignment& assignment, const Topology& topo);

}  // namespace freqalloc
