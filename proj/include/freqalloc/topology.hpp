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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freqalloc/boundary.hpp"

namespace freqalloc {

using QubitId = std::uint32_t;

enum class Axis : std::uint8_t { X, Y };

/// Marks an edge that does not lie inside the lattice window.
///
/// `via_bc == true` marks a closure edge of a wrapped unit cell (created by
/// `wrap`). `via_bc == false` marks a physical seam between two modules of an
/// assembled chip (created by `tile`).
struct WrapTag {
  Axis axis = Axis::X;
  bool via_bc = true;

  friend bool operator==(const WrapTag&, const WrapTag&) = default;
};

/// Undirected edge, stored canonically with a < b.
///
/// Wrapped unit cells with an extent of 2 along an axis contain a closure
/// edge parallel to an ordinary edge; the two are told apart by `wrap`.
struct Edge {
  QubitId a = 0;
  QubitId b = 0;
  std::optional<WrapTag> wrap;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Control/target view of an edge under an orientation bit.
/// Bit 0 means a -> b (a is the control), bit 1 means b -> a.
struct DirectedEdge {
  QubitId control = 0;
  QubitId target = 0;
};

inline DirectedEdge directed(const Edge& e, std::uint8_t bit) {
  return bit == 0 ? DirectedEdge{e.a, e.b} : DirectedEdge{e.b, e.a};
}

enum class LatticeKind : std::uint8_t {
  Custom,    // no geometry
  Square,    // full rows x cols grid
  HexCells,  // honeycomb patch of cells_x x cells_y hexagons
  HexRings,  // honeycomb flake of concentric rings of hexagons
  HexBrick,  // honeycomb in brick-wall form on a full rows x cols window
};

struct Site {
  int row = 0;
  int col = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

/// Lattice metadata. Square and HexBrick lattices occupy a full rows x cols
/// window with row-major qubit ids; hexagon patches list their sites.
struct Geometry {
  LatticeKind kind = LatticeKind::Custom;
  int rows = 0;
  int cols = 0;
  int cells_x = 0;
  int cells_y = 0;
  int rings = 0;
  std::vector<Site> sites;               // one per qubit, empty for Custom
  std::optional<BoundaryCondition> bc;   // set on wrapped unit cells

  bool is_full_window() const {
    return kind == LatticeKind::Square || kind == LatticeKind::HexBrick;
  }
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

class Topology {
 public:
  Topology() = default;
  /// Validates and canonicalizes `edges`; throws InvalidArgument on
  /// self-loops, out-of-range ids or duplicates.
  Topology(std::size_t n_qubits, std::vector<Edge> edges, Geometry geometry = {});

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t n_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  const Geometry& geometry() const { return geometry_; }

  bool has_orientation() const { return orientation_.has_value(); }
  std::span<const std::uint8_t> orientation() const;
  DirectedEdge directed_edge(std::size_t i) const;
  void set_orientation(std::vector<std::uint8_t> bits);
  void clear_orientation() { orientation_.reset(); }

  /// Edge indices incident to q, in ascending order.
  std::span<const std::size_t> incident(QubitId q) const;
  std::size_t degree(QubitId q) const { return incident(q).size(); }
  QubitId other_end(std::size_t edge, QubitId q) const;

  /// First edge joining u and v with the given tag (nullopt = plain edge).
  std::optional<std::size_t> find_edge(QubitId u, QubitId v,
                                       std::optional<WrapTag> tag = std::nullopt) const;
  /// First edge joining u and v, preferring the plain one.
  std::optional<std::size_t> find_any_edge(QubitId u, QubitId v) const;

  bool is_simple() const;
  std::size_t count_wrap_edges() const;

  /// Key used in orientation maps: "a-b", with "~x"/"~y" for closure edges
  /// and "~sx"/"~sy" for seam edges.
  std::string edge_key(std::size_t i) const;

  friend bool operator==(const Topology& l, const Topology& r) {
    return l.n_qubits_ == r.n_qubits_ && l.edges_ == r.edges_ &&
           l.orientation_ == r.orientation_ && l.geometry_ == r.geometry_;
  }

 private:
  void index();

  std::size_t n_qubits_ = 0;
  std::vector<Edge> edges_;
  std::optional<std::vector<std::uint8_t>> orientation_;
  Geometry geometry_;
  std::vector<std::size_t> incidence_offsets_;
  std::vector<std::size_t> incidence_;
};

/// One spectator instance: the gate control -> target and a third qubit
/// adjacent to the target through `spectator_edge`.
struct SpectatorTriple {
  QubitId control = 0;
  QubitId target = 0;
  QubitId spectator = 0;
  std::size_t gate_edge = 0;
  std::size_t spectator_edge = 0;
  friend bool operator==(const SpectatorTriple&, const SpectatorTriple&) = default;
};

/// Spectators of the gate `control -> target`: one per edge incident to the
/// target other than the gate edge itself.
std::vector<SpectatorTriple> edge_spectators(const Topology& topo, std::size_t gate_edge,
                                             std::uint8_t orientation_bit);
/// Same, looking the gate edge up by endpoints. Throws if they are not adjacent.
std::vector<SpectatorTriple> spectator_triples(const Topology& topo, QubitId control,
                                               QubitId target);

// Generators. Square and hexagon generators number qubits row-major over
// their (row, col) sites.
Topology square_grid(int rows, int cols);
Topology hex_grid(int cells_x, int cells_y);
Topology hex_rings(int rings);
Topology hex_brick(int rows, int cols);
Topology path_graph(int n_qubits);
Topology cycle_graph(int n_qubits);
Topology star_graph(int leaves);

/// Whether the infinite lattice of `kind` has a bond between plane points p
/// and p + (1,0) (horizontal) or p + (0,1) (vertical).
bool lattice_bond(LatticeKind kind, PlanePoint p, bool vertical);

/// Unit cell plus closure edges joining opposite boundaries under `bc`.
/// Requires a full-window lattice without closure edges; an enabled axis needs
/// an extent of at least 2 and a bc consistent with the lattice's bond pattern.
Topology wrap(const Topology& unit, const BoundaryCondition& bc);

/// Orientation with the control on the even sublattice ((row + col) even).
/// Edges between sites of equal parity, and topologies without sites, get
/// the lower qubit id as control.
std::vector<std::uint8_t> checkerboard_orientation(const Topology& topo);
/// Independent fair coin per edge from a generator seeded with `seed`.
std::vector<std::uint8_t> random_orientation(const Topology& topo, std::uint64_t seed);

/// Drops closure edges (and any orientation), returning the bare unit cell.
Topology strip_wrap(const Topology& wrapped);

}  // namespace freqalloc
