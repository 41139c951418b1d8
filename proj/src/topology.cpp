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

#include "freqalloc/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <set>
#include <tuple>
#include <utility>

#include "freqalloc/error.hpp"

namespace freqalloc {

namespace {

int tag_rank(const std::optional<WrapTag>& t) {
  if (!t) return 0;
  int base = t->via_bc ? 1 : 3;
  return base + (t->axis == Axis::Y ? 1 : 0);
}

auto edge_order_key(const Edge& e) { return std::make_tuple(e.a, e.b, tag_rank(e.wrap)); }

void require_positive(int value, const char* what) {
  if (value < 1) {
    throw InvalidArgument(std::string(what) + " must be >= 1, got " + std::to_string(value));
  }
}

long floor_mod(long v, long m) {
  long r = v % m;
  return r < 0 ? r + m : r;
}

// Builds a topology from a set of lattice sites and bonds, numbering sites
// row-major.
Topology from_sites(const std::set<std::pair<int, int>>& sites,
                    const std::set<std::pair<std::pair<int, int>, std::pair<int, int>>>& bonds,
                    Geometry geometry) {
  std::map<std::pair<int, int>, QubitId> id_of;
  geometry.sites.clear();
  for (const auto& rc : sites) {
    id_of.emplace(rc, static_cast<QubitId>(geometry.sites.size()));
    geometry.sites.push_back({rc.first, rc.second});
  }
  std::vector<Edge> edges;
  edges.reserve(bonds.size());
  for (const auto& [p, q] : bonds) {
    edges.push_back({id_of.at(p), id_of.at(q), std::nullopt});
  }
  return Topology(sites.size(), std::move(edges), std::move(geometry));
}

// Full-window lattice of `kind` with row-major ids.
Topology window_lattice(LatticeKind kind, int rows, int cols) {
  Geometry g;
  g.kind = kind;
  g.rows = rows;
  g.cols = cols;
  std::vector<Edge> edges;
  auto id = [cols](int r, int c) { return static_cast<QubitId>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      g.sites.push_back({r, c});
      if (c + 1 < cols && lattice_bond(kind, {c, r}, false)) {
        edges.push_back({id(r, c), id(r, c + 1), std::nullopt});
      }
      if (r + 1 < rows && lattice_bond(kind, {c, r}, true)) {
        edges.push_back({id(r, c), id(r + 1, c), std::nullopt});
      }
    }
  }
  return Topology(static_cast<std::size_t>(rows) * cols, std::move(edges), std::move(g));
}

// Adds the six sites and six bonds of the hexagon whose top-left corner in
// brick-wall coordinates is (row, col).
void add_hexagon(int row, int col, std::set<std::pair<int, int>>& sites,
                 std::set<std::pair<std::pair<int, int>, std::pair<int, int>>>& bonds) {
  for (int dr = 0; dr < 2; ++dr) {
    for (int dc = 0; dc < 3; ++dc) sites.insert({row + dr, col + dc});
    bonds.insert({{row + dr, col}, {row + dr, col + 1}});
    bonds.insert({{row + dr, col + 1}, {row + dr, col + 2}});
  }
  bonds.insert({{row, col}, {row + 1, col}});
  bonds.insert({{row, col + 2}, {row + 1, col + 2}});
}

}  // namespace

Topology::Topology(std::size_t n_qubits, std::vector<Edge> edges, Geometry geometry)
    : n_qubits_(n_qubits), edges_(std::move(edges)), geometry_(std::move(geometry)) {
  for (auto& e : edges_) {
    if (e.a == e.b) {
      throw InvalidArgument("self-loop on qubit " + std::to_string(e.a));
    }
    if (e.a >= n_qubits_ || e.b >= n_qubits_) {
      throw InvalidArgument("edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                            ") references a qubit >= " + std::to_string(n_qubits_));
    }
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& l, const Edge& r) { return edge_order_key(l) < edge_order_key(r); });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edge_order_key(edges_[i - 1]) == edge_order_key(edges_[i])) {
      throw InvalidArgument("duplicate edge (" + std::to_string(edges_[i].a) + "," +
                            std::to_string(edges_[i].b) + ")");
    }
  }
  if (geometry_.kind != LatticeKind::Custom && geometry_.sites.size() != n_qubits_) {
    throw InvalidArgument("geometry lists " + std::to_string(geometry_.sites.size()) +
                          " sites for " + std::to_string(n_qubits_) + " qubits");
  }
  if (geometry_.is_full_window() &&
      static_cast<std::size_t>(geometry_.rows) * geometry_.cols != n_qubits_) {
    throw InvalidArgument("window geometry does not match qubit count");
  }
  index();
}

void Topology::index() {
  incidence_offsets_.assign(n_qubits_ + 1, 0);
  for (const auto& e : edges_) {
    ++incidence_offsets_[e.a + 1];
    ++incidence_offsets_[e.b + 1];
  }
  for (std::size_t q = 0; q < n_qubits_; ++q) incidence_offsets_[q + 1] += incidence_offsets_[q];
  incidence_.assign(incidence_offsets_.back(), 0);
  std::vector<std::size_t> fill(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    incidence_[fill[edges_[i].a]++] = i;
    incidence_[fill[edges_[i].b]++] = i;
  }
}

std::span<const std::uint8_t> Topology::orientation() const {
  if (!orientation_) throw InvalidArgument("topology has no fixed orientation");
  return *orientation_;
}

DirectedEdge Topology::directed_edge(std::size_t i) const {
  return directed(edges_.at(i), orientation()[i]);
}

void Topology::set_orientation(std::vector<std::uint8_t> bits) {
  if (bits.size() != edges_.size()) {
    throw InvalidArgument("orientation covers " + std::to_string(bits.size()) + " of " +
                          std::to_string(edges_.size()) + " edges");
  }
  for (auto b : bits) {
    if (b > 1) throw InvalidArgument("orientation bits must be 0 or 1");
  }
  orientation_ = std::move(bits);
}

std::span<const std::size_t> Topology::incident(QubitId q) const {
  if (q >= n_qubits_) throw InvalidArgument("qubit " + std::to_string(q) + " out of range");
  return std::span<const std::size_t>(incidence_).subspan(
      incidence_offsets_[q], incidence_offsets_[q + 1] - incidence_offsets_[q]);
}

QubitId Topology::other_end(std::size_t edge, QubitId q) const {
  const Edge& e = edges_.at(edge);
  return e.a == q ? e.b : e.a;
}

std::optional<std::size_t> Topology::find_edge(QubitId u, QubitId v,
                                               std::optional<WrapTag> tag) const {
  if (u >= n_qubits_ || v >= n_qubits_) return std::nullopt;
  for (std::size_t i : incident(u)) {
    if (other_end(i, u) == v && edges_[i].wrap == tag) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Topology::find_any_edge(QubitId u, QubitId v) const {
  if (u >= n_qubits_ || v >= n_qubits_) return std::nullopt;
  std::optional<std::size_t> found;
  for (std::size_t i : incident(u)) {
    if (other_end(i, u) != v) continue;
    if (!edges_[i].wrap) return i;
    if (!found) found = i;
  }
  return found;
}

bool Topology::is_simple() const {
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i - 1].a == edges_[i].a && edges_[i - 1].b == edges_[i].b) return false;
  }
  return true;
}

std::size_t Topology::count_wrap_edges() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return e.wrap.has_value(); }));
}

std::string Topology::edge_key(std::size_t i) const {
  const Edge& e = edges_.at(i);
  std::string key = std::to_string(e.a) + "-" + std::to_string(e.b);
  if (e.wrap) {
    key += e.wrap->via_bc ? "~" : "~s";
    key += e.wrap->axis == Axis::X ? "x" : "y";
  }
  return key;
}

std::vector<SpectatorTriple> edge_spectators(const Topology& topo, std::size_t gate_edge,
                                             std::uint8_t orientation_bit) {
  if (gate_edge >= topo.n_edges()) {
    throw InvalidArgument("edge index " + std::to_string(gate_edge) + " out of range");
  }
  const DirectedEdge d = directed(topo.edge(gate_edge), orientation_bit);
  std::vector<SpectatorTriple> out;
  for (std::size_t e : topo.incident(d.target)) {
    if (e == gate_edge) continue;
    out.push_back({d.control, d.target, topo.other_end(e, d.target), gate_edge, e});
  }
  return out;
}

std::vector<SpectatorTriple> spectator_triples(const Topology& topo, QubitId control,
                                               QubitId target) {
  auto e = topo.find_any_edge(control, target);
  if (!e) {
    throw InvalidArgument("(" + std::to_string(control) + "," + std::to_string(target) +
                          ") is not an edge");
  }
  const std::uint8_t bit = topo.edge(*e).a == control ? 0 : 1;
  return edge_spectators(topo, *e, bit);
}

bool lattice_bond(LatticeKind kind, PlanePoint p, bool vertical) {
  if (!vertical) return true;
  switch (kind) {
    case LatticeKind::Square:
      return true;
    case LatticeKind::HexCells:
    case LatticeKind::HexRings:
    case LatticeKind::HexBrick:
      return floor_mod(p.x + p.y, 2) == 0;
    case LatticeKind::Custom:
      break;
  }
  return false;
}

Topology square_grid(int rows, int cols) {
  require_positive(rows, "rows");
  require_positive(cols, "cols");
  return window_lattice(LatticeKind::Square, rows, cols);
}

Topology hex_brick(int rows, int cols) {
  require_positive(rows, "rows");
  require_positive(cols, "cols");
  return window_lattice(LatticeKind::HexBrick, rows, cols);
}

Topology hex_grid(int cells_x, int cells_y) {
  require_positive(cells_x, "cells_x");
  require_positive(cells_y, "cells_y");
  std::set<std::pair<int, int>> sites;
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> bonds;
  for (int j = 0; j < cells_y; ++j) {
    for (int i = 0; i < cells_x; ++i) add_hexagon(j, 2 * i + (j & 1), sites, bonds);
  }
  Geometry g;
  g.kind = LatticeKind::HexCells;
  g.cells_x = cells_x;
  g.cells_y = cells_y;
  g.rows = cells_y + 1;
  g.cols = 2 * cells_x + (cells_y > 1 ? 2 : 1);
  return from_sites(sites, bonds, std::move(g));
}

Topology hex_rings(int rings) {
  require_positive(rings, "rings");
  const int radius = rings - 1;
  // Axial cell coordinates (q, r) within hex distance `radius`, laid out in
  // odd-row offset form; the row offset is even so cell parity is preserved.
  const int row0 = radius + (radius & 1);
  std::vector<std::pair<int, int>> cells;
  for (int q = -radius; q <= radius; ++q) {
    for (int r = -radius; r <= radius; ++r) {
      if (std::abs(q + r) > radius) continue;
      const int j = r + row0;
      const int i = q + (j - (j & 1)) / 2;
      cells.push_back({i, j});
    }
  }
  int min_col = 0;
  bool first = true;
  for (auto [i, j] : cells) {
    const int col = 2 * i + (j & 1);
    if (first || col < min_col) min_col = col;
    first = false;
  }
  min_col -= floor_mod(min_col, 2);
  std::set<std::pair<int, int>> sites;
  std::set<std::pair<std::pair<int, int>, std::pair<int, int>>> bonds;
  for (auto [i, j] : cells) add_hexagon(j, 2 * i + (j & 1) - min_col, sites, bonds);
  Geometry g;
  g.kind = LatticeKind::HexRings;
  g.rings = rings;
  for (auto [r, c] : sites) {
    g.rows = std::max(g.rows, r + 1);
    g.cols = std::max(g.cols, c + 1);
  }
  return from_sites(sites, bonds, std::move(g));
}

Topology path_graph(int n_qubits) {
  require_positive(n_qubits, "n_qubits");
  std::vector<Edge> edges;
  for (int q = 0; q + 1 < n_qubits; ++q) {
    edges.push_back({static_cast<QubitId>(q), static_cast<QubitId>(q + 1), std::nullopt});
  }
  return Topology(n_qubits, std::move(edges));
}

Topology cycle_graph(int n_qubits) {
  if (n_qubits < 3) throw InvalidArgument("a cycle needs at least 3 qubits");
  std::vector<Edge> edges;
  for (int q = 0; q < n_qubits; ++q) {
    edges.push_back({static_cast<QubitId>(q), static_cast<QubitId>((q + 1) % n_qubits),
                     std::nullopt});
  }
  return Topology(n_qubits, std::move(edges));
}

Topology star_graph(int leaves) {
  require_positive(leaves, "leaves");
  std::vector<Edge> edges;
  for (int q = 1; q <= leaves; ++q) edges.push_back({0, static_cast<QubitId>(q), std::nullopt});
  return Topology(leaves + 1, std::move(edges));
}

Topology wrap(const Topology& unit, const BoundaryCondition& bc) {
  const Geometry& g = unit.geometry();
  if (!g.is_full_window()) {
    throw InvalidArgument("wrap needs a square or brick-wall hexagon unit cell");
  }
  if (unit.count_wrap_edges() != 0) {
    throw InvalidArgument("unit cell is already wrapped");
  }
  const int rows = g.rows;
  const int cols = g.cols;
  if (bc.x_wrap.enabled && cols < 2) {
    throw InvalidArgument("cannot wrap the x axis of a unit cell with 1 column");
  }
  if (bc.y_wrap.enabled && rows < 2) {
    throw InvalidArgument("cannot wrap the y axis of a unit cell with 1 row");
  }
  const WrapQuotient quotient(rows, cols, bc);

  // The wrap group must map lattice bonds onto lattice bonds.
  const long x_lo = bc.x_wrap.enabled ? -cols : 0;
  const long x_hi = bc.x_wrap.enabled ? 2L * cols : cols;
  const long y_lo = bc.y_wrap.enabled ? -rows : 0;
  const long y_hi = bc.y_wrap.enabled ? 2L * rows : rows;
  for (long y = y_lo; y < y_hi; ++y) {
    for (long x = x_lo; x < x_hi; ++x) {
      const PlaneMap m = quotient.reducer({x, y});
      for (bool vertical : {false, true}) {
        const PlanePoint p{x, y};
        const PlanePoint q{vertical ? x : x + 1, vertical ? y + 1 : y};
        const PlanePoint mp{m.map_x(p.x), m.map_y(p.y)};
        const PlanePoint mq{m.map_x(q.x), m.map_y(q.y)};
        const PlanePoint low = vertical ? (mp.y < mq.y ? mp : mq) : (mp.x < mq.x ? mp : mq);
        if (lattice_bond(g.kind, p, vertical) != lattice_bond(g.kind, low, vertical)) {
          throw InvalidArgument("boundary condition '" + bc.name +
                                "' does not preserve the lattice bond pattern of a " +
                                std::to_string(rows) + "x" + std::to_string(cols) + " cell");
        }
      }
    }
  }

  auto id = [cols](PlanePoint p) { return static_cast<QubitId>(p.y * cols + p.x); };
  std::vector<Edge> edges(unit.edges().begin(), unit.edges().end());
  for (long r = 0; r < rows; ++r) {
    if (bc.x_wrap.enabled && lattice_bond(g.kind, {cols - 1, r}, false)) {
      const PlanePoint to = quotient.reduce({cols, r});
      edges.push_back({id({cols - 1, r}), id(to), WrapTag{Axis::X, true}});
    }
  }
  for (long c = 0; c < cols; ++c) {
    if (bc.y_wrap.enabled && lattice_bond(g.kind, {c, rows - 1}, true)) {
      const PlanePoint to = quotient.reduce({c, rows});
      edges.push_back({id({c, rows - 1}), id(to), WrapTag{Axis::Y, true}});
    }
  }
  Geometry wrapped_geometry = g;
  wrapped_geometry.bc = bc;
  return Topology(unit.n_qubits(), std::move(edges), std::move(wrapped_geometry));
}

Topology strip_wrap(const Topology& wrapped) {
  std::vector<Edge> edges;
  for (const auto& e : wrapped.edges()) {
    if (!e.wrap) edges.push_back(e);
  }
  const Geometry& w = wrapped.geometry();
  Geometry g;
  g.kind = w.kind;
  g.rows = w.rows;
  g.cols = w.cols;
  g.cells_x = w.cells_x;
  g.cells_y = w.cells_y;
  g.rings = w.rings;
  g.sites = w.sites;
  return Topology(wrapped.n_qubits(), std::move(edges), std::move(g));
}

std::vector<std::uint8_t> checkerboard_orientation(const Topology& topo) {
  const auto& sites = topo.geometry().sites;
  std::vector<std::uint8_t> bits(topo.n_edges(), 0);
  if (sites.size() != topo.n_qubits()) return bits;
  auto even = [&](QubitId q) { return (sites[q].row + sites[q].col) % 2 == 0; };
  for (std::size_t e = 0; e < topo.n_edges(); ++e) {
    const Edge& edge = topo.edge(e);
    if (even(edge.a) != even(edge.b)) bits[e] = even(edge.a) ? 0 : 1;
  }
  return bits;
}

std::vector<std::uint8_t> random_orientation(const Topology& topo, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> bits(topo.n_edges());
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return bits;
}

}  // namespace freqalloc
