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

#include "freqalloc/assembly.hpp"

#include "freqalloc/error.hpp"
#include "freqalloc/solve.hpp"

namespace freqalloc {

namespace {

BoundaryCondition make_preset(std::string name, int shift, bool flip) {
  BoundaryCondition bc;
  bc.name = std::move(name);
  bc.x_wrap = {shift, flip, true};
  bc.y_wrap = {0, false, true};
  return bc;
}

Topology window_like(LatticeKind kind, int rows, int cols) {
  switch (kind) {
    case LatticeKind::Square:
      return square_grid(rows, cols);
    case LatticeKind::HexBrick:
      return hex_brick(rows, cols);
    default:
      throw InvalidArgument("tiling needs a square or brick-wall hexagon unit cell");
  }
}

}  // namespace

const PresetTable& builtin_presets() {
  static const PresetTable table = {
      {"PBC1", make_preset("PBC1", 0, false)}, {"PBC2", make_preset("PBC2", 1, false)},
      {"PBC3", make_preset("PBC3", 2, false)}, {"MBC1", make_preset("MBC1", 0, true)},
      {"MBC2", make_preset("MBC2", 1, true)},  {"MBC3", make_preset("MBC3", 2, true)},
  };
  return table;
}

BoundaryCondition preset_bc(std::string_view name, const PresetTable& table) {
  auto it = table.find(name);
  if (it == table.end()) {
    throw InvalidArgument("unknown boundary condition preset '" + std::string(name) + "'");
  }
  if (it->second.y_wrap.flip) {
    throw InvalidArgument("preset '" + std::string(name) + "' flips the y axis");
  }
  BoundaryCondition bc = it->second;
  bc.name = std::string(name);
  return bc;
}

ChipAssembly tile(const Topology& solved, const Solution& unit_solution,
                  const BoundaryCondition& bc, int nx, int ny, const ConstraintParams& params,
                  const TileOptions& options) {
  if (nx < 1 || ny < 1) throw InvalidArgument("nx and ny must be at least 1");
  if (bc.y_wrap.flip || bc.y_wrap.shift != 0) {
    throw InvalidArgument("only x-axis twists can be tiled");
  }
  require_complete(unit_solution.assignment, solved);

  const Topology bare = strip_wrap(solved);
  const Geometry& g = bare.geometry();
  if (!g.is_full_window()) throw InvalidArgument("tiling needs a full-window unit cell");
  const int rows = g.rows;
  const int cols = g.cols;

  ChipAssembly out;
  out.unit = wrap(bare, bc);
  out.unit_rows = rows;
  out.unit_cols = cols;
  out.nx = nx;
  out.ny = ny;
  out.bc = bc;
  const auto& freq = unit_solution.assignment.frequency_mhz;

  // Orientation of the wrapped unit, inherited from the solved topology.
  std::vector<std::uint8_t> unit_bits(out.unit.n_edges());
  for (std::size_t e = 0; e < out.unit.n_edges(); ++e) {
    const Edge& edge = out.unit.edge(e);
    if (auto src = solved.find_edge(edge.a, edge.b, edge.wrap)) {
      const DirectedEdge d = directed(solved.edge(*src), unit_solution.assignment.orientation[*src]);
      unit_bits[e] = d.control == edge.a ? 0 : 1;
    } else {
      unit_bits[e] = freq[edge.a] >= freq[edge.b] ? 0 : 1;
    }
  }
  out.unit.set_orientation(unit_bits);
  out.unit_assignment = {freq, unit_bits};

  if (options.require_feasible) {
    ConstraintParams p = params;
    p.enabled[index_of(Family::DIFF)] = false;
    Solution s;
    s.assignment = out.unit_assignment;
    const auto records = enumerate(out.unit, Mode::Fixed, p, unit_bits);
    const ViolationReport report = verify(s, out.unit, records, p, true);
    if (!report.is_feasible()) {
      throw PreconditionError("unit solution has " + std::to_string(report.violations.size()) +
                              " violations on the " + bc.name + "-wrapped unit at tightened bounds");
    }
  }

  const int chip_rows = rows * ny;
  const int chip_cols = cols * nx;
  const Topology window = window_like(g.kind, chip_rows, chip_cols);
  const WrapQuotient quotient(rows, cols, bc);
  auto unit_id = [cols](PlanePoint p) { return static_cast<QubitId>(p.y * cols + p.x); };
  auto chip_id = [chip_cols](PlanePoint p) { return static_cast<QubitId>(p.y * chip_cols + p.x); };

  const std::size_t n = static_cast<std::size_t>(chip_rows) * static_cast<std::size_t>(chip_cols);
  out.unit_qubit_of.resize(n);
  out.assignment.frequency_mhz.resize(n);
  for (long y = 0; y < chip_rows; ++y) {
    for (long x = 0; x < chip_cols; ++x) {
      const QubitId u = unit_id(quotient.reduce({x, y}));
      out.unit_qubit_of[chip_id({x, y})] = u;
      out.assignment.frequency_mhz[chip_id({x, y})] = freq[u];
    }
  }

  struct Pending {
    Edge edge;
    std::size_t unit_edge;
    QubitId control;
  };
  std::vector<Pending> pending;
  for (long y = 0; y < chip_rows; ++y) {
    for (long x = 0; x < chip_cols; ++x) {
      for (bool vertical : {false, true}) {
        const PlanePoint p{x, y};
        const PlanePoint q{vertical ? x : x + 1, vertical ? y + 1 : y};
        if (q.x >= chip_cols || q.y >= chip_rows) continue;
        if (!lattice_bond(g.kind, p, vertical)) continue;
        const PlaneMap m = quotient.reducer(p);
        const PlanePoint mp{m.map_x(p.x), m.map_y(p.y)};
        const PlanePoint mq{m.map_x(q.x), m.map_y(q.y)};
        std::optional<std::size_t> image;
        if (quotient.in_window(mq)) {
          image = out.unit.find_edge(unit_id(mp), unit_id(mq), std::nullopt);
        } else {
          const Axis axis = (mq.x < 0 || mq.x >= cols) ? Axis::X : Axis::Y;
          image = out.unit.find_edge(unit_id(mp), unit_id(quotient.reduce(mq)), WrapTag{axis, true});
        }
        if (!image) {
          throw InvalidArgument("chip bond " + std::to_string(chip_id(p)) + "-" +
                                std::to_string(chip_id(q)) + " has no image in the " + bc.name +
                                "-wrapped unit");
        }
        const bool seam = (p.x / cols != q.x / cols) || (p.y / rows != q.y / rows);
        Edge e{chip_id(p), chip_id(q), std::nullopt};
        if (seam) e.wrap = WrapTag{vertical ? Axis::Y : Axis::X, false};
        const QubitId unit_control = out.unit.directed_edge(*image).control;
        // The chip endpoint whose unit image is the control keeps that role.
        const QubitId control = unit_id(mp) == unit_control ? chip_id(p) : chip_id(q);
        pending.push_back({e, *image, control});
      }
    }
  }

  std::vector<Edge> edges;
  for (const auto& pe : pending) edges.push_back(pe.edge);
  Geometry cg = window.geometry();
  out.chip = Topology(n, std::move(edges), std::move(cg));
  std::vector<std::uint8_t> bits(out.chip.n_edges());
  out.unit_edge_of.resize(out.chip.n_edges());
  for (const auto& pe : pending) {
    const auto idx = out.chip.find_edge(pe.edge.a, pe.edge.b, pe.edge.wrap);
    bits[*idx] = out.chip.edge(*idx).a == pe.control ? 0 : 1;
    out.unit_edge_of[*idx] = pe.unit_edge;
  }
  out.chip.set_orientation(bits);
  out.assignment.orientation = bits;
  return out;
}

ViolationReport chip_check(const ChipAssembly& chip, const ConstraintParams& params_base) {
  return check(chip.assignment, chip.chip, params_base);
}

bool touches_seam(const ChipAssembly& chip, const ConstraintRecord& record) {
  for (std::size_t e : {record.edge, record.aux_edge}) {
    if (e != ConstraintRecord::kNoEdge && chip.is_seam(e)) return true;
  }
  return false;
}

}  // namespace freqalloc
