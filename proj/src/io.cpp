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

#include "freqalloc/io.hpp"

#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include "freqalloc/error.hpp"

namespace freqalloc::io {

namespace {

void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
}

void allow_keys(const Json& j, std::string_view what, std::initializer_list<std::string_view> keys) {
  require_object(j, what);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) throw ParseError("unknown key '" + key + "' in " + std::string(what));
  }
}

template <class T>
T get(const Json& j, std::string_view key, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string(what) + " lacks '" + std::string(key) + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("'" + std::string(key) + "' in " + std::string(what) + " has the wrong type");
  }
}

template <class T>
T get_or(const Json& j, std::string_view key, std::string_view what, T fallback) {
  return j.contains(key) ? get<T>(j, key, what) : fallback;
}

std::string_view kind_name(LatticeKind k) {
  switch (k) {
    case LatticeKind::Custom:
      return "custom";
    case LatticeKind::Square:
      return "square";
    case LatticeKind::HexCells:
      return "hex";
    case LatticeKind::HexRings:
      return "hex-rings";
    case LatticeKind::HexBrick:
      return "hex-brick";
  }
  return "custom";
}

LatticeKind kind_from_name(std::string_view s) {
  for (LatticeKind k : {LatticeKind::Custom, LatticeKind::Square, LatticeKind::HexCells,
                        LatticeKind::HexRings, LatticeKind::HexBrick}) {
    if (kind_name(k) == s) return k;
  }
  throw ParseError("unknown lattice kind '" + std::string(s) + "'");
}

std::string tag_name(const WrapTag& t) {
  return std::string(t.via_bc ? "" : "s") + (t.axis == Axis::X ? "x" : "y");
}

WrapTag tag_from_name(std::string_view s) {
  if (s == "x") return {Axis::X, true};
  if (s == "y") return {Axis::Y, true};
  if (s == "sx") return {Axis::X, false};
  if (s == "sy") return {Axis::Y, false};
  throw ParseError("unknown edge tag '" + std::string(s) + "'");
}

Json axis_json(const AxisWrap& w) {
  Json j;
  j["shift"] = w.shift;
  j["flip"] = w.flip;
  j["enabled"] = w.enabled;
  return j;
}

AxisWrap axis_from_json(const Json& j, std::string_view what) {
  allow_keys(j, what, {"shift", "flip", "enabled"});
  AxisWrap w;
  w.shift = get_or<int>(j, "shift", what, 0);
  w.flip = get_or<bool>(j, "flip", what, false);
  w.enabled = get_or<bool>(j, "enabled", what, true);
  return w;
}

Json family_map(const std::array<double, kFamilyCount>& values, bool slack_only) {
  Json j = Json::object();
  for (Family f : kAllFamilies) {
    if (slack_only && !has_slack(f)) continue;
    j[std::string(to_string(f))] = values[index_of(f)];
  }
  return j;
}

Family family_key(const std::string& key, std::string_view what) {
  try {
    return family_from_string(key);
  } catch (const InvalidArgument&) {
    throw ParseError("unknown family '" + key + "' in " + std::string(what));
  }
}

std::map<std::string, std::size_t> edge_keys(const Topology& topo) {
  std::map<std::string, std::size_t> keys;
  for (std::size_t e = 0; e < topo.n_edges(); ++e) keys.emplace(topo.edge_key(e), e);
  return keys;
}

std::vector<std::uint8_t> orientation_from_json(const Json& j, const Topology& topo,
                                                std::string_view what) {
  require_object(j, what);
  const auto keys = edge_keys(topo);
  std::vector<std::uint8_t> bits(topo.n_edges(), 0);
  std::vector<bool> seen(topo.n_edges(), false);
  for (const auto& [key, value] : j.items()) {
    auto it = keys.find(key);
    if (it == keys.end()) throw ParseError("orientation names unknown edge '" + key + "'");
    if (!value.is_number_integer() || (value.get<int>() != 0 && value.get<int>() != 1)) {
      throw ParseError("orientation of '" + key + "' must be 0 or 1");
    }
    bits[it->second] = static_cast<std::uint8_t>(value.get<int>());
    seen[it->second] = true;
  }
  for (std::size_t e = 0; e < topo.n_edges(); ++e) {
    if (!seen[e]) throw ParseError("orientation misses edge '" + topo.edge_key(e) + "'");
  }
  return bits;
}

Json orientation_json(const Topology& topo, std::span<const std::uint8_t> bits) {
  Json j = Json::object();
  for (std::size_t e = 0; e < topo.n_edges(); ++e) j[topo.edge_key(e)] = static_cast<int>(bits[e]);
  return j;
}

}  // namespace

Json to_json(const Topology& topo) {
  Json j;
  j["n_qubits"] = topo.n_qubits();
  Json edges = Json::array();
  for (const auto& e : topo.edges()) {
    Json arr = Json::array({e.a, e.b});
    if (e.wrap) arr.push_back(tag_name(*e.wrap));
    edges.push_back(std::move(arr));
  }
  j["edges"] = std::move(edges);
  if (topo.has_orientation()) j["orientation"] = orientation_json(topo, topo.orientation());
  const Geometry& g = topo.geometry();
  if (g.kind != LatticeKind::Custom) {
    Json gj;
    gj["kind"] = kind_name(g.kind);
    gj["rows"] = g.rows;
    gj["cols"] = g.cols;
    gj["cells_x"] = g.cells_x;
    gj["cells_y"] = g.cells_y;
    gj["rings"] = g.rings;
    Json sites = Json::array();
    for (const Site& s : g.sites) sites.push_back(Json::array({s.row, s.col}));
    gj["sites"] = std::move(sites);
    if (g.bc) gj["bc"] = to_json(*g.bc);
    j["geometry"] = std::move(gj);
  }
  return j;
}

Topology topology_from_json(const Json& j) {
  constexpr std::string_view what = "topology";
  allow_keys(j, what, {"n_qubits", "edges", "orientation", "geometry"});
  const auto n = get<std::size_t>(j, "n_qubits", what);
  std::vector<Edge> edges;
  const Json& ej = j.contains("edges") ? j["edges"] : Json::array();
  if (!ej.is_array()) throw ParseError("'edges' must be an array");
  for (const auto& e : ej) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned()) {
      throw ParseError("edge entries must be [a, b] or [a, b, tag]");
    }
    Edge edge{e[0].get<QubitId>(), e[1].get<QubitId>(), std::nullopt};
    if (e.size() == 3) {
      if (!e[2].is_string()) throw ParseError("edge tag must be a string");
      edge.wrap = tag_from_name(e[2].get<std::string>());
    }
    edges.push_back(edge);
  }
  Geometry g;
  if (j.contains("geometry")) {
    const Json& gj = j["geometry"];
    constexpr std::string_view gw = "geometry";
    allow_keys(gj, gw, {"kind", "rows", "cols", "cells_x", "cells_y", "rings", "sites", "bc"});
    g.kind = kind_from_name(get<std::string>(gj, "kind", gw));
    g.rows = get_or<int>(gj, "rows", gw, 0);
    g.cols = get_or<int>(gj, "cols", gw, 0);
    g.cells_x = get_or<int>(gj, "cells_x", gw, 0);
    g.cells_y = get_or<int>(gj, "cells_y", gw, 0);
    g.rings = get_or<int>(gj, "rings", gw, 0);
    if (gj.contains("sites")) {
      if (!gj["sites"].is_array()) throw ParseError("'sites' must be an array");
      for (const auto& s : gj["sites"]) {
        if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer()) {
          throw ParseError("site entries must be [row, col]");
        }
        g.sites.push_back({s[0].get<int>(), s[1].get<int>()});
      }
    }
    if (gj.contains("bc")) g.bc = bc_from_json(gj["bc"]);
  }
  Topology topo(n, std::move(edges), std::move(g));
  if (j.contains("orientation")) {
    topo.set_orientation(orientation_from_json(j["orientation"], topo, "orientation"));
  }
  return topo;
}

Json to_json(const BoundaryCondition& bc) {
  Json j;
  j["name"] = bc.name;
  j["x_wrap"] = axis_json(bc.x_wrap);
  j["y_wrap"] = axis_json(bc.y_wrap);
  return j;
}

BoundaryCondition bc_from_json(const Json& j) {
  constexpr std::string_view what = "boundary condition";
  allow_keys(j, what, {"name", "x_wrap", "y_wrap"});
  BoundaryCondition bc;
  bc.name = get_or<std::string>(j, "name", what, "custom");
  if (j.contains("x_wrap")) bc.x_wrap = axis_from_json(j["x_wrap"], "x_wrap");
  if (j.contains("y_wrap")) bc.y_wrap = axis_from_json(j["y_wrap"], "y_wrap");
  return bc;
}

PresetTable presets_from_json(const Json& j) {
  require_object(j, "presets");
  PresetTable table;
  for (const auto& [name, body] : j.items()) {
    BoundaryCondition bc = bc_from_json(body);
    bc.name = name;
    table.emplace(name, bc);
  }
  return table;
}

Json to_json(const ConstraintParams& p) {
  Json j;
  j["bounds"] = family_map(p.base_bound_mhz, true);
  j["alpha_mhz"] = p.alpha_mhz;
  j["eps_tol"] = family_map(p.eps_tol_mhz, false);
  j["delta_diff_mhz"] = p.delta_diff_mhz;
  j["diff_comparator"] = p.diff_comparator == DiffComparator::Separation ? "separation" : "literal";
  j["f_window_mhz"] = Json::array({p.f_min_mhz, p.f_max_mhz});
  Json en = Json::object();
  for (Family f : kAllFamilies) en[std::string(to_string(f))] = p.is_enabled(f);
  j["enabled"] = std::move(en);
  return j;
}

ConstraintParams params_from_json(const Json& j, const ConstraintParams& base) {
  constexpr std::string_view what = "params";
  allow_keys(j, what, {"bounds", "alpha_mhz", "eps_tol", "delta_diff_mhz", "diff_comparator",
                       "f_window_mhz", "enabled"});
  ConstraintParams p = base;
  if (j.contains("bounds")) {
    require_object(j["bounds"], "bounds");
    for (const auto& [key, value] : j["bounds"].items()) {
      const Family f = family_key(key, "bounds");
      if (!has_slack(f)) throw ParseError("family " + key + " takes no bound");
      if (!value.is_number()) throw ParseError("bound of " + key + " must be a number");
      p.base_bound_mhz[index_of(f)] = value.get<double>();
    }
  }
  p.alpha_mhz = get_or<double>(j, "alpha_mhz", what, p.alpha_mhz);
  if (j.contains("eps_tol")) {
    const Json& ej = j["eps_tol"];
    if (ej.is_number()) {
      apply_uniform_tolerance(p, ej.get<double>());
    } else {
      require_object(ej, "eps_tol");
      for (const auto& [key, value] : ej.items()) {
        const Family f = family_key(key, "eps_tol");
        if (!value.is_number()) throw ParseError("eps_tol of " + key + " must be a number");
        p.eps_tol_mhz[index_of(f)] = value.get<double>();
      }
    }
  }
  p.delta_diff_mhz = get_or<double>(j, "delta_diff_mhz", what, p.delta_diff_mhz);
  if (j.contains("diff_comparator")) {
    const auto c = get<std::string>(j, "diff_comparator", what);
    if (c == "separation") {
      p.diff_comparator = DiffComparator::Separation;
    } else if (c == "literal") {
      p.diff_comparator = DiffComparator::Literal;
    } else {
      throw ParseError("diff_comparator must be 'separation' or 'literal'");
    }
  }
  if (j.contains("f_window_mhz")) {
    const Json& w = j["f_window_mhz"];
    if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
      throw ParseError("f_window_mhz must be [lo, hi]");
    }
    p.f_min_mhz = w[0].get<double>();
    p.f_max_mhz = w[1].get<double>();
  }
  if (j.contains("enabled")) {
    require_object(j["enabled"], "enabled");
    for (const auto& [key, value] : j["enabled"].items()) {
      const Family f = family_key(key, "enabled");
      if (!value.is_boolean()) throw ParseError("enabled." + key + " must be a boolean");
      p.enabled[index_of(f)] = value.get<bool>();
    }
  }
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid params: ") + e.what());
  }
  return p;
}

Json solution_to_json(const Solution& s, const Topology& topo, const ConstraintParams* params,
                      std::optional<Mode> mode) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["status"] = to_string(s.status);
  if (s.has_values()) {
    j["objective_mhz"] = s.objective_mhz;
    j["frequencies_mhz"] = s.assignment.frequency_mhz;
    if (s.assignment.orientation.size() == topo.n_edges()) {
      j["orientation"] = orientation_json(topo, s.assignment.orientation);
    }
    Json slacks = Json::object();
    for (Family f : kSlackFamilies) {
      if (const auto& v = s.slack_mhz[index_of(f)]) slacks[std::string(to_string(f))] = *v;
    }
    j["slacks_mhz"] = std::move(slacks);
  }
  if (mode) j["mode"] = *mode == Mode::Fixed ? "fixed" : "free";
  if (params != nullptr) j["params"] = to_json(*params);
  Topology bare = topo;
  bare.clear_orientation();
  j["topology"] = to_json(bare);
  return j;
}

SolutionDoc solution_from_json(const Json& j) {
  constexpr std::string_view what = "solution";
  allow_keys(j, what, {"schema_version", "status", "objective_mhz", "frequencies_mhz",
                       "orientation", "slacks_mhz", "mode", "params", "topology"});
  if (get<int>(j, "schema_version", what) != kSchemaVersion) {
    throw ParseError("unsupported solution schema_version");
  }
  Topology topo = topology_from_json(get<Json>(j, "topology", what));
  Solution s;
  s.status = status_from_string(get<std::string>(j, "status", what));
  if (j.contains("frequencies_mhz")) {
    s.assignment.frequency_mhz = get<std::vector<double>>(j, "frequencies_mhz", what);
    if (s.assignment.frequency_mhz.size() != topo.n_qubits()) {
      throw ParseError("frequencies_mhz has the wrong length");
    }
    s.objective_mhz = get_or<double>(j, "objective_mhz", what, 0.0);
  }
  if (j.contains("orientation")) {
    s.assignment.orientation = orientation_from_json(j["orientation"], topo, "orientation");
    topo.set_orientation(s.assignment.orientation);
  } else if (topo.has_orientation()) {
    s.assignment.orientation.assign(topo.orientation().begin(), topo.orientation().end());
  }
  if (j.contains("slacks_mhz")) {
    require_object(j["slacks_mhz"], "slacks_mhz");
    for (const auto& [key, value] : j["slacks_mhz"].items()) {
      const Family f = family_key(key, "slacks_mhz");
      if (!value.is_number()) throw ParseError("slack of " + key + " must be a number");
      s.slack_mhz[index_of(f)] = value.get<double>();
    }
  }
  SolutionDoc doc{std::move(s), std::move(topo), std::nullopt, std::nullopt};
  if (j.contains("params")) doc.params = params_from_json(j["params"]);
  if (j.contains("mode")) {
    const auto m = get<std::string>(j, "mode", what);
    if (m != "fixed" && m != "free") throw ParseError("mode must be 'fixed' or 'free'");
    doc.mode = m == "fixed" ? Mode::Fixed : Mode::Free;
  }
  return doc;
}

Json to_json(std::span<const YieldEstimate> estimates) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json rows = Json::array();
  for (const auto& e : estimates) {
    Json r;
    r["sigma"] = e.sigma_mhz;
    r["trials"] = e.trials;
    r["successes"] = e.successes;
    r["yield"] = e.yield;
    r["ci_lo"] = e.ci_lo;
    r["ci_hi"] = e.ci_hi;
    r["seed"] = e.seed;
    r["mean_violations"] = e.mean_violations;
    rows.push_back(std::move(r));
  }
  j["estimates"] = std::move(rows);
  return j;
}

Json chip_to_json(const ChipAssembly& chip) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["bc"] = to_json(chip.bc);
  j["unit_rows"] = chip.unit_rows;
  j["unit_cols"] = chip.unit_cols;
  j["nx"] = chip.nx;
  j["ny"] = chip.ny;
  j["unit_qubit_of"] = chip.unit_qubit_of;
  j["unit_edge_of"] = chip.unit_edge_of;
  Solution s;
  s.status = SolveStatus::Feasible;
  s.assignment = chip.assignment;
  j["solution"] = solution_to_json(s, chip.chip);
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw InvalidArgument("cannot write " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace freqalloc::io
