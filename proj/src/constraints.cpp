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

#include "freqalloc/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "freqalloc/error.hpp"

namespace freqalloc {

namespace {

constexpr std::array<std::string_view, kFamilyCount> kFamilyNames = {
    "A1", "A2", "C1", "E1", "E2", "D1", "S1", "S2", "T1", "DIFF"};

void add_term(LinearForm& form, QubitId q, double coef) {
  for (std::uint8_t t = 0; t < form.size; ++t) {
    if (form.terms[t].qubit == q) {
      form.terms[t].coef += coef;
      return;
    }
  }
  form.terms[form.size++] = {q, coef};
}

LinearForm make_form(std::initializer_list<std::pair<QubitId, double>> terms, double constant) {
  LinearForm f;
  for (auto [q, c] : terms) add_term(f, q, c);
  // Drop terms that cancelled (spectator equal to control on doubled edges).
  std::uint8_t kept = 0;
  for (std::uint8_t t = 0; t < f.size; ++t) {
    if (f.terms[t].coef != 0.0) f.terms[kept++] = f.terms[t];
  }
  for (std::uint8_t t = kept; t < f.size; ++t) f.terms[t] = {};
  f.size = kept;
  f.constant = constant;
  return f;
}

ConstraintRecord pair_record(Family family, QubitId a, QubitId b, OrientationCase oc,
                             std::size_t edge) {
  ConstraintRecord r;
  r.family = family;
  r.participants = {a, b, 0, 0};
  r.arity = 2;
  r.orientation = oc;
  r.edge = edge;
  return r;
}

void emit_gate_case(const Topology& topo, std::size_t e, std::uint8_t bit,
                    const ConstraintParams& params, std::vector<ConstraintRecord>& out) {
  const DirectedEdge d = directed(topo.edge(e), bit);
  const auto oc = static_cast<OrientationCase>(bit);
  for (Family f : {Family::C1, Family::E1, Family::E2, Family::D1}) {
    if (params.is_enabled(f)) out.push_back(pair_record(f, d.control, d.target, oc, e));
  }
}

void emit_spectator_case(const Topology& topo, std::size_t e, std::uint8_t bit,
                         const ConstraintParams& params, std::vector<ConstraintRecord>& out) {
  const auto oc = static_cast<OrientationCase>(bit);
  for (const SpectatorTriple& t : edge_spectators(topo, e, bit)) {
    for (Family f : {Family::S1, Family::S2, Family::T1}) {
      if (!params.is_enabled(f)) continue;
      ConstraintRecord r;
      r.family = f;
      r.participants = {t.control, t.target, t.spectator, 0};
      r.arity = 3;
      r.orientation = oc;
      r.edge = e;
      r.aux_edge = t.spectator_edge;
      out.push_back(r);
    }
  }
}

}  // namespace

std::string_view to_string(Family f) { return kFamilyNames[index_of(f)]; }

Family family_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyCount; ++i) {
    if (kFamilyNames[i] == name) return kAllFamilies[i];
  }
  throw InvalidArgument("unknown constraint family '" + std::string(name) + "'");
}

bool has_slack(Family f) { return f != Family::C1 && f != Family::DIFF; }

bool is_gate_family(Family f) {
  return f == Family::C1 || f == Family::E1 || f == Family::E2 || f == Family::D1;
}

bool is_spectator_family(Family f) {
  return f == Family::S1 || f == Family::S2 || f == Family::T1;
}

double ConstraintParams::required(Family f, bool tightened) const {
  switch (f) {
    case Family::C1:
      return tightened ? eps(Family::C1) : 0.0;
    case Family::DIFF:
      return delta_diff_mhz;
    default:
      return base(f) + (tightened ? eps(f) : 0.0);
  }
}

void ConstraintParams::validate() const {
  for (Family f : kSlackFamilies) {
    if (!(base(f) > 0.0)) {
      throw InvalidArgument("base bound for " + std::string(to_string(f)) + " must be > 0");
    }
  }
  for (Family f : kAllFamilies) {
    if (eps(f) < 0.0) {
      throw InvalidArgument("tightening for " + std::string(to_string(f)) + " must be >= 0");
    }
  }
  if (!(f_min_mhz < f_max_mhz)) {
    throw InvalidArgument("frequency window needs f_min < f_max");
  }
  if (delta_diff_mhz < 0.0) throw InvalidArgument("delta_diff must be >= 0");
}

std::vector<std::string> ConstraintParams::warnings() const {
  std::vector<std::string> out;
  if (std::abs(alpha_mhz) >= window_width()) {
    out.push_back("|alpha| is not smaller than the frequency window width");
  }
  if (eps(Family::D1) > 0.0) {
    out.push_back("D1 is tightened; this usually slows the solver and lowers yield");
  }
  return out;
}

ConstraintParams default_params() {
  ConstraintParams p;
  p.base_bound_mhz[index_of(Family::A1)] = 17.0;
  p.base_bound_mhz[index_of(Family::A2)] = 30.0;
  p.base_bound_mhz[index_of(Family::E1)] = 17.0;
  p.base_bound_mhz[index_of(Family::E2)] = 30.0;
  p.base_bound_mhz[index_of(Family::D1)] = 2.0;
  p.base_bound_mhz[index_of(Family::S1)] = 17.0;
  p.base_bound_mhz[index_of(Family::S2)] = 25.0;
  p.base_bound_mhz[index_of(Family::T1)] = 17.0;
  return p;
}

void apply_uniform_tolerance(ConstraintParams& params, double eps_mhz) {
  for (Family f : kSlackFamilies) {
    if (f != Family::D1) params.eps_tol_mhz[index_of(f)] = eps_mhz;
  }
}

RecordForms linear_forms(const ConstraintRecord& r, double alpha) {
  RecordForms out;
  const QubitId p0 = r.participants[0];
  const QubitId p1 = r.participants[1];
  const QubitId p2 = r.participants[2];
  out.count = 1;
  switch (r.family) {
    case Family::A1:
      out.forms[0] = make_form({{p0, 1.0}, {p1, -1.0}}, 0.0);
      break;
    case Family::A2:
      out.forms[0] = make_form({{p0, 1.0}, {p1, -1.0}}, -alpha);
      break;
    case Family::C1:
      // f_i + alpha <= f_j  and  f_j <= f_i
      out.absolute = false;
      out.count = 2;
      out.forms[0] = make_form({{p1, 1.0}, {p0, -1.0}}, -alpha);
      out.forms[1] = make_form({{p0, 1.0}, {p1, -1.0}}, 0.0);
      break;
    case Family::E1:
      out.forms[0] = make_form({{p1, 1.0}, {p0, -1.0}}, 0.0);
      break;
    case Family::E2:
      out.forms[0] = make_form({{p1, 1.0}, {p0, -1.0}}, -alpha);
      break;
    case Family::D1:
      out.forms[0] = make_form({{p1, 1.0}, {p0, -1.0}}, -alpha / 2.0);
      break;
    case Family::S1:
      out.forms[0] = make_form({{p1, 1.0}, {p2, -1.0}}, 0.0);
      break;
    case Family::S2:
      out.forms[0] = make_form({{p1, 1.0}, {p2, -1.0}}, -alpha);
      break;
    case Family::T1:
      out.forms[0] = make_form({{p1, 1.0}, {p2, 1.0}, {p0, -2.0}}, -alpha);
      break;
    case Family::DIFF:
      throw InvalidArgument("DIFF records have no single linear form");
  }
  return out;
}

std::vector<ConstraintRecord> enumerate(const Topology& topo, Mode mode,
                                        const ConstraintParams& params) {
  if (mode == Mode::Fixed) {
    if (!topo.has_orientation()) {
      throw InvalidArgument("fixed mode needs a topology with a complete orientation");
    }
    return enumerate(topo, mode, params, topo.orientation());
  }
  return enumerate(topo, mode, params, {});
}

std::vector<ConstraintRecord> enumerate(const Topology& topo, Mode mode,
                                        const ConstraintParams& params,
                                        std::span<const std::uint8_t> bits) {
  if (mode == Mode::Fixed && bits.size() != topo.n_edges()) {
    throw InvalidArgument("fixed mode needs one orientation bit per edge");
  }
  std::vector<ConstraintRecord> out;
  const std::size_t n_edges = topo.n_edges();
  for (std::size_t e = 0; e < n_edges; ++e) {
    const Edge& edge = topo.edge(e);
    for (Family f : {Family::A1, Family::A2}) {
      if (params.is_enabled(f)) {
        out.push_back(pair_record(f, edge.a, edge.b, OrientationCase::Undirected, e));
      }
    }
    if (mode == Mode::Fixed) {
      emit_gate_case(topo, e, bits[e], params, out);
    } else {
      emit_gate_case(topo, e, 0, params, out);
      emit_gate_case(topo, e, 1, params, out);
    }
  }
  for (std::size_t e = 0; e < n_edges; ++e) {
    if (mode == Mode::Fixed) {
      emit_spectator_case(topo, e, bits[e], params, out);
    } else {
      emit_spectator_case(topo, e, 0, params, out);
      emit_spectator_case(topo, e, 1, params, out);
    }
  }
  if (params.delta_diff_mhz > 0.0 && params.is_enabled(Family::DIFF)) {
    for (auto [k, l] : edge_difference_pairs(topo)) {
      ConstraintRecord r;
      r.family = Family::DIFF;
      r.participants = {topo.edge(k).a, topo.edge(k).b, topo.edge(l).a, topo.edge(l).b};
      r.arity = 4;
      r.orientation = OrientationCase::Undirected;
      r.edge = k;
      r.aux_edge = l;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_difference_pairs(const Topology& topo) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto edges = topo.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    for (std::size_t l = k + 1; l < edges.size(); ++l) {
      const Edge& x = edges[k];
      const Edge& y = edges[l];
      if (x.a == y.a || x.a == y.b || x.b == y.a || x.b == y.b) continue;
      out.emplace_back(k, l);
    }
  }
  return out;
}

Violation evaluate(const ConstraintRecord& record, std::span<const double> freq,
                   const ConstraintParams& params, bool tightened) {
  Violation v;
  v.record = record;
  v.required_mhz = params.required(record.family, tightened);
  if (record.family == Family::DIFF) {
    const auto& p = record.participants;
    const double dk = std::abs(freq[p[0]] - freq[p[1]]);
    const double dl = std::abs(freq[p[2]] - freq[p[3]]);
    v.measured_mhz = std::abs(dk - dl);
    v.margin_mhz = params.diff_comparator == DiffComparator::Separation
                       ? v.measured_mhz - v.required_mhz
                       : v.required_mhz - v.measured_mhz;
    return v;
  }
  const RecordForms rf = linear_forms(record, params.alpha_mhz);
  if (rf.absolute) {
    v.measured_mhz = std::abs(rf.forms[0].eval(freq));
  } else {
    v.measured_mhz = std::min(rf.forms[0].eval(freq), rf.forms[1].eval(freq));
  }
  v.margin_mhz = v.measured_mhz - v.required_mhz;
  return v;
}

void require_complete(const FrequencyAssignment& assignment, const Topology& topo) {
  if (assignment.frequency_mhz.size() != topo.n_qubits()) {
    throw InvalidArgument("assignment has " + std::to_string(assignment.frequency_mhz.size()) +
                          " frequencies for " + std::to_string(topo.n_qubits()) + " qubits");
  }
  if (assignment.orientation.size() != topo.n_edges()) {
    throw InvalidArgument("assignment has " + std::to_string(assignment.orientation.size()) +
                          " orientation bits for " + std::to_string(topo.n_edges()) + " edges");
  }
  for (double f : assignment.frequency_mhz) {
    if (!std::isfinite(f)) throw InvalidArgument("assignment has a non-finite frequency");
  }
}

ViolationReport check(const FrequencyAssignment& assignment, const Topology& topo,
                      const ConstraintParams& params_at_base) {
  require_complete(assignment, topo);
  ConstraintParams p = params_at_base;
  p.enabled[index_of(Family::DIFF)] = false;
  ViolationReport report;
  for (const ConstraintRecord& r : enumerate(topo, Mode::Fixed, p, assignment.orientation)) {
    Violation v = evaluate(r, assignment.frequency_mhz, p, false);
    if (v.margin_mhz < 0.0) report.violations.push_back(v);
  }
  return report;
}

}  // namespace freqalloc
