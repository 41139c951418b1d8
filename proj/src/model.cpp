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

#include "freqalloc/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <tuple>

#include "json.hpp"

#include "freqalloc/error.hpp"

namespace freqalloc {

namespace {

Terms negated(const Terms& terms) {
  Terms out = terms;
  for (auto& t : out) t.second = -t.second;
  return out;
}

AffineExpr to_model_expr(const LinearForm& form, const std::vector<std::size_t>& freq_var) {
  AffineExpr e;
  for (std::uint8_t t = 0; t < form.size; ++t) {
    e.terms.emplace_back(freq_var[form.terms[t].qubit], form.terms[t].coef);
  }
  e.constant = form.constant;
  return e;
}

std::vector<std::size_t> hop_distances(const Topology& topo, QubitId source) {
  std::vector<std::size_t> dist(topo.n_qubits(), std::numeric_limits<std::size_t>::max());
  std::deque<QubitId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    QubitId u = queue.front();
    queue.pop_front();
    for (std::size_t e : topo.incident(u)) {
      QubitId v = topo.other_end(e, u);
      if (dist[v] == std::numeric_limits<std::size_t>::max()) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

// Keeps the `cap` DIFF records whose edges are closest (hop distance between
// endpoints), ties broken by edge indices.
std::vector<ConstraintRecord> cap_diff_records(const Topology& topo,
                                               std::vector<ConstraintRecord> records,
                                               std::size_t cap) {
  std::vector<ConstraintRecord> diff;
  std::vector<ConstraintRecord> rest;
  for (auto& r : records) (r.family == Family::DIFF ? diff : rest).push_back(r);
  if (diff.size() <= cap) return records;
  std::vector<std::vector<std::size_t>> dist(topo.n_qubits());
  auto distance = [&](QubitId u, QubitId v) {
    if (dist[u].empty()) dist[u] = hop_distances(topo, u);
    return dist[u][v];
  };
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> keyed;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const auto& p = diff[i].participants;
    std::size_t d = std::numeric_limits<std::size_t>::max();
    for (int x = 0; x < 2; ++x) {
      for (int y = 2; y < 4; ++y) d = std::min(d, distance(p[x], p[y]));
    }
    keyed.emplace_back(d, diff[i].edge, diff[i].aux_edge, i);
  }
  std::sort(keyed.begin(), keyed.end());
  keyed.resize(cap);
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& l, const auto& r) { return std::get<3>(l) < std::get<3>(r); });
  for (const auto& k : keyed) rest.push_back(diff[std::get<3>(k)]);
  return rest;
}

}  // namespace

std::size_t ModelIR::count(VarType type) const {
  return static_cast<std::size_t>(std::count_if(variables.begin(), variables.end(),
                                                 [type](const Variable& v) { return v.type == type; }));
}

std::optional<std::size_t> ModelIR::find_variable(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ModelBuilder::add_variable(std::string name, VarType type, double lower,
                                       double upper) {
  variables_.push_back({std::move(name), type, lower, upper});
  return variables_.size() - 1;
}

void ModelBuilder::add_row(LinearRow row) { rows_.push_back(std::move(row)); }

std::size_t ModelBuilder::fresh_binary() {
  return add_variable("b_" + std::to_string(binary_counter_++), VarType::Binary, 0.0, 1.0);
}

std::size_t ModelBuilder::linearize_abs_geq(const AffineExpr& expr,
                                            std::optional<std::size_t> slack,
                                            double rhs_constant, std::optional<Gate> gate,
                                            const std::string& name) {
  const std::size_t b = fresh_binary();
  const double m = big_m_;
  // Gate contribution on the left-hand side and the matching rhs shift.
  Terms gate_terms;
  double gate_rhs = 0.0;
  if (gate) {
    if (gate->active_when == 0) {
      gate_terms.emplace_back(gate->orientation_var, m);
    } else {
      gate_terms.emplace_back(gate->orientation_var, -m);
      gate_rhs = -m;
    }
  }

  LinearRow pos;
  pos.name = name + "_p";
  pos.terms = expr.terms;
  pos.terms.emplace_back(b, m);
  pos.terms.insert(pos.terms.end(), gate_terms.begin(), gate_terms.end());
  if (slack) pos.terms.emplace_back(*slack, -1.0);
  pos.sense = Sense::GreaterEqual;
  pos.rhs = rhs_constant - expr.constant + gate_rhs;
  add_row(std::move(pos));

  LinearRow neg;
  neg.name = name + "_n";
  neg.terms = negated(expr.terms);
  neg.terms.emplace_back(b, -m);
  neg.terms.insert(neg.terms.end(), gate_terms.begin(), gate_terms.end());
  if (slack) neg.terms.emplace_back(*slack, -1.0);
  neg.sense = Sense::GreaterEqual;
  neg.rhs = rhs_constant + expr.constant - m + gate_rhs;
  add_row(std::move(neg));
  return b;
}

void ModelBuilder::gated_geq(const AffineExpr& expr, double rhs_constant,
                             std::optional<Gate> gate, const std::string& name) {
  LinearRow row;
  row.name = name;
  row.terms = expr.terms;
  row.sense = Sense::GreaterEqual;
  row.rhs = rhs_constant - expr.constant;
  if (gate) {
    if (gate->active_when == 0) {
      row.terms.emplace_back(gate->orientation_var, big_m_);
    } else {
      row.terms.emplace_back(gate->orientation_var, -big_m_);
      row.rhs -= big_m_;
    }
  }
  add_row(std::move(row));
}

double default_slack_cap(const ConstraintParams& params) {
  return 2.0 * params.window_width() + std::abs(params.alpha_mhz);
}

double default_big_m(const ConstraintParams& params) {
  return 2.0 * default_slack_cap(params) + 100.0;
}

double minimum_big_m(const ConstraintParams& params) {
  double max_bound = 0.0;
  for (Family f : kSlackFamilies) max_bound = std::max(max_bound, params.base(f));
  return params.window_width() + std::abs(params.alpha_mhz) + max_bound;
}

std::string variable_suffix(const Edge& e) {
  std::string s = "_" + std::to_string(e.a) + "_" + std::to_string(e.b);
  if (e.wrap) {
    s += e.wrap->via_bc ? "_w" : "_s";
    s += e.wrap->axis == Axis::X ? "x" : "y";
  }
  return s;
}

ModelIR build(const Topology& topo, std::span<const ConstraintRecord> records_in,
              const ConstraintParams& params, const ModelOptions& options) {
  params.validate();
  if (records_in.empty() && topo.n_edges() > 0) {
    throw InvalidArgument("no constraint records for a topology with edges");
  }
  const double big_m = options.big_m.value_or(default_big_m(params));
  if (big_m < minimum_big_m(params)) {
    throw InvalidArgument("big-M " + std::to_string(big_m) + " below the minimum " +
                          std::to_string(minimum_big_m(params)));
  }
  std::vector<ConstraintRecord> records(records_in.begin(), records_in.end());
  for (const auto& r : records) {
    for (QubitId q : r.qubits()) {
      if (q >= topo.n_qubits()) throw InvalidArgument("record references an unknown qubit");
    }
    if (r.edge != ConstraintRecord::kNoEdge && r.edge >= topo.n_edges()) {
      throw InvalidArgument("record references an unknown edge");
    }
  }
  if (options.diff_pair_cap) records = cap_diff_records(topo, std::move(records), *options.diff_pair_cap);

  ModelIR model;
  model.mode = options.mode;
  model.big_m = big_m;
  model.topology = topo;
  model.params = params;
  if (options.mode == Mode::Fixed) {
    if (options.orientation) {
      model.fixed_orientation = *options.orientation;
    } else if (topo.has_orientation()) {
      model.fixed_orientation.assign(topo.orientation().begin(), topo.orientation().end());
    } else {
      throw InvalidArgument("fixed mode needs an orientation");
    }
    if (model.fixed_orientation.size() != topo.n_edges()) {
      throw InvalidArgument("orientation size does not match the edge count");
    }
  }
  ModelBuilder builder(big_m);

  for (std::size_t q = 0; q < topo.n_qubits(); ++q) {
    model.freq_var.push_back(builder.add_variable("f_" + std::to_string(q), VarType::Continuous,
                                                  params.f_min_mhz, params.f_max_mhz));
  }
  model.orientation_var.assign(topo.n_edges(), std::nullopt);
  if (options.mode == Mode::Free) {
    for (std::size_t e = 0; e < topo.n_edges(); ++e) {
      model.orientation_var[e] =
          builder.add_variable("o" + variable_suffix(topo.edge(e)), VarType::Binary, 0.0, 1.0);
    }
  }

  double cap = default_slack_cap(params);
  std::array<bool, kFamilyCount> present{};
  // Fixed mode takes every record as active; enumerate() already picked one case.
  for (const auto& r : records) present[index_of(r.family)] = true;
  for (Family f : kSlackFamilies) cap = std::max(cap, params.required(f, true));
  model.slack_cap = cap;
  for (Family f : kSlackFamilies) {
    if (!present[index_of(f)]) continue;
    model.slack_var[index_of(f)] = builder.add_variable(
        "s" + std::string(to_string(f)), VarType::Continuous, params.required(f, true), cap);
    model.objective.emplace_back(*model.slack_var[index_of(f)], 1.0);
    model.objective_constant -= params.base(f);
  }

  std::map<std::size_t, std::size_t> diff_var;  // edge -> d variable
  auto abs_diff_var = [&](std::size_t e) {
    auto it = diff_var.find(e);
    if (it != diff_var.end()) return it->second;
    const Edge& edge = topo.edge(e);
    const std::string suffix = variable_suffix(edge);
    const std::size_t d = builder.add_variable("d" + suffix, VarType::Continuous, 0.0,
                                               params.window_width());
    const std::size_t fa = model.freq_var[edge.a];
    const std::size_t fb = model.freq_var[edge.b];
    const std::size_t sign = builder.fresh_binary();
    const double m = big_m;
    // d >= f_a - f_b, d >= f_b - f_a, d <= f_a - f_b + M s, d <= f_b - f_a + M (1 - s)
    builder.add_row({"dabs" + suffix + "_1", {{d, 1.0}, {fa, -1.0}, {fb, 1.0}}, Sense::GreaterEqual, 0.0});
    builder.add_row({"dabs" + suffix + "_2", {{d, 1.0}, {fa, 1.0}, {fb, -1.0}}, Sense::GreaterEqual, 0.0});
    builder.add_row({"dabs" + suffix + "_3", {{d, 1.0}, {fa, -1.0}, {fb, 1.0}, {sign, -m}}, Sense::LessEqual, 0.0});
    builder.add_row({"dabs" + suffix + "_4", {{d, 1.0}, {fa, 1.0}, {fb, -1.0}, {sign, m}}, Sense::LessEqual, m});
    diff_var.emplace(e, d);
    return d;
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    const ConstraintRecord& r = records[i];
    const std::string name = std::string(to_string(r.family)) + "_" + std::to_string(i);
    std::optional<Gate> gate;
    if (options.mode == Mode::Free && r.orientation != OrientationCase::Undirected) {
      gate = Gate{*model.orientation_var[r.edge], static_cast<std::uint8_t>(r.orientation)};
    }
    if (r.family == Family::DIFF) {
      const std::size_t dk = abs_diff_var(r.edge);
      const std::size_t dl = abs_diff_var(r.aux_edge);
      AffineExpr diff{{{dk, 1.0}, {dl, -1.0}}, 0.0};
      if (params.diff_comparator == DiffComparator::Separation) {
        builder.linearize_abs_geq(diff, std::nullopt, params.delta_diff_mhz, std::nullopt, name);
      } else {
        builder.add_row({name + "_p", diff.terms, Sense::LessEqual, params.delta_diff_mhz});
        builder.add_row({name + "_n", negated(diff.terms), Sense::LessEqual, params.delta_diff_mhz});
      }
      continue;
    }
    const RecordForms rf = linear_forms(r, params.alpha_mhz);
    if (rf.absolute) {
      builder.linearize_abs_geq(to_model_expr(rf.forms[0], model.freq_var),
                                model.slack_var[index_of(r.family)], 0.0, gate, name);
    } else {
      const double need = params.required(Family::C1, true);
      builder.gated_geq(to_model_expr(rf.forms[0], model.freq_var), need, gate, name + "_lo");
      builder.gated_geq(to_model_expr(rf.forms[1], model.freq_var), need, gate, name + "_hi");
    }
  }

  model.variables = std::move(builder.variables());
  model.rows = std::move(builder.rows());
  model.records = std::move(records);
  return model;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::Feasible:
      return "feasible";
    case SolveStatus::Infeasible:
      return "infeasible";
    case SolveStatus::Timeout:
      return "timeout";
  }
  return "infeasible";
}

SolveStatus status_from_string(std::string_view s) {
  for (SolveStatus st : {SolveStatus::Optimal, SolveStatus::Feasible, SolveStatus::Infeasible,
                         SolveStatus::Timeout}) {
    if (to_string(st) == s) return st;
  }
  throw ParseError("unknown solution status '" + std::string(s) + "'");
}

double Solution::recomputed_objective(const ConstraintParams& params) const {
  double total = 0.0;
  for (Family f : kSlackFamilies) {
    if (slack_mhz[index_of(f)]) total += *slack_mhz[index_of(f)] - params.base(f);
  }
  return total;
}

namespace {

std::string fmt_number(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

constexpr std::size_t kLpLineWidth = 78;

// Writes " <name>: t1 t2 ..." wrapping at the line width.
class LpLine {
 public:
  LpLine(std::string& out, std::string head) : out_(out), line_(std::move(head)) {}
  void push(std::string token) {
    if (line_.size() + 1 + token.size() > kLpLineWidth) {
      out_ += line_;
      out_ += '\n';
      line_ = "   ";
    }
    line_ += ' ';
    line_ += token;
  }
  void finish() {
    out_ += line_;
    out_ += '\n';
  }

 private:
  std::string& out_;
  std::string line_;
};

void push_terms(LpLine& line, const Terms& terms, const ModelIR& model) {
  bool first = true;
  for (const auto& [var, coef] : terms) {
    if (coef == 0.0) continue;
    std::string sign = coef < 0 ? "-" : (first ? "" : "+");
    if (!sign.empty()) line.push(sign);
    line.push(fmt_number(std::abs(coef)) + " " + model.variables[var].name);
    first = false;
  }
  if (first) line.push("0 " + model.variables.front().name);
}

}  // namespace

std::string export_lp(const ModelIR& model) {
  std::string out = "\\ freqalloc model\nMaximize\n";
  {
    LpLine line(out, " obj:");
    push_terms(line, model.objective, model);
    line.finish();
  }
  out += "Subject To\n";
  for (const auto& row : model.rows) {
    LpLine line(out, " " + row.name + ":");
    push_terms(line, row.terms, model);
    line.push(row.sense == Sense::GreaterEqual ? ">=" : row.sense == Sense::LessEqual ? "<=" : "=");
    line.push(fmt_number(row.rhs));
    line.finish();
  }
  out += "Bounds\n";
  for (const auto& v : model.variables) {
    if (v.type == VarType::Binary) continue;
    out += " " + fmt_number(v.lower) + " <= " + v.name + " <= " + fmt_number(v.upper) + "\n";
  }
  if (model.count(VarType::Binary) > 0) {
    out += "Binary\n";
    LpLine line(out, "");
    for (const auto& v : model.variables) {
      if (v.type == VarType::Binary) line.push(v.name);
    }
    line.finish();
  }
  out += "End\n";
  return out;
}

Solution import_solution(std::string_view text, const ModelIR& model) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("solution is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("status") || !doc["status"].is_string()) {
    throw ParseError("solution lacks a string 'status'");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "status" && key != "values" && key != "objective") {
      throw ParseError("unknown solution key '" + key + "'");
    }
  }
  Solution sol;
  sol.status = status_from_string(doc["status"].get<std::string>());
  if (!doc.contains("values") || doc["values"].is_null() || doc["values"].empty()) {
    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::Feasible) {
      throw ParseError("status " + std::string(to_string(sol.status)) + " without values");
    }
    return sol;
  }
  if (!doc["values"].is_object()) throw ParseError("'values' must be an object");

  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < model.variables.size(); ++i) index.emplace(model.variables[i].name, i);
  std::vector<std::optional<double>> value(model.variables.size());
  for (const auto& [name, v] : doc["values"].items()) {
    auto it = index.find(name);
    if (it == index.end()) throw ParseError("unknown variable '" + name + "'");
    if (!v.is_number()) throw ParseError("value of '" + name + "' is not a number");
    double x = v.get<double>();
    if (model.variables[it->second].type == VarType::Binary) {
      if (std::abs(x) <= 1e-6) {
        x = 0.0;
      } else if (std::abs(x - 1.0) <= 1e-6) {
        x = 1.0;
      } else {
        throw IntegralityError("binary '" + name + "' has value " + fmt_number(x));
      }
    }
    value[it->second] = x;
  }

  const Topology& topo = model.topology;
  sol.assignment.frequency_mhz.resize(topo.n_qubits());
  for (std::size_t q = 0; q < topo.n_qubits(); ++q) {
    const auto& v = value[model.freq_var[q]];
    if (!v) throw ParseError("missing value for " + model.variables[model.freq_var[q]].name);
    sol.assignment.frequency_mhz[q] = *v;
  }
  if (model.mode == Mode::Free) {
    sol.assignment.orientation.resize(topo.n_edges());
    for (std::size_t e = 0; e < topo.n_edges(); ++e) {
      const auto& v = value[*model.orientation_var[e]];
      if (!v) throw ParseError("missing value for " + model.variables[*model.orientation_var[e]].name);
      sol.assignment.orientation[e] = static_cast<std::uint8_t>(*v);
    }
  } else {
    sol.assignment.orientation = model.fixed_orientation;
  }
  for (Family f : kSlackFamilies) {
    if (const auto& sv = model.slack_var[index_of(f)]) sol.slack_mhz[index_of(f)] = value[*sv];
  }
  if (doc.contains("objective") && doc["objective"].is_number()) {
    sol.objective_mhz = doc["objective"].get<double>() + model.objective_constant;
  } else {
    sol.objective_mhz = sol.recomputed_objective(model.params);
  }
  return sol;
}

}  // namespace freqalloc
