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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "freqalloc/error.hpp"
#include "freqalloc/solve.hpp"

namespace freqalloc {

namespace {

struct Compiled {
  ConstraintRecord record;
  RecordForms forms;
  double required = 0.0;
};

struct Energy {
  double violation = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();

  double value(double reward_weight) const {
    if (violation > 0.0) return violation;
    return std::isfinite(min_margin) ? -reward_weight * min_margin : 0.0;
  }
};

class Annealer {
 public:
  Annealer(const Topology& topo, std::span<const ConstraintRecord> records,
           const ConstraintParams& params, Mode mode, const SolverConfig& cfg)
      : topo_(topo), params_(params), mode_(mode), cfg_(cfg), rng_(cfg.seed) {
    for (const auto& r : records) {
      if (r.edge != ConstraintRecord::kNoEdge && r.edge >= topo.n_edges()) {
        throw InvalidArgument("record references an unknown edge");
      }
      for (QubitId q : r.qubits()) {
        if (q >= topo.n_qubits()) throw InvalidArgument("record references an unknown qubit");
      }
      Compiled c{r, {}, params.required(r.family, true)};
      if (r.family != Family::DIFF) c.forms = linear_forms(r, params.alpha_mhz);
      compiled_.push_back(c);
    }
    grid_ = cfg.anneal.grid_mhz;
    steps_ = static_cast<long>(std::floor(params.window_width() / grid_ + 1e-9));
  }

  Solution run() {
    const std::size_t n = topo_.n_qubits();
    std::vector<double> freq(n);
    std::uniform_int_distribution<long> pick_step(0, steps_);
    for (double& f : freq) f = on_grid(pick_step(rng_));
    std::vector<std::uint8_t> bits(topo_.n_edges(), 0);
    if (mode_ == Mode::Fixed) {
      if (!topo_.has_orientation()) throw InvalidArgument("fixed mode needs an oriented topology");
      bits.assign(topo_.orientation().begin(), topo_.orientation().end());
    } else {
      std::bernoulli_distribution coin(0.5);
      for (auto& b : bits) b = coin(rng_) ? 1 : 0;
    }

    const double w = cfg_.anneal.reward_weight;
    double current = energy(freq, bits).value(w);
    double best = current;
    std::vector<double> best_freq = freq;
    std::vector<std::uint8_t> best_bits = bits;

    const bool can_flip = mode_ == Mode::Free && topo_.n_edges() > 0;
    const bool can_swap = n >= 2;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_qubit(0, n == 0 ? 0 : n - 1);
    std::uniform_int_distribution<std::size_t> pick_edge(0, topo_.n_edges() == 0 ? 0 : topo_.n_edges() - 1);
    std::normal_distribution<double> jump(0.0, cfg_.anneal.freq_step_mhz);

    double temp = cfg_.anneal.init_temp;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t move = 0; move < cfg_.anneal.max_moves && n > 0; ++move) {
      if (move > 0 && move % cfg_.anneal.moves_per_temp == 0) temp *= cfg_.anneal.cooling_rate;
      if (move % 1024 == 0 && elapsed(start) > cfg_.time_budget_s) break;

      const double u = unit(rng_);
      std::size_t qa = 0, qb = 0, e = 0;
      double old_a = 0.0;
      int kind = 0;  // 0 jump, 1 flip, 2 swap
      if (can_flip && u < 0.2) {
        kind = 1;
        e = pick_edge(rng_);
        bits[e] ^= 1;
      } else if (can_swap && u > 0.8) {
        kind = 2;
        qa = pick_qubit(rng_);
        do {
          qb = pick_qubit(rng_);
        } while (qb == qa);
        std::swap(freq[qa], freq[qb]);
      } else {
        qa = pick_qubit(rng_);
        old_a = freq[qa];
        long delta = std::lround(jump(rng_) / grid_);
        if (delta == 0) delta = unit(rng_) < 0.5 ? -1 : 1;
        const long k = std::clamp(index_of_freq(old_a) + delta, 0L, steps_);
        freq[qa] = on_grid(k);
      }

      const double next = energy(freq, bits).value(w);
      const double d = next - current;
      if (d <= 0.0 || unit(rng_) < std::exp(-d / temp)) {
        current = next;
        if (current < best) {
          best = current;
          best_freq = freq;
          best_bits = bits;
        }
      } else if (kind == 1) {
        bits[e] ^= 1;
      } else if (kind == 2) {
        std::swap(freq[qa], freq[qb]);
      } else {
        freq[qa] = old_a;
      }
    }

    Solution sol;
    sol.assignment.frequency_mhz = best_freq;
    sol.assignment.orientation = best_bits;
    const Energy e = energy(best_freq, best_bits);
    sol.status = e.violation > 0.0 ? SolveStatus::Infeasible : SolveStatus::Feasible;
    return sol;
  }

 private:
  double on_grid(long k) const { return params_.f_min_mhz + static_cast<double>(k) * grid_; }
  long index_of_freq(double f) const { return std::lround((f - params_.f_min_mhz) / grid_); }
  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  Energy energy(const std::vector<double>& freq, const std::vector<std::uint8_t>& bits) const {
    Energy en;
    for (const Compiled& c : compiled_) {
      if (!c.record.active(bits)) continue;
      double margin;
      if (c.record.family == Family::DIFF) {
        margin = evaluate(c.record, freq, params_, true).margin_mhz;
      } else if (c.forms.absolute) {
        margin = std::abs(c.forms.forms[0].eval(freq)) - c.required;
      } else {
        margin = std::min(c.forms.forms[0].eval(freq), c.forms.forms[1].eval(freq)) - c.required;
      }
      if (margin < 0.0) en.violation -= margin;
      en.min_margin = std::min(en.min_margin, margin);
    }
    return en;
  }

  const Topology& topo_;
  const ConstraintParams& params_;
  Mode mode_;
  const SolverConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<Compiled> compiled_;
  double grid_ = 1.0;
  long steps_ = 0;
};

}  // namespace

Solution solve_anneal(const Topology& topo, std::span<const ConstraintRecord> records,
                      const ConstraintParams& params, Mode mode, const SolverConfig& cfg) {
  cfg.validate();
  params.validate();
  Annealer annealer(topo, records, params, mode, cfg);
  Solution sol = annealer.run();
  double cap = default_slack_cap(params);
  for (Family f : kSlackFamilies) cap = std::max(cap, params.required(f, true));
  fill_slacks(sol, records, params, cap);
  return sol;
}

}  // namespace freqalloc
