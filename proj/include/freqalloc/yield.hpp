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
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqalloc/constraints.hpp"
#include "freqalloc/kernels.hpp"
#include "freqalloc/topology.hpp"

namespace freqalloc {

struct YieldEstimate {
  double sigma_mhz = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double yield = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
  /// Mean number of violated instances per trial (a chip with a few
  /// collisions still counts as failed in `yield`).
  double mean_violations = 0.0;
};

/// Flattened base-bound collision checks for one topology and orientation.
struct CheckPlan {
  std::size_t n_qubits = 0;
  kernels::CheckRows rows;
  std::vector<ConstraintRecord> records;  // one per row
};

/// Every collision instance (no DIFF) at base bounds under `orientation`.
CheckPlan compile_check_plan(const Topology& topo, std::span<const std::uint8_t> orientation,
                             const ConstraintParams& params_base);

/// Per-trial generator seed: splitmix64 of the pair (seed, trial).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Adds independent N(0, sigma^2) offsets to every frequency. Each call uses
/// a fresh standard normal distribution on `rng`, so the offsets for a given
/// generator state are sigma times a fixed vector.
FrequencyAssignment sample_perturbation(const FrequencyAssignment& assignment, double sigma_mhz,
                                        std::mt19937_64& rng);

/// Wilson score interval at z = 1.96.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

struct YieldOptions {
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  unsigned jobs = 0;                 // 0: hardware concurrency
  std::optional<kernels::Isa> isa;   // default: best available
};

/// Monte Carlo yield at base bounds. Trial t draws its offsets from
/// trial_seed(seed, t), so results do not depend on `jobs`, and the same seed
/// gives common random numbers across sigma values.
YieldEstimate estimate_yield(const FrequencyAssignment& assignment, const Topology& topo,
                             const ConstraintParams& params_base, double sigma_mhz,
                             const YieldOptions& options);
YieldEstimate estimate_yield(const CheckPlan& plan, std::span<const double> frequency_mhz,
                             double sigma_mhz, const YieldOptions& options);

struct ThresholdOptions {
  double target_yield = 0.10;
  double sigma_lo_mhz = 0.0;
  double sigma_hi_mhz = 100.0;
  double tol_mhz = 0.1;
  std::size_t max_trials = 1u << 20;
  YieldOptions yield;
};

struct ThresholdResult {
  double sigma_mhz = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<YieldEstimate> evaluations;  // in evaluation order
};

/// Bisection on sigma for the largest dispersion that keeps the yield at the
/// target. At each midpoint the trial count doubles while the Wilson interval
/// still contains the target, up to max_trials. Throws BracketError when the
/// end points do not straddle the target.
ThresholdResult threshold_dispersion(const FrequencyAssignment& assignment, const Topology& topo,
                                     const ConstraintParams& params_base,
                                     const ThresholdOptions& options);

/// local_yield^replicas. Assumes module failures are independent.
double composed_yield(double local_yield, std::size_t replicas);

std::string yield_csv(std::span<const YieldEstimate> rows);

}  // namespace freqalloc
