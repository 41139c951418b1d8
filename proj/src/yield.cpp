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

#include "freqalloc/yield.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "freqalloc/error.hpp"

namespace freqalloc {

namespace {

constexpr std::size_t kLanes = 64;
constexpr double kZ95 = 1.959963984540054;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw InvalidArgument("sigma must be finite and non-negative");
  }
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

CheckPlan compile_check_plan(const Topology& topo, std::span<const std::uint8_t> orientation,
                             const ConstraintParams& params_base) {
  ConstraintParams p = params_base;
  p.enabled[index_of(Family::DIFF)] = false;
  CheckPlan plan;
  plan.n_qubits = topo.n_qubits();
  for (const ConstraintRecord& r : enumerate(topo, Mode::Fixed, p, orientation)) {
    const RecordForms rf = linear_forms(r, p.alpha_mhz);
    const double bound = p.required(r.family, false);
    for (std::uint8_t k = 0; k < rf.count; ++k) {
      const LinearForm& form = rf.forms[k];
      std::uint32_t q[3] = {0, 0, 0};
      double c[3] = {0.0, 0.0, 0.0};
      for (std::uint8_t t = 0; t < form.size; ++t) {
        q[t] = form.terms[t].qubit;
        c[t] = form.terms[t].coef;
      }
      plan.rows.push(q, c, form.constant, bound,
                     rf.absolute ? kernels::CheckRows::Abs : kernels::CheckRows::NonNeg);
      plan.records.push_back(r);
    }
  }
  return plan;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ trial);
}

FrequencyAssignment sample_perturbation(const FrequencyAssignment& assignment, double sigma_mhz,
                                        std::mt19937_64& rng) {
  check_sigma(sigma_mhz);
  FrequencyAssignment out = assignment;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& f : out.frequency_mhz) f = f + sigma_mhz * normal(rng);
  return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  // exact ends at p = 0 and p = 1, and never let rounding exclude p
  const double lo = successes == 0 ? 0.0 : std::min(p, center - half);
  const double hi = successes == trials ? 1.0 : std::max(p, center + half);
  return {std::max(0.0, lo), std::min(1.0, hi)};
}

YieldEstimate estimate_yield(const CheckPlan& plan, std::span<const double> frequency_mhz,
                             double sigma_mhz, const YieldOptions& options) {
  check_sigma(sigma_mhz);
  if (options.trials < 1) throw InvalidArgument("trials must be at least 1");
  if (frequency_mhz.size() != plan.n_qubits) {
    throw InvalidArgument("frequency count does not match the check plan");
  }
  const kernels::Isa isa = options.isa.value_or(kernels::best_isa());
  const kernels::CountFn kernel = kernels::kernel_for(isa);
  if (kernel == nullptr) {
    throw InvalidArgument("kernel '" + std::string(kernels::to_string(isa)) + "' is not available");
  }

  const std::size_t n = plan.n_qubits;
  const std::size_t blocks = (options.trials + kLanes - 1) / kLanes;
  unsigned jobs = options.jobs != 0 ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, blocks));

  std::atomic<std::size_t> next_block{0};
  std::vector<std::size_t> successes(jobs, 0);
  std::vector<std::uint64_t> violations(jobs, 0);

  auto worker = [&](unsigned id) {
    std::vector<double> freq(std::max<std::size_t>(n, 1) * kLanes);
    std::uint32_t counts[kLanes];
    for (std::size_t b = next_block++; b < blocks; b = next_block++) {
      const std::size_t first = b * kLanes;
      const std::size_t live = std::min(kLanes, options.trials - first);
      for (std::size_t l = 0; l < kLanes; ++l) {
        if (l < live) {
          std::mt19937_64 rng(trial_seed(options.seed, first + l));
          std::normal_distribution<double> normal(0.0, 1.0);
          for (std::size_t q = 0; q < n; ++q) {
            freq[q * kLanes + l] = frequency_mhz[q] + sigma_mhz * normal(rng);
          }
        } else {
          for (std::size_t q = 0; q < n; ++q) freq[q * kLanes + l] = frequency_mhz[q];
        }
      }
      std::fill(std::begin(counts), std::end(counts), 0u);
      kernel(plan.rows, freq.data(), kLanes, counts);
      for (std::size_t l = 0; l < live; ++l) {
        successes[id] += counts[l] == 0 ? 1 : 0;
        violations[id] += counts[l];
      }
    }
  };

  if (jobs <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned id = 0; id < jobs; ++id) pool.emplace_back(worker, id);
  }

  YieldEstimate est;
  est.sigma_mhz = sigma_mhz;
  est.trials = options.trials;
  est.seed = options.seed;
  std::uint64_t total_violations = 0;
  for (unsigned id = 0; id < jobs; ++id) {
    est.successes += successes[id];
    total_violations += violations[id];
  }
  est.yield = static_cast<double>(est.successes) / static_cast<double>(est.trials);
  std::tie(est.ci_lo, est.ci_hi) = wilson_interval(est.successes, est.trials);
  est.mean_violations = static_cast<double>(total_violations) / static_cast<double>(est.trials);
  return est;
}

YieldEstimate estimate_yield(const FrequencyAssignment& assignment, const Topology& topo,
                             const ConstraintParams& params_base, double sigma_mhz,
                             const YieldOptions& options) {
  require_complete(assignment, topo);
  const CheckPlan plan = compile_check_plan(topo, assignment.orientation, params_base);
  return estimate_yield(plan, assignment.frequency_mhz, sigma_mhz, options);
}

ThresholdResult threshold_dispersion(const FrequencyAssignment& assignment, const Topology& topo,
                                     const ConstraintParams& params_base,
                                     const ThresholdOptions& options) {
  if (!(options.target_yield > 0.0 && options.target_yield < 1.0)) {
    throw InvalidArgument("target yield must lie in (0, 1)");
  }
  if (!(options.sigma_lo_mhz >= 0.0 && options.sigma_lo_mhz < options.sigma_hi_mhz)) {
    throw InvalidArgument("sigma bracket must satisfy 0 <= lo < hi");
  }
  if (!(options.tol_mhz > 0.0)) throw InvalidArgument("tolerance must be positive");
  require_complete(assignment, topo);
  const CheckPlan plan = compile_check_plan(topo, assignment.orientation, params_base);

  ThresholdResult result;
  auto evaluate_at = [&](double sigma, bool refine) {
    YieldOptions yo = options.yield;
    YieldEstimate est = estimate_yield(plan, assignment.frequency_mhz, sigma, yo);
    while (refine && est.ci_lo <= options.target_yield && options.target_yield <= est.ci_hi &&
           yo.trials < options.max_trials) {
      yo.trials = std::min(options.max_trials, yo.trials * 2);
      est = estimate_yield(plan, assignment.frequency_mhz, sigma, yo);
    }
    result.evaluations.push_back(est);
    return est;
  };

  const YieldEstimate lo = evaluate_at(options.sigma_lo_mhz, false);
  const YieldEstimate hi = evaluate_at(options.sigma_hi_mhz, false);
  if (!(lo.yield >= options.target_yield && hi.yield <= options.target_yield)) {
    throw BracketError("yield " + fmt(lo.yield) + " at sigma " + fmt(options.sigma_lo_mhz) +
                       " and " + fmt(hi.yield) + " at sigma " + fmt(options.sigma_hi_mhz) +
                       " do not straddle the target " + fmt(options.target_yield));
  }
  double a = options.sigma_lo_mhz;
  double b = options.sigma_hi_mhz;
  while (b - a > options.tol_mhz) {
    const double mid = 0.5 * (a + b);
    const YieldEstimate est = evaluate_at(mid, true);
    (est.yield >= options.target_yield ? a : b) = mid;
  }
  result.bracket_lo = a;
  result.bracket_hi = b;
  result.sigma_mhz = 0.5 * (a + b);
  return result;
}

double composed_yield(double local_yield, std::size_t replicas) {
  if (!(local_yield >= 0.0 && local_yield <= 1.0)) {
    throw InvalidArgument("local yield must lie in [0, 1]");
  }
  if (replicas < 1) throw InvalidArgument("replicas must be at least 1");
  return std::pow(local_yield, static_cast<double>(replicas));
}

std::string yield_csv(std::span<const YieldEstimate> rows) {
  std::string out = "sigma,trials,successes,yield,ci_lo,ci_hi\n";
  for (const auto& r : rows) {
    out += fmt(r.sigma_mhz) + "," + std::to_string(r.trials) + "," + std::to_string(r.successes) +
           "," + fmt(r.yield) + "," + fmt(r.ci_lo) + "," + fmt(r.ci_hi) + "\n";
  }
  return out;
}

}  // namespace freqalloc
