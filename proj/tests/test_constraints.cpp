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
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "freqalloc/constraints.hpp"
#include "freqalloc/error.hpp"
#include "naive.hpp"
#include "support.hpp"

using namespace freqalloc;
using freqalloc::test::NaiveHit;

namespace {

std::map<Family, std::size_t> family_counts(const std::vector<ConstraintRecord>& recs) {
  std::map<Family, std::size_t> out;
  for (const auto& r : recs) ++out[r.family];
  return out;
}

std::vector<NaiveHit> as_hits(const ViolationReport& rep) {
  std::vector<NaiveHit> out;
  for (const auto& v : rep.violations) {
    const auto& p = v.record.participants;
    out.push_back({std::string(to_string(v.record.family)), p[0], p[1],
                   v.record.arity == 3 ? p[2] : 0, v.margin_mhz});
  }
  std::sort(out.begin(), out.end());
  return out;
}

FrequencyAssignment two(double f0, double f1, std::uint8_t bit) { return {{f0, f1}, {bit}}; }

const Violation* find(const ViolationReport& r, Family f) {
  for (const auto& v : r.violations)
    if (v.record.family == f) return &v;
  return nullptr;
}

}  // namespace

TEST_CASE("default_params") {
  auto p = default_params();
  CHECK(p.base(Family::A1) == 17.0);
  CHECK(p.base(Family::A2) == 30.0);
  CHECK(p.base(Family::E1) == 17.0);
  CHECK(p.base(Family::E2) == 30.0);
  CHECK(p.base(Family::D1) == 2.0);
  CHECK(p.base(Family::S1) == 17.0);
  CHECK(p.base(Family::S2) == 25.0);
  CHECK(p.base(Family::T1) == 17.0);
  CHECK(p.alpha_mhz == -350.0);
  for (Family f : kAllFamilies) CHECK(p.eps(f) == 0.0);
  CHECK(p.delta_diff_mhz == 0.0);
  CHECK(p.f_min_mhz == 5000.0);
  CHECK(p.f_max_mhz == 5500.0);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("uniform tolerance skips D1") {
  auto p = default_params();
  apply_uniform_tolerance(p, 10);
  CHECK(p.required(Family::A1, true) == 27.0);
  CHECK(p.required(Family::A1, false) == 17.0);
  CHECK(p.required(Family::D1, true) == 2.0);
  CHECK(p.required(Family::C1, true) == 0.0);
}

TEST_CASE("params validation") {
  auto p = default_params();
  p.base_bound_mhz[index_of(Family::S2)] = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = default_params();
  p.f_max_mhz = p.f_min_mhz;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = default_params();
  p.eps_tol_mhz[0] = -1;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  CHECK(family_from_string("T1") == Family::T1);
  CHECK_THROWS_AS(family_from_string("F1"), InvalidArgument);
}

TEST_CASE("enumerate single edge fixed") {
  auto t = test::oriented_forward(path_graph(2));
  auto recs = enumerate(t, Mode::Fixed, default_params());
  REQUIRE(recs.size() == 6);
  auto c = family_counts(recs);
  CHECK(c[Family::A1] == 1);
  CHECK(c[Family::A2] == 1);
  CHECK(c[Family::C1] == 1);
  CHECK(c[Family::E1] == 1);
  CHECK(c[Family::E2] == 1);
  CHECK(c[Family::D1] == 1);
  for (const auto& r : recs) {
    if (r.family == Family::A1 || r.family == Family::A2)
      CHECK(r.orientation == OrientationCase::Undirected);
    else
      CHECK(r.orientation == OrientationCase::Forward);
  }
}

TEST_CASE("enumerate path 0-1-2 fixed") {
  auto t = test::oriented_forward(path_graph(3));
  auto recs = enumerate(t, Mode::Fixed, default_params());
  auto c = family_counts(recs);
  CHECK(c[Family::S1] == 1);
  CHECK(c[Family::S2] == 1);
  CHECK(c[Family::T1] == 1);
  for (const auto& r : recs) {
    if (is_spectator_family(r.family)) {
      CHECK(r.participants[0] == 0);
      CHECK(r.participants[1] == 1);
      CHECK(r.participants[2] == 2);
    }
  }
  CHECK(recs.size() == 2 * 6 + 3);
}

TEST_CASE("fixed mode needs an orientation") {
  CHECK_THROWS_AS(enumerate(path_graph(3), Mode::Fixed, default_params()), InvalidArgument);
  std::vector<std::uint8_t> bits{0};
  CHECK_THROWS_AS(enumerate(path_graph(3), Mode::Fixed, default_params(), bits), InvalidArgument);
}

TEST_CASE("DIFF record count on 4x4 grid equals disjoint pairs") {
  auto t = square_grid(4, 4);
  auto p = default_params();
  p.delta_diff_mhz = 2;
  auto recs = enumerate(t, Mode::Free, p);
  std::size_t brute = 0;
  auto edges = t.edges();
  for (std::size_t k = 0; k < edges.size(); ++k)
    for (std::size_t l = k + 1; l < edges.size(); ++l) {
      std::set<QubitId> ends{edges[k].a, edges[k].b, edges[l].a, edges[l].b};
      if (ends.size() == 4) ++brute;
    }
  CHECK(family_counts(recs)[Family::DIFF] == brute);
  CHECK(brute == 224);
  p.delta_diff_mhz = 0;
  CHECK(family_counts(enumerate(t, Mode::Free, p))[Family::DIFF] == 0);
}

TEST_CASE("edge_difference_pairs examples") {
  CHECK(edge_difference_pairs(path_graph(3)).empty());
  auto p4 = path_graph(4);
  auto pairs = edge_difference_pairs(p4);
  REQUIRE(pairs.size() == 1);
  CHECK(p4.edge(pairs[0].first).a == 0);
  CHECK(p4.edge(pairs[0].second).a == 2);
  CHECK(edge_difference_pairs(square_grid(2, 2)).size() == 2);
}

TEST_CASE("free-mode record counts double the directed families") {
  for (const auto& t : {square_grid(3, 3), star_graph(4), cycle_graph(5), hex_grid(2, 1)}) {
    auto p = default_params();
    auto free = family_counts(enumerate(t, Mode::Free, p));
    CHECK(free[Family::C1] == 2 * t.n_edges());
    CHECK(free[Family::A1] == t.n_edges());
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      auto bits = random_orientation(t, rng());
      auto fixed = family_counts(enumerate(t, Mode::Fixed, p, bits));
      for (Family f : {Family::C1, Family::E1, Family::E2, Family::D1}) CHECK(free[f] == 2 * fixed[f]);
      // spectator counts depend on orientation; summed over both cases they match
    }
    std::size_t spect = 0;
    for (std::size_t e = 0; e < t.n_edges(); ++e)
      spect += edge_spectators(t, e, 0).size() + edge_spectators(t, e, 1).size();
    CHECK(free[Family::S1] == spect);
    CHECK(free[Family::T1] == spect);
  }
}

TEST_CASE("mirror symmetry between fixed and free records") {
  for (const auto& t : {path_graph(4), star_graph(3), square_grid(2, 3), cycle_graph(4)}) {
    auto p = default_params();
    auto free = enumerate(t, Mode::Free, p);
    auto bits = random_orientation(t, 11);
    std::vector<std::uint8_t> flipped(bits.size());
    for (std::size_t e = 0; e < bits.size(); ++e) flipped[e] = bits[e] ^ 1;
    auto fwd = enumerate(t, Mode::Fixed, p, bits);
    auto rev = enumerate(t, Mode::Fixed, p, flipped);
    // every directed record of the random bits has a free-mode twin with the same
    // case; flipping all bits yields the records of the opposite case
    auto directed_only = [](std::vector<ConstraintRecord> v) {
      std::erase_if(v, [](const ConstraintRecord& r) {
        return r.orientation == OrientationCase::Undirected;
      });
      return v;
    };
    auto d_fwd = directed_only(fwd), d_rev = directed_only(rev), d_free = directed_only(free);
    CHECK(d_fwd.size() + d_rev.size() == d_free.size());
    for (const auto& r : d_fwd) {
      CHECK(std::count(d_free.begin(), d_free.end(), r) == 1);
      CHECK(static_cast<std::uint8_t>(r.orientation) == bits[r.edge]);
    }
    for (const auto& r : d_rev) {
      CHECK(std::count(d_free.begin(), d_free.end(), r) == 1);
      CHECK(static_cast<std::uint8_t>(r.orientation) == flipped[r.edge]);
    }
    // role swap: for gate families the participants of the flipped record
    // are the original pair reversed
    for (const auto& r : d_fwd) {
      if (!is_gate_family(r.family)) continue;
      bool twin = false;
      for (const auto& s : d_rev)
        twin |= s.family == r.family && s.edge == r.edge &&
                s.participants[0] == r.participants[1] && s.participants[1] == r.participants[0];
      CHECK(twin);
    }
  }
}

TEST_CASE("check examples") {
  auto t = path_graph(2);
  auto p = default_params();
  for (std::uint8_t bit : {0, 1}) {
    auto rep = check(two(5000, 5010, bit), t, p);
    const Violation* a1 = find(rep, Family::A1);
    REQUIRE(a1 != nullptr);
    CHECK(a1->margin_mhz == doctest::Approx(-7.0));
  }
  auto rep = check(two(5100, 5000, 0), t, p);
  CHECK(find(rep, Family::C1) == nullptr);
  CHECK(find(rep, Family::A1) == nullptr);
  auto v = evaluate(enumerate(test::oriented_forward(t), Mode::Fixed, p)[0], std::vector<double>{5100, 5000}, p, false);
  CHECK(v.record.family == Family::A1);
  CHECK(v.margin_mhz == 83.0);

  rep = check(two(5000, 4650, 0), t, p);
  const Violation* e2 = find(rep, Family::E2);
  REQUIRE(e2 != nullptr);
  CHECK(e2->measured_mhz == 0.0);
  CHECK(e2->margin_mhz == -30.0);
}

TEST_CASE("check rejects incomplete assignments") {
  auto t = path_graph(3);
  auto p = default_params();
  CHECK_THROWS_AS(check({{5000, 5100}, {0, 0}}, t, p), InvalidArgument);
  CHECK_THROWS_AS(check({{5000, 5100, 5200}, {0}}, t, p), InvalidArgument);
  CHECK_THROWS_AS(check({{5000, NAN, 5200}, {0, 0}}, t, p), InvalidArgument);
}

TEST_CASE("check ignores tightening and DIFF") {
  auto t = path_graph(4);
  auto p = default_params();
  FrequencyAssignment a{{5300, 5000, 5230, 4930}, {1, 0, 1}};
  auto base = check(a, t, p).violations.size();
  p.delta_diff_mhz = 50;
  apply_uniform_tolerance(p, 20);
  CHECK(check(a, t, p).violations.size() == base);
}

TEST_CASE("check matches the naive evaluator on random 3x3 assignments") {
  auto t = square_grid(3, 3);
  auto p = default_params();
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> freq(4900.0, 5600.0);
  std::uniform_int_distribution<int> grid(0, 700);
  std::size_t mismatches = 0, violated = 0;
  for (int n = 0; n < 1000; ++n) {
    FrequencyAssignment a;
    for (int q = 0; q < 9; ++q) {
      // half the draws on a 1 MHz grid so exact boundary ties occur
      a.frequency_mhz.push_back(n % 2 ? freq(rng) : 4900.0 + grid(rng));
    }
    a.orientation = random_orientation(t, rng());
    auto got = as_hits(check(a, t, p));
    auto want = test::naive_check(t, a.frequency_mhz, a.orientation);
    std::sort(want.begin(), want.end());
    if (got != want) ++mismatches;
    violated += want.size();
  }
  CHECK(mismatches == 0);
  CHECK(violated > 0);
}

TEST_CASE("check is deterministic and idempotent") {
  auto t = square_grid(2, 3);
  auto p = default_params();
  FrequencyAssignment a{{5000, 5100, 5200, 5150, 5050, 5250}, checkerboard_orientation(t)};
  auto r1 = as_hits(check(a, t, p));
  auto r2 = as_hits(check(a, t, p));
  CHECK(r1 == r2);
}
