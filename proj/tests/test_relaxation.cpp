// Copyright 2026 The dccool Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dccool/exact.hpp"
#include "dccool/generators.hpp"
#include "dccool/relaxation.hpp"
#include "dccool/surrogate.hpp"
#include "test_support.hpp"

namespace dccool {
namespace {

using testing::MakeInstance;

std::vector<Assignment> AllLoadD(std::size_t n, std::size_t d) {
  std::vector<Assignment> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != d) continue;
    Assignment a(n);
    for (std::size_t i = 0; i < n; ++i) a.set(i, (mask >> i) & 1u);
    out.push_back(a);
  }
  return out;
}

TEST(OptimalCooling, SingleVariableClosedForm) {
  const ProblemInstance p =
      MakeInstance({{1}, {1}, {1}}, {{0.5, 0.2, 0}, {0, 1, 0.3}, {0.1, 0, 0.7}}, {0.2, 0, -0.1}, 1.0, 0.5, {0.05}, {10}, 2);
  const Assignment rho = Assignment::FromIndices(3, std::vector<std::size_t>{0, 1});
  const Vector req = CoolingRequirement(p, rho.as_vector(), RedLines::Two(p));
  double expect = p.v_lb[0];
  for (double r : req) expect = std::max(expect, r);
  const auto c = OptimalCoolingFor(p, rho);
  ASSERT_TRUE(c);
  EXPECT_NEAR(c->v[0], expect, 1e-12);
  EXPECT_NEAR(c->cost, expect, 1e-12);

  ProblemInstance tight = p;
  tight.v_ub = {expect - 1e-3};
  EXPECT_FALSE(OptimalCoolingFor(tight, rho));
}

TEST(OptimalCooling, IdleLoadKeepsLowerBounds) {
  const ProblemInstance p =
      MakeInstance({{1, 0.5}, {0.2, 1}}, {{1, 1}, {1, 1}}, {0, 0}, 2.0, 1.0, {0.3, 0.4}, {5, 5}, 0);
  const auto c = OptimalCoolingFor(p, Assignment(2));
  ASSERT_TRUE(c);
  EXPECT_EQ(c->v, p.v_lb);
  EXPECT_NEAR(c->cost, 0.7, 1e-15);
}

TEST(OptimalCooling, ZeroCoolingRowThatNeedsCoolingIsInadmissible) {
  ProblemInstance p = MakeInstance({{1}, {1}}, {{2, 0}, {0, 0}}, {0, 0}, 1.0, 0.5, {0}, {5}, 1);
  p.A(0, 0) = 0.0;
  EXPECT_FALSE(OptimalCoolingFor(p, Assignment::FromIndices(2, std::vector<std::size_t>{0})));
}

// Grid oracle for m = 2: the cheapest grid point that satisfies every row.
TEST(OptimalCooling, MatchesGridSearchForTwoVariables) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    ProblemInstance p = testing::RandomDense(seed, 6, 2, 3);
    p.v_ub = {2.0, 2.0};
    Rng rng(seed + 100);
    Assignment rho(6);
    for (std::size_t i : rng.sample(std::vector<std::size_t>{0, 1, 2, 3, 4, 5}, 3)) rho.set(i, true);
    const Vector req = CoolingRequirement(p, rho.as_vector(), RedLines::Two(p));
    const auto lp = OptimalCoolingFor(p, rho);
    const double h = 1e-3 * 2.0;
    double grid = kInf;
    const int steps = 1000;
    for (int x = 0; x <= steps; ++x) {
      const double v0 = x * h;
      if (v0 >= grid) break;
      for (int y = 0; y <= steps; ++y) {
        const double v1 = y * h;
        if (v0 + v1 >= grid) break;
        bool ok = true;
        for (std::size_t l = 0; l < 6 && ok; ++l) ok = p.A(l, 0) * v0 + p.A(l, 1) * v1 >= req[l];
        if (ok) grid = v0 + v1;
      }
    }
    if (!lp) {
      EXPECT_EQ(grid, kInf);
      continue;
    }
    EXPECT_GE(grid, lp->cost - 1e-9);
    EXPECT_LE(grid, lp->cost + 2 * h + 1e-9);
  }
}

TEST(Relaxation, LemmaOneCostIsLowerBoundSum) {
  for (double vl : {1e-1, 1e-2, 1e-3}) {
    for (std::size_t m : {1u, 2u}) {
      Lemma1Params s;
      s.v_lb = vl;
      s.m = m;
      const ProblemInstance p = GenLemma1(s);
      EXPECT_NEAR(SolveRelaxation(p).cost, static_cast<double>(m) * vl, 1e-9);
    }
  }
}

TEST(Relaxation, ZeroDemandCostsLowerBounds) {
  ProblemInstance p = testing::SmallCase3(3, 8, 0);
  EXPECT_NEAR(SolveRelaxation(p).cost, 3e-3, 1e-12);
}

TEST(Relaxation, FullDemandForcesAllOnes) {
  ProblemInstance p = testing::SmallCase3(4, 7, 7);
  const RelaxationResult r = SolveRelaxation(p);
  for (double x : r.rho) EXPECT_NEAR(x, 1.0, 1e-9);
  const auto c = OptimalCoolingFor(p, Assignment(std::vector<std::uint8_t>(7, 1)));
  ASSERT_TRUE(c);
  EXPECT_NEAR(r.cost, c->cost, 1e-7 * (1 + c->cost));
}

TEST(Relaxation, LowerBoundsEveryAssignment) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const std::size_t n = 6 + seed % 4, d = 1 + seed % (n - 1);
    const ProblemInstance p = seed % 2 ? testing::SmallCase3(seed, n, d) : testing::RandomDense(seed, n, 2, d);
    const double bound = SolveRelaxation(p).cost;
    for (const Assignment& a : AllLoadD(n, d)) {
      const auto c = OptimalCoolingFor(p, a);
      if (c) {
        ASSERT_LE(bound, c->cost + 1e-9 * (1 + c->cost));
      }
    }
  }
}

TEST(Relaxation, RelaxedSolutionSatisfiesConstraints) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ProblemInstance p = testing::SmallCase3(seed, 10, 1 + seed % 9);
    const RelaxationResult r = SolveRelaxation(p);
    double mass = 0.0;
    for (double x : r.rho) {
      EXPECT_GE(x, -1e-9);
      EXPECT_LE(x, 1 + 1e-9);
      mass += x;
    }
    EXPECT_NEAR(mass, static_cast<double>(p.demand), 1e-7);
    EXPECT_LE(MaxViolation(p, r.v, r.rho), 1e-7);
    EXPECT_NEAR(r.cost, CoolingCost(p, r.v), 1e-12);
  }
}

TEST(Relaxation, CenteringSpreadsSymmetricLoad) {
  const ProblemInstance p = GenLemma2({});
  const RelaxationResult r = SolveRelaxation(p);
  for (double x : r.rho) EXPECT_NEAR(x, 0.2, 1e-9);
  EXPECT_NEAR(r.cost, 0.0, 1e-12);
}

TEST(Relaxation, CostMonotoneInAddedLoad) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ProblemInstance p = testing::RandomDense(seed, 7, 2, 3);
    Rng rng(seed);
    Assignment small(7);
    for (std::size_t i : rng.sample(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6}, 3)) small.set(i, true);
    Assignment big = small;
    for (std::size_t i = 0; i < 7; ++i) {
      if (!big[i]) {
        big.set(i, true);
        break;
      }
    }
    const auto a = OptimalCoolingFor(p, small), b = OptimalCoolingFor(p, big);
    if (a && b) {
      EXPECT_LE(a->cost, b->cost + 1e-9);
    }
    if (!a) {
      EXPECT_FALSE(b);
    }
  }
}

TEST(Relaxation, InfeasibleWhenMaximumCoolingFails) {
  ProblemInstance p = testing::SmallCase3(1, 6, 3);
  p.v_ub = p.v_lb;
  EXPECT_THROW(SolveRelaxation(p), Error);
}

TEST(Relaxation, FixingsRespected) {
  const ProblemInstance p = testing::SmallCase3(7, 8, 3);
  RelaxationOptions opt;
  opt.rho_lower.assign(8, 0.0);
  opt.rho_upper.assign(8, 1.0);
  opt.rho_lower[2] = opt.rho_upper[2] = 1.0;
  opt.rho_upper[5] = 0.0;
  const auto r = SolveRelaxationWith(p, RedLines::Two(p), opt);
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->rho[2], 1.0, 1e-9);
  EXPECT_NEAR(r->rho[5], 0.0, 1e-9);
}

TEST(SingleRedline, ZeroDemandUsesBusyLine) {
  ProblemInstance p = testing::RandomDense(3, 6, 2, 0);
  const ContinuousSolution c = SolveContinuousSingleRedline(p);
  for (double x : c.rho) EXPECT_NEAR(x, 0.0, 1e-12);
  Vector req(6);
  for (std::size_t l = 0; l < 6; ++l) req[l] = p.E[l] - p.t_busy;
  const auto ref = CoolingForRequirement(p, req);
  ASSERT_TRUE(ref);
  EXPECT_NEAR(c.cost, ref->cost, 1e-9);
}

TEST(SingleRedline, KeepsEveryInletBelowBusyLine) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance p = testing::SmallCase3(seed, 9, 4);
    const ContinuousSolution c = SolveContinuousSingleRedline(p);
    const Vector t = InletTemperatures(p, c.v, c.rho);
    for (double x : t) EXPECT_LE(x, p.t_busy + 1e-7);
    double mass = 0.0;
    for (double x : c.rho) mass += x;
    EXPECT_NEAR(mass, 4.0, 1e-7);
  }
}

}  // namespace
}  // namespace dccool
