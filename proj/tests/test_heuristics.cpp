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
#include <numeric>
#include <vector>

#include "dccool/exact.hpp"
#include "dccool/generators.hpp"
#include "dccool/heuristics.hpp"
#include "test_support.hpp"

namespace dccool {
namespace {

using testing::MakeInstance;

Assignment Busy(std::size_t n, std::vector<std::size_t> idx) { return Assignment::FromIndices(n, idx); }

ProblemInstance TwoServers(Vector e) {
  return MakeInstance({{1, 0}, {0, 2}}, {{0, 0}, {0, 0}}, std::move(e), 2.0, 1.0, {0, 0}, {10, 10}, 1);
}

// Fractional vector with mass exactly D built by random pairwise transfers.
Vector RandomFractional(Rng& rng, std::size_t n, std::size_t d) {
  Vector r(n, static_cast<double>(d) / static_cast<double>(n));
  for (int t = 0; t < 40; ++t) {
    const std::size_t i = rng.below(n), j = rng.below(n);
    if (i == j) continue;
    const double amt = rng.uniform() * std::min(r[i], 1.0 - r[j]);
    r[i] -= amt;
    r[j] += amt;
  }
  return r;
}

TEST(RoundLargest, PicksLargestWithIndexTies) {
  const Vector r{0.9, 0.8, 0.3};
  EXPECT_EQ(RoundLargest(r, 2), Busy(3, {0, 1}));
  const Vector tied{0.5, 0.5 + 1e-12, 0.5, 0.2};
  EXPECT_EQ(RoundLargest(tied, 2), Busy(4, {0, 1}));
}

TEST(SimpleRounding, Lemma2RoundsOntoOneWindow) {
  const ProblemInstance p = GenLemma2({});
  const Solution s = SimpleRounding(p);
  EXPECT_EQ(s.rho, Busy(25, {0, 1, 2, 3, 4}));
  EXPECT_NEAR(s.cost, 4.5, 1e-9);
}

TEST(SimpleRounding, FullLoadIsAllBusy) {
  ProblemInstance p = testing::RandomDense(3, 5, 2, 5);
  const Solution s = SimpleRounding(p);
  EXPECT_EQ(s.rho.load(), 5u);
  EXPECT_TRUE(s.feasible);
}

TEST(DominantGroups, Example) {
  const ProblemInstance p =
      MakeInstance({{3, 0}, {0, 2}, {2, 1}}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, {0, 0, 0}, 2, 1, {0, 0}, {1, 1}, 1);
  const DominantGroups g = ComputeDominantGroups(p);
  EXPECT_EQ(g.w, (Vector{3, 2, 2}));
  ASSERT_EQ(g.K(), 2u);
  EXPECT_EQ(g.groups[0], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(g.groups[1], (std::vector<std::size_t>{1}));
}

TEST(DominantGroups, EqualRowsAndTies) {
  const ProblemInstance eq =
      MakeInstance({{1, 4}, {1, 4}, {1, 4}}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, {0, 0, 0}, 2, 1, {0, 0}, {1, 1}, 1);
  EXPECT_EQ(ComputeDominantGroups(eq).K(), 1u);
  const ProblemInstance tie = MakeInstance({{2, 2}}, {{0}}, {0}, 2, 1, {0, 0}, {1, 1}, 1);
  EXPECT_EQ(ComputeDominantGroups(tie).dominant[0], 0u);
}

TEST(DominantGroups, ZeroRowRejected) {
  ProblemInstance p = TwoServers({0, 0});
  p.A(1, 1) = 0.0;
  try {
    ComputeDominantGroups(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroRow);
  }
}

TEST(SurrogateCost, TwoServerArithmetic) {
  // Brackets are (0.5, 0.5) with w = (1, 2) in separate groups.
  const ProblemInstance p = TwoServers({1.5, 1.5});
  const Vector rho{1, 1}, v{0, 0};
  EXPECT_NEAR(H1Cost(p, rho, v), 0.5, 1e-15);
  EXPECT_NEAR(H2Cost(p, rho, v), 0.75, 1e-15);
}

TEST(SurrogateCost, H1IsNotClamped) {
  const ProblemInstance p = TwoServers({0, 0});
  const Vector rho{1, 0}, v{5, 5};
  // Brackets: 1 - 7 = -6 and 0 - 12 = -12, over w = (1, 2).
  EXPECT_NEAR(H1Cost(p, rho, v), -6.0, 1e-12);
  EXPECT_EQ(H2Cost(p, rho, v), 0.0);
}

TEST(SurrogateCost, SingleGroupCollapsesToMax) {
  const ProblemInstance p =
      MakeInstance({{1}, {2}}, {{0, 0}, {0, 0}}, {1.5, 1.5}, 2, 1, {0}, {10}, 1);
  const Vector rho{1, 1}, v{0};
  EXPECT_NEAR(H2Cost(p, rho, v), 0.5, 1e-15);
}

// H2 = 0 exactly when no row is violated; H1 <= 0 implies the same.
TEST(SurrogateCost, ZeroIffNoViolations) {
  Rng rng(41);
  int zero_seen = 0;
  for (int t = 0; t < 400; ++t) {
    const ProblemInstance p = testing::RandomDense(500 + t, 6, 2, 3);
    Vector rho(6);
    for (double& r : rho) r = rng.uniform();
    const Vector v{rng.uniform(0, 1), rng.uniform(0, 1)};
    const bool clean = MaxViolation(p, v, rho) <= 1e-12;
    const double h2 = H2Cost(p, rho, v);
    EXPECT_EQ(h2 <= 1e-12, clean) << t;
    if (H1Cost(p, rho, v) <= 0.0) {
      EXPECT_TRUE(clean) << t;
    }
    zero_seen += clean;
  }
  EXPECT_GT(zero_seen, 10);
  EXPECT_LT(zero_seen, 390);
}

TEST(Redistribute, Proportional) {
  const Vector r = RedistributeWithout({0.5, 0.5, 0.5, 0.5}, {0, 1, 2, 3}, 0);
  EXPECT_EQ(r[0], 0.0);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(r[i], 2.0 / 3.0, 1e-15);
}

TEST(Redistribute, OverflowIsPassedOn) {
  const Vector r = RedistributeWithout({0.95, 0.60, 0.45}, {0, 1, 2}, 2);
  EXPECT_NEAR(r[0], 1.0, 1e-15);
  EXPECT_NEAR(r[1], 1.0, 1e-12);
  EXPECT_EQ(r[2], 0.0);
}

TEST(GradualRounding, BinaryInputUnchanged) {
  const ProblemInstance p = testing::RandomDense(1, 5, 2, 2);
  RoundingTrace trace;
  const Assignment a = GradualRounding(p, Vector{0, 1, 0, 1, 0}, [](std::span<const double>) { return 0.0; }, &trace);
  EXPECT_EQ(a, Busy(5, {1, 3}));
  EXPECT_EQ(trace.outer_iterations, 0u);
}

TEST(GradualRounding, MassConservedAndIterationCount) {
  Rng rng(7);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 3 + rng.below(8);
    const std::size_t d = 1 + rng.below(n - 1);
    ProblemInstance p = testing::RandomDense(900 + t, n, 2, d);
    const Vector rho = RandomFractional(rng, n, d);
    std::size_t support = 0;
    for (double r : rho) support += r > 1e-9;
    const RoundingCost cost(p, p.v_lb, t % 2 ? Variant::kH1 : Variant::kH2);
    RoundingTrace trace;
    const Assignment a = GradualRounding(p, rho, [&](std::span<const double> r) { return cost(r); }, &trace);
    ASSERT_EQ(a.load(), d);
    EXPECT_EQ(trace.outer_iterations, support - d);
    for (double m : trace.masses) ASSERT_NEAR(m, static_cast<double>(d), 1e-9);
  }
}

TEST(GradualRounding, WrongMassRejected) {
  const ProblemInstance p = testing::RandomDense(1, 4, 2, 2);
  try {
    GradualRounding(p, Vector{0.5, 0.5, 0.5, 0.2}, [](std::span<const double>) { return 0.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPreconditionViolated);
  }
}

TEST(GradualRounding, PicksCheapestRemoval) {
  // Cost = load on server 2, so server 2 is idled first.
  const ProblemInstance p = testing::RandomDense(1, 3, 2, 2);
  const Assignment a =
      GradualRounding(p, Vector{0.7, 0.7, 0.6}, [](std::span<const double> r) { return r[2]; });
  EXPECT_EQ(a, Busy(3, {0, 1}));
}

TEST(SwapRefinement, LocalOptimumUnchanged) {
  const ProblemInstance p = TwoServers({0, 0});
  const Vector v{0, 0};
  for (Variant var : {Variant::kH1, Variant::kH2}) {
    // H1 is -1 for {0} and -0.5 for {1}; H2 is 0 for both.
    EXPECT_EQ(SwapRefinement(p, Busy(2, {0}), v, var), Busy(2, {0}));
  }
}

TEST(SwapRefinement, TwoPointImprovement) {
  const ProblemInstance p = MakeInstance({{1}, {1}}, {{0, 0}, {0, 0}}, {0, 1.5}, 2, 1, {0}, {10}, 1);
  const Vector v{0};
  EXPECT_EQ(SwapRefinement(p, Busy(2, {1}), v, Variant::kH1), Busy(2, {0}));
  EXPECT_EQ(SwapRefinement(p, Busy(2, {1}), v, Variant::kH2), Busy(2, {0}));
}

TEST(SwapRefinement, Lemma2WindowIsBroken) {
  const ProblemInstance p = GenLemma2({});
  const RelaxationResult relax = SolveRelaxation(p);
  const Assignment sr = Busy(25, {0, 1, 2, 3, 4});
  const Assignment after = SwapRefinement(p, sr, relax.v, Variant::kH2);
  EXPECT_NE(after, sr);
  EXPECT_LT(H2Cost(p, after.as_vector(), relax.v), H2Cost(p, sr.as_vector(), relax.v));
}

TEST(SwapRefinement, NeverWorseAndLoadPreserved) {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const ProblemInstance p = testing::RandomDense(t, 7, 2, 3);
    std::vector<std::size_t> all(7);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Assignment start = Assignment::FromIndices(7, rng.sample(all, 3));
    const Vector v{rng.uniform(0, 3), rng.uniform(0, 3)};
    for (Variant var : {Variant::kH1, Variant::kH2}) {
      const RoundingCost cost(p, v, var);
      const Assignment out = SwapRefinement(p, start, v, var);
      EXPECT_EQ(out.load(), 3u);
      EXPECT_LE(cost(out.as_vector()), cost(start.as_vector()) + 1e-12);
    }
  }
}

TEST(RunHeuristic, ForcedFullLoad) {
  const ProblemInstance p = testing::RandomDense(2, 4, 2, 4);
  const Solution s = RunHeuristic(p, Variant::kH2, 1);
  EXPECT_EQ(s.rho.load(), 4u);
  EXPECT_NEAR(s.cost, OptimalCoolingFor(p, s.rho)->cost, 1e-12);
}

TEST(RunHeuristic, Deterministic) {
  const ProblemInstance p = testing::SmallCase3(5, 12, 5);
  for (Variant var : {Variant::kH1, Variant::kH2}) {
    const Solution a = RunHeuristic(p, var, 99);
    const Solution b = RunHeuristic(p, var, 99);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.cost, b.cost);
  }
}

TEST(RunHeuristic, Case2AtLowDemandIsOptimal) {
  CaseParams c;
  c.demand = 4;
  int optimal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ProblemInstance p = GenCase2(seed, c);
    const double exact = EnumerateExact(p).cost;
    const double h2 = RunHeuristic(p, Variant::kH2, seed).cost;
    ASSERT_GE(h2, exact - 1e-9);
    optimal += h2 <= exact * (1 + 1e-9) + 1e-12;
  }
  EXPECT_GE(optimal, 90);
}

TEST(GeneticAlgorithm, CrossoverOfTwinsIsTwin) {
  Rng rng(1);
  const Assignment a = Busy(8, {1, 4, 6});
  EXPECT_EQ(Crossover(a, 2.0, a, 3.0, rng), a);
}

TEST(GeneticAlgorithm, OperatorsPreserveLoad) {
  Rng rng(5);
  std::vector<std::size_t> all(10);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (int t = 0; t < 500; ++t) {
    const Assignment x = Assignment::FromIndices(10, rng.sample(all, 4));
    const Assignment y = Assignment::FromIndices(10, rng.sample(all, 4));
    const double fx = t % 7 == 0 ? kInf : rng.uniform(0, 5);
    const double fy = rng.uniform(0, 5);
    EXPECT_EQ(Mutate(x, rng).load(), 4u);
    const Assignment child = Crossover(x, fx, y, fy, rng);
    EXPECT_EQ(child.load(), 4u);
    for (std::size_t i = 0; i < 10; ++i) {
      if (x[i] == y[i]) {
        EXPECT_EQ(child[i], x[i]);
      }
    }
  }
}

TEST(GeneticAlgorithm, NeverBeatsExactAndOftenMatches) {
  int equal = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const ProblemInstance p = testing::RandomDense(2000 + t, 6, 2, 3);
    const double exact = EnumerateExact(p).cost;
    GaParams g;
    g.seed = static_cast<std::uint64_t>(t);
    const Solution s = GeneticAlgorithm(p, g);
    ASSERT_GE(s.cost, exact - 1e-9);
    equal += s.cost <= exact + 1e-9 * (1 + exact);
  }
  RecordProperty("ga_equal_rate", equal);
  EXPECT_GE(equal, trials / 2);
}

TEST(AllHeuristics, FeasibleWithExactLoad) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 1 + seed % 9;
    const ProblemInstance p = testing::SmallCase3(seed, 10, d);
    std::vector<Solution> out{SimpleRounding(p), RunHeuristic(p, Variant::kH1, seed),
                              RunHeuristic(p, Variant::kH2, seed), GeneticAlgorithm(p, {0, {}, seed})};
    for (const Solution& s : out) {
      EXPECT_EQ(s.rho.load(), d);
      EXPECT_TRUE(s.feasible);
      EXPECT_TRUE(IsFeasible(p, s.v, s.rho));
    }
  }
}

}  // namespace
}  // namespace dccool
