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

// Rounding heuristics for the binary placement problem.
//
//  * SimpleRounding: the D largest relaxed utilizations become busy.
//  * RunHeuristic (H1 / H2): gradual rounding of the relaxed solution under a
//    surrogate for the extra cooling a candidate needs, one best-improvement
//    swap pass, and restarts on slightly perturbed data.
//  * GeneticAlgorithm: tournament / crossover / swap-mutation search seeded
//    around the simple-rounding answer.
//
// All of them return assignments with load exactly D, scored by the cooling
// LP of the original instance.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "dccool/core.hpp"
#include "dccool/perturb.hpp"
#include "dccool/relaxation.hpp"
#include "dccool/rng.hpp"

namespace dccool {

enum class Variant { kH1, kH2 };

inline const char* VariantName(Variant v) { return v == Variant::kH1 ? "H1" : "H2"; }

// Dominant cooling variable of every server.
struct DominantGroups {
  Vector w;                                // largest entry of each A row
  std::vector<std::size_t> dominant;       // its column (lowest on ties)
  std::vector<std::size_t> variables;      // distinct dominant columns, ascending
  std::vector<std::vector<std::size_t>> groups;  // servers per entry of `variables`

  std::size_t K() const { return groups.size(); }
};

inline DominantGroups ComputeDominantGroups(const ProblemInstance& p) {
  DominantGroups g;
  g.w.assign(p.n, 0.0);
  g.dominant.assign(p.n, 0);
  for (std::size_t l = 0; l < p.n; ++l) {
    const auto row = p.A.row(l);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < p.m; ++j) {
      if (row[j] > row[arg]) arg = j;
    }
    if (!(row[arg] > 0.0)) {
      throw Error(ErrorCode::kZeroRow, "server " + std::to_string(l) + " has no cooling");
    }
    g.w[l] = row[arg];
    g.dominant[l] = arg;
  }
  std::vector<std::vector<std::size_t>> by_var(p.m);
  for (std::size_t l = 0; l < p.n; ++l) by_var[g.dominant[l]].push_back(l);
  for (std::size_t j = 0; j < p.m; ++j) {
    if (by_var[j].empty()) continue;
    g.variables.push_back(j);
    g.groups.push_back(std::move(by_var[j]));
  }
  return g;
}

// Surrogate costs measured against a fixed cooling vector v*. The bracket of
// server l is (B' rho)_l - (A_l v* + b - E_l), the red-line excess when the
// cooling stays at v*.
class RoundingCost {
 public:
  RoundingCost(const ProblemInstance& p, std::span<const double> v_star, Variant variant)
      : p_(&p), variant_(variant), groups_(ComputeDominantGroups(p)), base_(p.n) {
    if (v_star.size() != p.m) throw Error(ErrorCode::kDimensionMismatch, "v* must have m entries");
    for (std::size_t l = 0; l < p.n; ++l) {
      double s = p.t_idle - p.E[l];
      const auto arow = p.A.row(l);
      for (std::size_t j = 0; j < p.m; ++j) s += arow[j] * v_star[j];
      base_[l] = s;
    }
  }

  Variant variant() const { return variant_; }
  const DominantGroups& groups() const { return groups_; }

  // B' rho.
  Vector Heat(std::span<const double> rho) const {
    const ProblemInstance& p = *p_;
    Vector h(p.n);
    const double a = p.red_line_gap();
    for (std::size_t l = 0; l < p.n; ++l) {
      const auto brow = p.B.row(l);
      double s = a * rho[l];
      for (std::size_t i = 0; i < p.n; ++i) s += brow[i] * rho[i];
      h[l] = s;
    }
    return h;
  }

  double Bracket(std::size_t l, double heat) const { return heat - base_[l]; }

  // max_l bracket_l / w_l (no positive part).
  double H1FromHeat(std::span<const double> heat) const {
    double best = -kInf;
    for (std::size_t l = 0; l < heat.size(); ++l) {
      best = std::max(best, Bracket(l, heat[l]) / groups_.w[l]);
    }
    return best;
  }

  // sum_k max_{l in S_k} bracket_l^+ / w_l.
  double H2FromHeat(std::span<const double> heat) const {
    double total = 0.0;
    for (const auto& group : groups_.groups) {
      double worst = 0.0;
      for (std::size_t l : group) {
        worst = std::max(worst, std::max(0.0, Bracket(l, heat[l])) / groups_.w[l]);
      }
      total += worst;
    }
    return total;
  }

  // sum_l bracket_l^+ / w_l, the H1 swap tie-breaker.
  double WeightedViolationFromHeat(std::span<const double> heat) const {
    double total = 0.0;
    for (std::size_t l = 0; l < heat.size(); ++l) {
      total += std::max(0.0, Bracket(l, heat[l])) / groups_.w[l];
    }
    return total;
  }

  double FromHeat(std::span<const double> heat) const {
    return variant_ == Variant::kH1 ? H1FromHeat(heat) : H2FromHeat(heat);
  }

  double operator()(std::span<const double> rho) const { return FromHeat(Heat(rho)); }

 private:
  const ProblemInstance* p_;
  Variant variant_;
  DominantGroups groups_;
  Vector base_;
};

inline double H1Cost(const ProblemInstance& p, std::span<const double> rho,
                     std::span<const double> v_star) {
  RoundingCost c(p, v_star, Variant::kH1);
  return c(rho);
}

inline double H2Cost(const ProblemInstance& p, std::span<const double> rho,
                     std::span<const double> v_star) {
  RoundingCost c(p, v_star, Variant::kH2);
  return c(rho);
}

// Tolerance under which two surrogate costs count as tied.
inline bool CostTied(double a, double b) {
  return std::abs(a - b) <= 1e-12 * (1.0 + std::max(std::abs(a), std::abs(b)));
}

struct RoundingTrace {
  std::size_t outer_iterations = 0;
  // Mass after every candidate redistribution and every committed step.
  std::vector<double> masses;
};

namespace heuristics_detail {

// Adds r to the servers in `support` in proportion to their current load.
inline void SpreadProportionally(Vector& rho, const std::vector<std::size_t>& support, double r) {
  double total = 0.0;
  for (std::size_t j : support) total += rho[j];
  if (support.empty() || r == 0.0) return;
  if (total <= 0.0) {
    for (std::size_t j : support) rho[j] += r / static_cast<double>(support.size());
    return;
  }
  const double factor = r / total;
  for (std::size_t j : support) rho[j] += rho[j] * factor;
}

}  // namespace heuristics_detail

// Idles server `i` of `support` and redistributes its load: first in
// proportion to the remaining loads, then repeatedly clamping any load above
// one and spreading the excess over the still-unclamped servers.
inline Vector RedistributeWithout(const Vector& rho, const std::vector<std::size_t>& support,
                                  std::size_t i) {
  Vector out = rho;
  std::vector<std::size_t> rest;
  rest.reserve(support.size());
  for (std::size_t j : support) {
    if (j != i) rest.push_back(j);
  }
  const double r = out[i];
  out[i] = 0.0;
  heuristics_detail::SpreadProportionally(out, rest, r);
  for (;;) {
    auto over = std::find_if(rest.begin(), rest.end(), [&](std::size_t k) { return out[k] > 1.0; });
    if (over == rest.end()) break;
    const std::size_t k = *over;
    const double excess = out[k] - 1.0;
    out[k] = 1.0;
    rest.erase(over);
    heuristics_detail::SpreadProportionally(out, rest, excess);
  }
  return out;
}

// Greedy rounding of a relaxed solution with total load D: repeatedly idles
// the support server whose removal (with redistribution) minimizes
// `cost_fn`, lowest index on ties, until D servers remain.
inline Assignment GradualRounding(const ProblemInstance& p, std::span<const double> rho_star,
                                  const std::function<double(std::span<const double>)>& cost_fn,
                                  RoundingTrace* trace = nullptr) {
  if (rho_star.size() != p.n) throw Error(ErrorCode::kDimensionMismatch, "rho* must have n entries");
  const double demand = static_cast<double>(p.demand);
  Vector rho(rho_star.begin(), rho_star.end());
  for (double& r : rho) r = r <= 1e-9 ? 0.0 : std::min(r, 1.0);
  if (p.demand == 0) return Assignment(p.n);

  std::vector<std::size_t> support;
  double mass = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    if (rho[i] > 0.0) support.push_back(i);
    mass += rho[i];
  }
  if (std::abs(mass - demand) > 1e-6 * (1.0 + demand) || support.size() < p.demand) {
    throw Error(ErrorCode::kPreconditionViolated, "relaxed load must equal the demand");
  }
  const auto check_mass = [&](const Vector& r) {
    const double s = std::accumulate(r.begin(), r.end(), 0.0);
    if (trace) trace->masses.push_back(s);
    if (std::abs(s - mass) > 1e-9) {
      throw Error(ErrorCode::kMassLoss, "redistribution changed the total load");
    }
  };

  while (support.size() > p.demand) {
    double best_cost = kInf;
    std::size_t best_pos = support.size();
    Vector best_rho;
    for (std::size_t pos = 0; pos < support.size(); ++pos) {
      Vector cand = RedistributeWithout(rho, support, support[pos]);
      check_mass(cand);
      const double x = cost_fn(cand);
      if (best_pos == support.size() || (x < best_cost && !CostTied(x, best_cost))) {
        best_cost = x;
        best_pos = pos;
        best_rho = std::move(cand);
      }
    }
    support.erase(support.begin() + static_cast<std::ptrdiff_t>(best_pos));
    rho = std::move(best_rho);
    check_mass(rho);
    if (trace) ++trace->outer_iterations;
  }
  return Assignment::FromIndices(p.n, support);
}

// One best-improvement pass over all (busy, idle) swaps under the variant's
// surrogate cost at v*. H1 ties on the best cost are resolved by the smaller
// weighted violation sum; remaining ties by the lowest (busy, idle) pair.
inline Assignment SwapRefinement(const ProblemInstance& p, const Assignment& rho_hat,
                                 std::span<const double> v_star, Variant variant) {
  const RoundingCost cost(p, v_star, variant);
  const Vector rho = rho_hat.as_vector();
  const Vector heat = cost.Heat(rho);
  const double current = cost.FromHeat(heat);

  const std::vector<std::size_t> busy = rho_hat.busy_indices();
  std::vector<std::size_t> idle;
  for (std::size_t i = 0; i < p.n; ++i) {
    if (!rho_hat[i]) idle.push_back(i);
  }
  const double a = p.red_line_gap();
  Vector swapped(p.n);
  bool found = false;
  double best_cost = kInf;
  double best_tie = kInf;
  std::size_t best_out = 0, best_in = 0;
  for (std::size_t out : busy) {
    for (std::size_t in : idle) {
      for (std::size_t l = 0; l < p.n; ++l) {
        swapped[l] = heat[l] - p.B(l, out) + p.B(l, in);
      }
      swapped[out] -= a;
      swapped[in] += a;
      const double c = cost.FromHeat(swapped);
      if (!(c < current) || CostTied(c, current)) continue;
      const double tie =
          variant == Variant::kH1 ? cost.WeightedViolationFromHeat(swapped) : 0.0;
      bool better = !found || (c < best_cost && !CostTied(c, best_cost));
      if (!better && found && CostTied(c, best_cost) && variant == Variant::kH1) {
        better = tie < best_tie && !CostTied(tie, best_tie);
      }
      if (better) {
        found = true;
        best_cost = c;
        best_tie = tie;
        best_out = out;
        best_in = in;
      }
    }
  }
  Assignment result = rho_hat;
  if (found) {
    result.set(best_out, false);
    result.set(best_in, true);
  }
  return result;
}

// Scores `rho` on `p`, throwing Infeasible when no cooling vector exists.
inline Solution SolutionFor(const ProblemInstance& p, const Assignment& rho) {
  auto cool = OptimalCoolingFor(p, rho);
  if (!cool) throw Error(ErrorCode::kInfeasible, "assignment cannot be cooled within bounds");
  return MakeSolution(p, rho, std::move(cool->v));
}

inline Assignment ForcedAssignment(const ProblemInstance& p) {
  Assignment a(p.n);
  if (p.demand == p.n) {
    for (std::size_t i = 0; i < p.n; ++i) a.set(i, true);
  }
  return a;
}

// The D largest entries; values equal up to 1e-9 tie, lowest index first.
inline Assignment RoundLargest(std::span<const double> rho, std::size_t demand) {
  std::vector<std::size_t> order(rho.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<long long> key(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) key[i] = std::llround(rho[i] * 1e9);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return key[x] > key[y]; });
  order.resize(demand);
  return Assignment::FromIndices(rho.size(), order);
}

inline Solution SimpleRounding(const ProblemInstance& p) {
  if (p.demand == 0 || p.demand == p.n) return SolutionFor(p, ForcedAssignment(p));
  const RelaxationResult relax = SolveRelaxation(p);
  return SolutionFor(p, RoundLargest(relax.rho, p.demand));
}

struct HeuristicOptions {
  // Restart count; 0 means min(5, D, n - D).
  std::size_t rounds = 0;
  double perturb_lo = 0.98;
  double perturb_hi = 1.02;
};

// Gradual rounding plus one swap pass on `q`, starting from its relaxation.
inline std::optional<Assignment> RoundOnce(const ProblemInstance& q, Variant variant) {
  auto relax = SolveRelaxationWith(q, RedLines::Two(q));
  if (!relax) return std::nullopt;
  const RoundingCost cost(q, relax->v, variant);
  const Assignment rounded =
      GradualRounding(q, relax->rho, [&](std::span<const double> r) { return cost(r); });
  return SwapRefinement(q, rounded, relax->v, variant);
}

inline Solution RunHeuristic(const ProblemInstance& p, Variant variant, std::uint64_t seed,
                             const HeuristicOptions& opt = {}) {
  if (p.demand == 0 || p.demand == p.n) return SolutionFor(p, ForcedAssignment(p));
  const std::size_t rounds =
      opt.rounds > 0 ? opt.rounds : std::min<std::size_t>({5, p.demand, p.n - p.demand});
  std::optional<Solution> best;
  for (std::size_t r = 0; r < rounds; ++r) {
    const ProblemInstance q =
        r == 0 ? p : Perturb(p, opt.perturb_lo, opt.perturb_hi, DeriveSeed(seed, {r}));
    const auto rho = RoundOnce(q, variant);
    if (!rho) continue;
    auto cool = OptimalCoolingFor(p, *rho);
    if (!cool) continue;
    if (!best || (cool->cost < best->cost && !CostTied(cool->cost, best->cost))) {
      best = MakeSolution(p, *rho, std::move(cool->v));
    }
  }
  if (!best) throw Error(ErrorCode::kInfeasible, "no candidate assignment could be cooled");
  return *std::move(best);
}

struct GaParams {
  // 0 selects the defaults 5 min(D, n-D) and 10 min(D, n-D).
  std::size_t population_size = 0;
  std::optional<std::size_t> iterations;
  std::uint64_t seed = 0;
};

namespace ga_detail {

class Fitness {
 public:
  explicit Fitness(const ProblemInstance& p) : p_(&p) {}

  double operator()(const Assignment& a) {
    auto it = cache_.find(a.bits());
    if (it != cache_.end()) return it->second;
    auto cool = OptimalCoolingFor(*p_, a);
    const double f = cool ? cool->cost : kInf;
    cache_.emplace(a.bits(), f);
    return f;
  }

 private:
  const ProblemInstance* p_;
  std::map<std::vector<std::uint8_t>, double> cache_;
};

inline std::vector<std::size_t> Positions(const Assignment& a, bool value) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == value) out.push_back(i);
  }
  return out;
}

// Swaps k random busy servers with k random idle ones.
inline Assignment Scramble(const Assignment& a, std::size_t k, Rng& rng) {
  Assignment out = a;
  for (std::size_t i : rng.sample(Positions(a, true), k)) out.set(i, false);
  for (std::size_t i : rng.sample(Positions(a, false), k)) out.set(i, true);
  return out;
}

}  // namespace ga_detail

// Child keeps the positions where both parents agree; of the R remaining
// ones, round(R f2 / (f1 + f2)) come from parent 1's exclusive ones and the rest
// from parent 2's.
inline Assignment Crossover(const Assignment& p1, double f1, const Assignment& p2, double f2,
                            Rng& rng) {
  const std::size_t n = p1.size();
  Assignment child(n);
  std::vector<std::size_t> only1, only2;
  for (std::size_t i = 0; i < n; ++i) {
    if (p1[i] && p2[i]) child.set(i, true);
    if (p1[i] && !p2[i]) only1.push_back(i);
    if (!p1[i] && p2[i]) only2.push_back(i);
  }
  const std::size_t remaining = only1.size();
  if (remaining == 0 && only2.empty()) return child;
  double share = 0.5;
  if (std::isfinite(f1) && std::isfinite(f2)) {
    if (f1 + f2 > 0.0) share = f2 / (f1 + f2);
  } else if (!std::isfinite(f1) && std::isfinite(f2)) {
    share = 0.0;
  } else if (std::isfinite(f1) && !std::isfinite(f2)) {
    share = 1.0;
  }
  const std::size_t from1 =
      std::min(remaining, static_cast<std::size_t>(std::llround(share * static_cast<double>(remaining))));
  const std::size_t from2 = std::min(only2.size(), remaining - from1);
  for (std::size_t i : rng.sample(only1, from1)) child.set(i, true);
  for (std::size_t i : rng.sample(only2, from2)) child.set(i, true);
  // Parents always have equal load, so this only runs for mismatched inputs.
  const std::size_t target = p1.load();
  if (child.load() < target) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < n; ++i) {
      if ((p1[i] || p2[i]) && !child[i]) pool.push_back(i);
    }
    for (std::size_t i : rng.sample(pool, std::min(pool.size(), target - child.load()))) {
      child.set(i, true);
    }
  }
  return child;
}

// Swaps one random busy server with one random idle server.
inline Assignment Mutate(const Assignment& a, Rng& rng) {
  const auto ones = ga_detail::Positions(a, true);
  const auto zeros = ga_detail::Positions(a, false);
  if (ones.empty() || zeros.empty()) return a;
  Assignment out = a;
  out.set(ones[rng.below(ones.size())], false);
  out.set(zeros[rng.below(zeros.size())], true);
  return out;
}

inline Solution GeneticAlgorithm(const ProblemInstance& p, const GaParams& params) {
  if (p.demand == 0 || p.demand == p.n) return SolutionFor(p, ForcedAssignment(p));
  const std::size_t minority = std::min(p.demand, p.n - p.demand);
  const std::size_t pop_size =
      params.population_size > 0 ? params.population_size : 5 * minority;
  const std::size_t iterations = params.iterations.value_or(10 * minority);
  if (pop_size < 2) throw Error(ErrorCode::kPreconditionViolated, "population_size must be >= 2");

  Rng rng(params.seed);
  ga_detail::Fitness fitness(p);
  const Solution sr = SimpleRounding(p);
  const std::size_t flips = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(minority)));

  std::vector<Assignment> pop;
  std::vector<double> cost;
  pop.reserve(pop_size);
  pop.push_back(sr.rho);
  cost.push_back(fitness(sr.rho));
  while (pop.size() < pop_size) {
    pop.push_back(ga_detail::Scramble(sr.rho, flips, rng));
    cost.push_back(fitness(pop.back()));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (cost[i] < cost[best]) best = i;
  }
  Assignment best_rho = pop[best];
  double best_cost = cost[best];

  const auto tournament = [&]() {
    const std::size_t x = rng.below(pop.size());
    std::size_t y = rng.below(pop.size() - 1);
    if (y >= x) ++y;
    return cost[y] < cost[x] ? y : x;
  };
  std::vector<std::size_t> rank(pop.size());
  for (std::size_t it = 0; it < iterations; ++it) {
    const std::size_t a = tournament();
    const std::size_t b = tournament();
    Assignment child = Mutate(Crossover(pop[a], cost[a], pop[b], cost[b], rng), rng);
    const double fc = fitness(child);

    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t x, std::size_t y) { return cost[x] < cost[y]; });
    const std::size_t half = rank.size() / 2;
    const std::size_t victim = rank[half + rng.below(rank.size() - half)];
    if (fc < cost[victim]) {
      pop[victim] = child;
      cost[victim] = fc;
    }
    if (fc < best_cost) {
      best_cost = fc;
      best_rho = child;
    }
  }
  return SolutionFor(p, best_rho);
}

}  // namespace dccool
