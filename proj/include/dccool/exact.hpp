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

// Ground-truth solvers for the binary placement problem.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "dccool/core.hpp"
#include "dccool/heuristics.hpp"
#include "dccool/relaxation.hpp"

namespace dccool {

inline double BinomialCount(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(c);
}

inline constexpr double kEnumerationLimit = 2e6;

namespace exact_detail {

// Visits every D-subset of {0..n-1} in lexicographic order while keeping
// heat = B' rho current. `leaf` receives (chosen indices, heat).
template <typename Leaf>
void ForEachSubset(const ProblemInstance& p, Leaf&& leaf) {
  const std::size_t n = p.n;
  const std::size_t d = p.demand;
  const double a = p.red_line_gap();
  std::vector<std::size_t> chosen;
  chosen.reserve(d);
  Vector heat(n, 0.0);
  // Column i of B' applied with sign s.
  const auto apply = [&](std::size_t i, double s) {
    for (std::size_t l = 0; l < n; ++l) heat[l] += s * p.B(l, i);
    heat[i] += s * a;
  };
  const auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (chosen.size() == d) {
      leaf(chosen, heat);
      return;
    }
    const std::size_t need = d - chosen.size();
    for (std::size_t i = start; i + need <= n; ++i) {
      chosen.push_back(i);
      apply(i, 1.0);
      self(self, i + 1);
      apply(i, -1.0);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0);
}

}  // namespace exact_detail

// Evaluates cost(rho) for every load-D assignment. Ties keep the first
// subset in lexicographic order of busy indices.
inline Solution EnumerateExact(const ProblemInstance& p) {
  if (BinomialCount(p.n, p.demand) > kEnumerationLimit) {
    throw Error(ErrorCode::kTooLarge, "C(n, D) exceeds the enumeration limit");
  }
  std::optional<std::vector<std::size_t>> best;
  double best_cost = kInf;
  Vector req(p.n);
  exact_detail::ForEachSubset(p, [&](const std::vector<std::size_t>& chosen, const Vector& heat) {
    for (std::size_t l = 0; l < p.n; ++l) req[l] = heat[l] + p.E[l] - p.t_idle;
    auto cool = CoolingForRequirement(p, req);
    if (!cool) return;
    if (!best || (cool->cost < best_cost && !CostTied(cool->cost, best_cost))) {
      best = chosen;
      best_cost = cool->cost;
    }
  });
  if (!best) throw Error(ErrorCode::kInfeasible, "no load-D assignment can be cooled");
  return SolutionFor(p, Assignment::FromIndices(p.n, *best));
}

struct BnbNodeInfo {
  double bound = 0.0;
  std::size_t depth = 0;
  const Vector& lo;  // rho fixings of the node
  const Vector& hi;
};

struct BnbOptions {
  // Stop after this many node LPs; the result is then not proven optimal.
  std::optional<std::size_t> node_budget;
  // Prune when bound >= incumbent - prune_tol.
  double prune_tol = 1e-9;
  // Called for every feasible node LP.
  std::function<void(const BnbNodeInfo&)> on_node;
};

struct BnbResult {
  Solution solution;
  std::size_t nodes = 0;
  bool proven = false;
  double root_bound = 0.0;
};

// Best-first LP-bound branch and bound over rho, branching on the most
// fractional utilization (lowest index on ties).
inline BnbResult BranchAndBound(const ProblemInstance& p, const BnbOptions& opt = {}) {
  const std::size_t n = p.n;
  struct Node {
    Vector lo, hi;
    double bound = 0.0;
    std::size_t id = 0;
    std::size_t depth = 0;
    FractionalAssignment rho;
  };
  struct Worse {
    bool operator()(const Node& x, const Node& y) const {
      if (x.bound != y.bound) return x.bound > y.bound;
      return x.id > y.id;
    }
  };

  BnbResult out;
  std::optional<Assignment> incumbent;
  double incumbent_cost = kInf;
  std::size_t next_id = 0;

  const auto offer = [&](const Assignment& a) {
    if (a.load() != p.demand) return;
    auto cool = OptimalCoolingFor(p, a);
    if (cool && (!incumbent || (cool->cost < incumbent_cost && !CostTied(cool->cost, incumbent_cost)))) {
      incumbent = a;
      incumbent_cost = cool->cost;
    }
  };

  // Solves the node LP; returns nullopt when the node is infeasible.
  const auto evaluate = [&](Vector lo, Vector hi, std::size_t depth) -> std::optional<Node> {
    RelaxationOptions ro;
    ro.rho_lower = std::move(lo);
    ro.rho_upper = std::move(hi);
    ro.center = false;
    auto relax = SolveRelaxationWith(p, RedLines::Two(p), ro);
    ++out.nodes;
    if (!relax) return std::nullopt;
    if (opt.on_node) opt.on_node({relax->cost, depth, ro.rho_lower, ro.rho_upper});
    Node node{std::move(ro.rho_lower), std::move(ro.rho_upper), relax->cost, next_id++, depth,
              std::move(relax->rho)};
    return node;
  };

  auto root = evaluate(Vector(n, 0.0), Vector(n, 1.0), 0);
  if (!root) throw Error(ErrorCode::kInfeasible, "LP relaxation is infeasible");
  out.root_bound = root->bound;

  std::priority_queue<Node, std::vector<Node>, Worse> open;
  open.push(std::move(*root));
  bool exhausted = false;
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (incumbent && node.bound >= incumbent_cost - opt.prune_tol) continue;

    std::size_t branch = n;
    double best_frac = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = node.rho[i];
      if (f <= 1e-9 || f >= 1.0 - 1e-9) continue;
      const double score = std::abs(f - 0.5);
      if (score < best_frac) {
        best_frac = score;
        branch = i;
      }
    }
    if (branch == n) {
      Assignment a(n);
      for (std::size_t i = 0; i < n; ++i) a.set(i, node.rho[i] > 0.5);
      offer(a);
      continue;
    }
    offer(RoundLargest(node.rho, p.demand));

    for (int side = 1; side >= 0; --side) {
      if (opt.node_budget && out.nodes >= *opt.node_budget) {
        exhausted = true;
        break;
      }
      Vector lo = node.lo, hi = node.hi;
      lo[branch] = hi[branch] = side;
      auto child = evaluate(std::move(lo), std::move(hi), node.depth + 1);
      if (!child) continue;
      if (incumbent && child->bound >= incumbent_cost - opt.prune_tol) continue;
      bool integral = true;
      for (double f : child->rho) {
        if (f > 1e-9 && f < 1.0 - 1e-9) {
          integral = false;
          break;
        }
      }
      if (integral) {
        Assignment a(n);
        for (std::size_t i = 0; i < n; ++i) a.set(i, child->rho[i] > 0.5);
        offer(a);
      } else {
        open.push(std::move(*child));
      }
    }
    if (exhausted) break;
  }
  if (!incumbent) {
    if (exhausted) throw Error(ErrorCode::kBudgetExceeded, "node budget exhausted without incumbent");
    throw Error(ErrorCode::kInfeasible, "no load-D assignment can be cooled");
  }
  out.proven = !exhausted;
  out.solution = SolutionFor(p, *incumbent);
  return out;
}

struct MaxMinResult {
  Assignment rho;
  double value = 0.0;  // max_l (B' rho)_l
};

// min over load-D binary rho of max(B' rho), B' = B + a I, by enumeration
// with monotone pruning (adding servers never lowers the maximum).
inline MaxMinResult ExactSpecialMaxMin(const Matrix& B, double a, std::size_t demand) {
  const std::size_t n = B.rows();
  if (B.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  if (demand > n) throw Error(ErrorCode::kPreconditionViolated, "demand exceeds n");
  if (n > 25) throw Error(ErrorCode::kTooLarge, "special-case enumeration limited to n <= 25");

  std::vector<std::size_t> chosen, best;
  bool found = false;
  double best_value = kInf;
  Vector heat(n, 0.0);
  const auto apply = [&](std::size_t i, double s) {
    for (std::size_t l = 0; l < n; ++l) heat[l] += s * B(l, i);
    heat[i] += s * a;
  };
  const auto recurse = [&](auto&& self, std::size_t start) -> void {
    const double cur = heat.empty() ? 0.0 : *std::max_element(heat.begin(), heat.end());
    if (chosen.size() == demand) {
      if (!found || (cur < best_value && !CostTied(cur, best_value))) {
        found = true;
        best_value = cur;
        best = chosen;
      }
      return;
    }
    if (found && cur >= best_value) return;
    const std::size_t need = demand - chosen.size();
    for (std::size_t i = start; i + need <= n; ++i) {
      chosen.push_back(i);
      apply(i, 1.0);
      self(self, i + 1);
      apply(i, -1.0);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0);
  MaxMinResult r;
  r.rho = Assignment::FromIndices(n, best);
  r.value = best_value;
  return r;
}

}  // namespace dccool
