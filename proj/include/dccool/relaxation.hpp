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

// The two linear programs built on a ProblemInstance:
//
//  * the LP relaxation (rho in [0,1]^n, sum rho = D, temperature rows,
//    cooling bounds), and
//  * the cooling-only LP for a fixed rho, whose optimum defines cost(rho),
//    the canonical cost of an assignment.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dccool/core.hpp"
#include "dccool/lp.hpp"

namespace dccool {

// Red-line structure used by a formulation: a server with load rho must keep
// inlet + gap * rho <= top. The two-red-line model uses gap = t_idle - t_busy
// and top = t_idle; the single red-line model uses gap = 0 and top = t_busy.
struct RedLines {
  double gap = 0.0;
  double top = 0.0;

  static RedLines Two(const ProblemInstance& p) { return {p.red_line_gap(), p.t_idle}; }
  static RedLines Single(const ProblemInstance& p) { return {0.0, p.t_busy}; }
};

struct CoolingResult {
  CoolingVector v;
  double cost = 0.0;
};

// Required cooling effort per server at load rho: (B rho + gap rho + E - top)_l,
// i.e. the amount A_l . v must cover.
inline Vector CoolingRequirement(const ProblemInstance& p, std::span<const double> rho,
                                 const RedLines& lines) {
  Vector r(p.n);
  for (std::size_t l = 0; l < p.n; ++l) {
    double s = p.E[l] - lines.top + lines.gap * rho[l];
    const auto brow = p.B.row(l);
    for (std::size_t i = 0; i < p.n; ++i) s += brow[i] * rho[i];
    r[l] = s;
  }
  return r;
}

// Cheapest cooling vector covering a requirement vector:
//   min c . v  s.t.  A v >= req,  v_lb <= v <= v_ub.
// Rows already met at v_lb stay met for every admissible v (A >= 0), so only
// the remaining rows enter the solve; when each of those has one positive
// entry the problem separates per variable and is solved in closed form.
inline std::optional<CoolingResult> CoolingForRequirement(const ProblemInstance& p,
                                                          std::span<const double> req) {
  const double tol = kFeasibilityTol * 1e-2;
  std::vector<std::size_t> active;
  bool separable = true;
  for (std::size_t l = 0; l < p.n; ++l) {
    const auto arow = p.A.row(l);
    double at_lb = 0.0;
    int nonzero = 0;
    for (std::size_t j = 0; j < p.m; ++j) {
      at_lb += arow[j] * p.v_lb[j];
      if (arow[j] > 0.0) ++nonzero;
    }
    if (req[l] <= at_lb + tol * (1.0 + std::abs(req[l]))) continue;
    if (nonzero == 0) return std::nullopt;
    if (nonzero > 1) separable = false;
    active.push_back(l);
  }

  CoolingResult out;
  out.v = p.v_lb;
  if (separable) {
    for (std::size_t l : active) {
      const auto arow = p.A.row(l);
      for (std::size_t j = 0; j < p.m; ++j) {
        if (arow[j] > 0.0) out.v[j] = std::max(out.v[j], req[l] / arow[j]);
      }
    }
  } else {
    LinearProgram lp(p.m);
    lp.objective = p.cost_coeffs;
    lp.lower = p.v_lb;
    lp.upper = p.v_ub;
    for (std::size_t l : active) {
      const auto arow = p.A.row(l);
      lp.add(Vector(arow.begin(), arow.end()), Sense::kGreaterEqual, req[l]);
    }
    const LpResult res = SolveLp(lp);
    if (res.status != LpStatus::kOptimal) return std::nullopt;
    out.v = res.x;
  }
  for (std::size_t j = 0; j < p.m; ++j) {
    if (out.v[j] > p.v_ub[j]) {
      if (out.v[j] > p.v_ub[j] + kFeasibilityTol * (1.0 + std::abs(p.v_ub[j]))) {
        return std::nullopt;
      }
      out.v[j] = p.v_ub[j];
    }
  }
  out.cost = CoolingCost(p, out.v);
  return out;
}

inline std::optional<CoolingResult> OptimalCoolingFor(const ProblemInstance& p,
                                                      std::span<const double> rho,
                                                      const RedLines& lines) {
  if (rho.size() != p.n) throw Error(ErrorCode::kDimensionMismatch, "rho must have n entries");
  const Vector req = CoolingRequirement(p, rho, lines);
  return CoolingForRequirement(p, req);
}

// cost(rho) for a binary assignment. nullopt when no admissible v exists.
inline std::optional<CoolingResult> OptimalCoolingFor(const ProblemInstance& p,
                                                      const Assignment& rho) {
  const Vector r = rho.as_vector();
  return OptimalCoolingFor(p, r, RedLines::Two(p));
}

struct RelaxationResult {
  FractionalAssignment rho;
  CoolingVector v;
  double cost = 0.0;
  std::size_t iterations = 0;
};

struct RelaxationOptions {
  // Per-server bounds on rho (branch-and-bound fixings). Empty means [0,1].
  Vector rho_lower;
  Vector rho_upper;
  // After the cost-optimal solve, pick the optimal solution that minimizes
  // the largest utilization (see SolveRelaxation).
  bool center = true;
};

namespace relaxation_detail {

// Variables: rho_0..rho_{n-1}, v_0..v_{m-1}.
inline LinearProgram BuildRelaxationLp(const ProblemInstance& p, const RedLines& lines,
                                       const RelaxationOptions& opt) {
  const std::size_t n = p.n;
  const std::size_t m = p.m;
  LinearProgram lp(n + m);
  for (std::size_t j = 0; j < m; ++j) {
    lp.objective[n + j] = p.cost_coeffs[j];
    lp.lower[n + j] = p.v_lb[j];
    lp.upper[n + j] = p.v_ub[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    lp.lower[i] = opt.rho_lower.empty() ? 0.0 : opt.rho_lower[i];
    lp.upper[i] = opt.rho_upper.empty() ? 1.0 : opt.rho_upper[i];
  }
  for (std::size_t l = 0; l < n; ++l) {
    Vector row(n + m, 0.0);
    const auto brow = p.B.row(l);
    for (std::size_t i = 0; i < n; ++i) row[i] = brow[i];
    row[l] += lines.gap;
    const auto arow = p.A.row(l);
    for (std::size_t j = 0; j < m; ++j) row[n + j] = -arow[j];
    lp.add(std::move(row), Sense::kLessEqual, lines.top - p.E[l]);
  }
  Vector mass(n + m, 0.0);
  std::fill(mass.begin(), mass.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
  lp.add(std::move(mass), Sense::kEqual, static_cast<double>(p.demand));
  return lp;
}

}  // namespace relaxation_detail

// Solves the LP relaxation with red lines `lines`.
//
// With opt.center set, a second LP is solved over the cost-optimal face:
// minimize t subject to rho_i <= t and c . v <= optimum, followed by the
// cheapest cooling for the resulting rho. This selects the optimal solution
// that spreads load most evenly (on symmetric instances the uniform
// distribution rather than an arbitrary vertex of the optimal face), so the
// fractional starting point for rounding is a deterministic, geometry-driven
// choice. Returns nullopt when the relaxation is infeasible.
inline std::optional<RelaxationResult> SolveRelaxationWith(const ProblemInstance& p,
                                                           const RedLines& lines,
                                                           const RelaxationOptions& opt = {}) {
  const std::size_t n = p.n;
  const std::size_t m = p.m;
  LinearProgram lp = relaxation_detail::BuildRelaxationLp(p, lines, opt);
  const LpResult base = SolveLp(lp);
  if (base.status == LpStatus::kUnbounded) {
    throw Error(ErrorCode::kNumericalFailure, "relaxation reported unbounded");
  }
  if (base.status != LpStatus::kOptimal) return std::nullopt;

  RelaxationResult out;
  out.iterations = base.iterations;
  out.rho.assign(base.x.begin(), base.x.begin() + static_cast<std::ptrdiff_t>(n));
  out.v.assign(base.x.begin() + static_cast<std::ptrdiff_t>(n), base.x.end());
  out.cost = CoolingCost(p, out.v);

  if (opt.center && n > 0) {
    // Append the spread variable t.
    LinearProgram spread(n + m + 1);
    spread.lower = lp.lower;
    spread.upper = lp.upper;
    spread.lower.push_back(0.0);
    spread.upper.push_back(1.0);
    spread.objective.assign(n + m + 1, 0.0);
    spread.objective[n + m] = 1.0;
    for (auto c : lp.constraints) {
      c.row.push_back(0.0);
      spread.constraints.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (spread.lower[i] == spread.upper[i]) continue;
      Vector row(n + m + 1, 0.0);
      row[i] = 1.0;
      row[n + m] = -1.0;
      spread.add(std::move(row), Sense::kLessEqual, 0.0);
    }
    Vector budget(n + m + 1, 0.0);
    for (std::size_t j = 0; j < m; ++j) budget[n + j] = p.cost_coeffs[j];
    spread.add(std::move(budget), Sense::kLessEqual,
               base.objective_value + 1e-11 * (1.0 + std::abs(base.objective_value)));
    const LpResult centered = SolveLp(spread);
    if (centered.status == LpStatus::kOptimal) {
      Vector rho(centered.x.begin(), centered.x.begin() + static_cast<std::ptrdiff_t>(n));
      for (double& r : rho) r = std::clamp(r, 0.0, 1.0);
      auto cool = OptimalCoolingFor(p, rho, lines);
      if (cool && cool->cost <= out.cost + 1e-10 * (1.0 + std::abs(out.cost))) {
        out.rho = std::move(rho);
        out.v = std::move(cool->v);
        out.cost = cool->cost;
      }
      out.iterations += centered.iterations;
    }
  }
  return out;
}

// LP relaxation of the two-red-line problem. Throws Infeasible.
inline RelaxationResult SolveRelaxation(const ProblemInstance& p,
                                        const RelaxationOptions& opt = {}) {
  auto r = SolveRelaxationWith(p, RedLines::Two(p), opt);
  if (!r) throw Error(ErrorCode::kInfeasible, "LP relaxation is infeasible");
  return *std::move(r);
}

}  // namespace dccool
