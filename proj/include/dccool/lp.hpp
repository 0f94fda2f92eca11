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

// Dense two-phase tableau simplex for small linear programs.
//
// Every variable is mapped to a nonnegative standard-form column (shifted by
// a finite bound, reflected, or split when free), finite upper bounds become
// explicit rows, and each row gets a slack and/or artificial column. Both
// phases use Bland's rule (lowest-index entering column, lowest-index basic
// variable among ratio ties), so the solver cannot cycle and the returned
// vertex is a deterministic function of the input.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "dccool/core.hpp"

namespace dccool {

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct LinearConstraint {
  Vector row;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// min objective . x  subject to constraints and lower <= x <= upper.
struct LinearProgram {
  Vector objective;
  std::vector<LinearConstraint> constraints;
  Vector lower;
  Vector upper;

  explicit LinearProgram(std::size_t num_vars = 0)
      : objective(num_vars, 0.0), lower(num_vars, 0.0), upper(num_vars, kInf) {}

  std::size_t num_vars() const { return objective.size(); }

  void add(Vector row, Sense sense, double rhs) {
    constraints.push_back({std::move(row), sense, rhs});
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

inline const char* LpStatusName(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
  }
  return "Unknown";
}

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective_value = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  double pivot_tol = 1e-10;
  double cost_tol = 1e-10;
  // Phase-1 residual above which the problem is declared infeasible.
  double feasibility_tol = 1e-9;
  // Primal re-check applied to every optimal answer.
  double verify_tol = 1e-7;
  std::size_t max_iterations = 200000;
};

namespace lp_detail {

// How an original variable is recovered from standard-form columns.
struct VarMap {
  enum Kind { kShift, kReflect, kSplit } kind = kShift;
  std::size_t col = 0;   // primary column
  std::size_t col2 = 0;  // negative part for kSplit
  double offset = 0.0;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs slot holds -objective.
  double& cost(std::size_t c) { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = cols_ + 1;
    double* prow = &a_[pr * w];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &a_[r * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  // Loads reduced costs for objective `obj` over columns given the basis.
  void price(const Vector& obj) {
    for (std::size_t c = 0; c <= cols_; ++c) cost(c) = c < cols_ ? obj[c] : 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = obj[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) cost(c) -= cb * at(r, c);
    }
  }

  void drop_row(std::size_t r) {
    const std::size_t w = cols_ + 1;
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * w),
             a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

enum class PhaseOutcome { kOptimal, kUnbounded };

// Bland's-rule simplex over columns [0, allowed_cols).
inline PhaseOutcome RunSimplex(Tableau& t, std::size_t allowed_cols, const LpOptions& opt,
                               std::size_t& iterations) {
  for (;;) {
    std::size_t enter = allowed_cols;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      if (t.cost(c) < -opt.cost_tol) {
        enter = c;
        break;
      }
    }
    if (enter == allowed_cols) return PhaseOutcome::kOptimal;

    double best_ratio = kInf;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a > opt.pivot_tol) best_ratio = std::min(best_ratio, std::max(0.0, t.rhs(r)) / a);
    }
    if (best_ratio == kInf) return PhaseOutcome::kUnbounded;
    const double tie = 1e-12 * (1.0 + best_ratio);
    std::size_t leave = t.rows();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= opt.pivot_tol || std::max(0.0, t.rhs(r)) / a > best_ratio + tie) continue;
      if (leave == t.rows() || t.basis()[r] < t.basis()[leave]) leave = r;
    }
    if (++iterations > opt.max_iterations) {
      throw Error(ErrorCode::kNumericalFailure, "simplex iteration limit reached");
    }
    t.pivot(leave, enter);
  }
}

inline bool VerifyPrimal(const LinearProgram& lp, const Vector& x, double tol) {
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const double scale = 1.0 + std::abs(x[j]);
    if (x[j] < lp.lower[j] - tol * scale || x[j] > lp.upper[j] + tol * scale) return false;
  }
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    double mag = std::abs(c.rhs);
    for (std::size_t j = 0; j < x.size(); ++j) {
      lhs += c.row[j] * x[j];
      mag = std::max(mag, std::abs(c.row[j] * x[j]));
    }
    const double slack = tol * (1.0 + mag);
    switch (c.sense) {
      case Sense::kLessEqual:
        if (lhs > c.rhs + slack) return false;
        break;
      case Sense::kGreaterEqual:
        if (lhs < c.rhs - slack) return false;
        break;
      case Sense::kEqual:
        if (std::abs(lhs - c.rhs) > slack) return false;
        break;
    }
  }
  return true;
}

}  // namespace lp_detail

// Solves `lp` to a vertex optimum. Throws NumericalFailure when the returned
// point fails its own primal re-check or pivoting does not terminate.
inline LpResult SolveLp(const LinearProgram& lp, const LpOptions& opt = {}) {
  using lp_detail::VarMap;
  const std::size_t p = lp.num_vars();
  if (lp.lower.size() != p || lp.upper.size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "bound vectors must match objective length");
  }
  for (const auto& c : lp.constraints) {
    if (c.row.size() != p) throw Error(ErrorCode::kDimensionMismatch, "constraint row length");
  }

  LpResult result;
  for (std::size_t j = 0; j < p; ++j) {
    if (lp.lower[j] > lp.upper[j]) return result;  // Infeasible
  }

  // Standard-form columns for the structural variables.
  std::vector<VarMap> maps(p);
  std::size_t ncols = 0;
  struct BoundRow {
    std::size_t col;
    double ub;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < p; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    VarMap& vm = maps[j];
    if (std::isfinite(lo)) {
      vm = {VarMap::kShift, ncols++, 0, lo};
      if (std::isfinite(hi)) bound_rows.push_back({vm.col, hi - lo});
    } else if (std::isfinite(hi)) {
      vm = {VarMap::kReflect, ncols++, 0, hi};
    } else {
      vm.kind = VarMap::kSplit;
      vm.col = ncols++;
      vm.col2 = ncols++;
    }
  }
  const std::size_t nstruct = ncols;

  // Rows in standard form: coefficients over structural columns, rhs, sense.
  struct Row {
    Vector coef;
    Sense sense;
    double rhs;
  };
  std::vector<Row> rows;
  rows.reserve(lp.constraints.size() + bound_rows.size());
  for (const auto& c : lp.constraints) {
    Row r{Vector(nstruct, 0.0), c.sense, c.rhs};
    for (std::size_t j = 0; j < p; ++j) {
      const double a = c.row[j];
      if (a == 0.0) continue;
      const VarMap& vm = maps[j];
      switch (vm.kind) {
        case VarMap::kShift:
          r.coef[vm.col] += a;
          r.rhs -= a * vm.offset;
          break;
        case VarMap::kReflect:
          r.coef[vm.col] -= a;
          r.rhs -= a * vm.offset;
          break;
        case VarMap::kSplit:
          r.coef[vm.col] += a;
          r.coef[vm.col2] -= a;
          break;
      }
    }
    rows.push_back(std::move(r));
  }
  for (const auto& b : bound_rows) {
    Row r{Vector(nstruct, 0.0), Sense::kLessEqual, b.ub};
    r.coef[b.col] = 1.0;
    rows.push_back(std::move(r));
  }
  for (auto& r : rows) {
    if (r.rhs < 0.0) {
      for (double& a : r.coef) a = -a;
      r.rhs = -r.rhs;
      if (r.sense == Sense::kLessEqual) {
        r.sense = Sense::kGreaterEqual;
      } else if (r.sense == Sense::kGreaterEqual) {
        r.sense = Sense::kLessEqual;
      }
    }
  }

  // Column layout: structural | slacks/surpluses | artificials.
  std::size_t nslack = 0;
  std::size_t nart = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::kEqual) ++nslack;
    if (r.sense != Sense::kLessEqual) ++nart;
  }
  const std::size_t art_begin = nstruct + nslack;
  const std::size_t total = art_begin + nart;
  lp_detail::Tableau t(rows.size(), total);
  {
    std::size_t s = nstruct;
    std::size_t a = art_begin;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Row& r = rows[i];
      for (std::size_t c = 0; c < nstruct; ++c) t.at(i, c) = r.coef[c];
      t.rhs(i) = r.rhs;
      switch (r.sense) {
        case Sense::kLessEqual:
          t.at(i, s) = 1.0;
          t.basis()[i] = s++;
          break;
        case Sense::kGreaterEqual:
          t.at(i, s++) = -1.0;
          t.at(i, a) = 1.0;
          t.basis()[i] = a++;
          break;
        case Sense::kEqual:
          t.at(i, a) = 1.0;
          t.basis()[i] = a++;
          break;
      }
    }
  }

  // Phase 1.
  if (nart > 0) {
    Vector phase1(total, 0.0);
    for (std::size_t c = art_begin; c < total; ++c) phase1[c] = 1.0;
    t.price(phase1);
    lp_detail::RunSimplex(t, total, opt, result.iterations);
    double infeas = 0.0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (t.basis()[r] >= art_begin) infeas += std::abs(t.rhs(r));
    }
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
    if (infeas > opt.feasibility_tol * scale) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    // Drive remaining artificials out of the basis; redundant rows go away.
    for (std::size_t r = 0; r < t.rows();) {
      if (t.basis()[r] < art_begin) {
        ++r;
        continue;
      }
      std::size_t col = art_begin;
      for (std::size_t c = 0; c < art_begin; ++c) {
        if (std::abs(t.at(r, c)) > opt.pivot_tol) {
          col = c;
          break;
        }
      }
      if (col == art_begin) {
        t.drop_row(r);
      } else {
        t.pivot(r, col);
        ++r;
      }
    }
  }

  // Phase 2 over structural and slack columns only.
  Vector phase2(total, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const double c = lp.objective[j];
    const VarMap& vm = maps[j];
    switch (vm.kind) {
      case VarMap::kShift: phase2[vm.col] += c; break;
      case VarMap::kReflect: phase2[vm.col] -= c; break;
      case VarMap::kSplit:
        phase2[vm.col] += c;
        phase2[vm.col2] -= c;
        break;
    }
  }
  t.price(phase2);
  if (lp_detail::RunSimplex(t, art_begin, opt, result.iterations) ==
      lp_detail::PhaseOutcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }

  Vector z(total, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) z[t.basis()[r]] = std::max(0.0, t.rhs(r));
  result.x.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const VarMap& vm = maps[j];
    switch (vm.kind) {
      case VarMap::kShift: result.x[j] = vm.offset + z[vm.col]; break;
      case VarMap::kReflect: result.x[j] = vm.offset - z[vm.col]; break;
      case VarMap::kSplit: result.x[j] = z[vm.col] - z[vm.col2]; break;
    }
    // Snap onto bounds that the standard form enforces only up to rounding.
    result.x[j] = std::clamp(result.x[j], lp.lower[j], lp.upper[j]);
  }
  if (!lp_detail::VerifyPrimal(lp, result.x, opt.verify_tol)) {
    throw Error(ErrorCode::kNumericalFailure, "optimal basis failed primal re-check");
  }
  result.status = LpStatus::kOptimal;
  result.objective_value = 0.0;
  for (std::size_t j = 0; j < p; ++j) result.objective_value += lp.objective[j] * result.x[j];
  return result;
}

}  // namespace dccool
