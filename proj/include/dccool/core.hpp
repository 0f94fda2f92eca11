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

// Shared problem data and the linear thermal/power model.
//
// The linearized model for n servers and m cooling variables is
//
//   inlet(v, rho) = -A v + B rho + E
//
// and a server l is within its red line when
//
//   inlet_l + (t_idle - t_busy) rho_l <= t_idle.
//
// Cooling power is c . v; after normalize() every c_j is one.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dccool {

using Vector = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Temperature and bound tolerance used for every feasibility decision.
inline constexpr double kFeasibilityTol = 1e-7;

enum class ErrorCode {
  kInvalidInstance,
  kNonPositiveCoefficient,
  kDimensionMismatch,
  kInfeasible,
  kUnbounded,
  kNumericalFailure,
  kZeroRow,
  kMassLoss,
  kTooLarge,
  kBudgetExceeded,
  kPreconditionViolated,
  kRankDeficient,
  kParse,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInstance: return "InvalidInstance";
    case ErrorCode::kNonPositiveCoefficient: return "NonPositiveCoefficient";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kUnbounded: return "Unbounded";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kZeroRow: return "ZeroRow";
    case ErrorCode::kMassLoss: return "MassLoss";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Dense row-major matrix. Small by construction (n <= a few hundred).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix FromRows(const std::vector<Vector>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.front().size();
    Matrix out(r, c);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) {
        throw Error(ErrorCode::kDimensionMismatch, "ragged matrix rows");
      }
      std::copy(rows[i].begin(), rows[i].end(), out.data_.begin() + i * c);
    }
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Binary server-utilization vector.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : bits_(n, 0) {}
  explicit Assignment(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_) {
      if (b > 1) throw Error(ErrorCode::kInvalidInstance, "assignment entry not 0/1");
    }
  }

  static Assignment FromIndices(std::size_t n, std::span<const std::size_t> busy) {
    Assignment a(n);
    for (auto i : busy) a.set(i, true);
    return a;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool busy) { bits_[i] = busy ? 1 : 0; }

  std::size_t load() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }

  std::vector<std::size_t> busy_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
      if (bits_[i]) out.push_back(i);
    }
    return out;
  }

  Vector as_vector() const {
    Vector v(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) v[i] = bits_[i];
    return v;
  }

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Entries in [0,1]; mass may be fractional.
using FractionalAssignment = Vector;
using CoolingVector = Vector;

struct ProblemInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  Matrix A;  // n x m, cooling sensitivity
  Matrix B;  // n x n, heat recirculation
  Vector E;  // n
  double t_idle = 0.0;
  double t_busy = 0.0;
  Vector v_lb;  // m
  Vector v_ub;  // m
  std::size_t demand = 0;
  Vector cost_coeffs;  // m

  // a and b of the scalar formulation.
  double red_line_gap() const { return t_idle - t_busy; }
  double red_line_idle() const { return t_idle; }

  bool is_normalized() const {
    return std::all_of(cost_coeffs.begin(), cost_coeffs.end(),
                       [](double c) { return c == 1.0; });
  }

  // B' = B + a I.
  double heat(std::size_t l, std::size_t i) const {
    return B(l, i) + (l == i ? red_line_gap() : 0.0);
  }

  friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

// Throws InvalidInstance / DimensionMismatch when the data break the model
// invariants.
inline void Validate(const ProblemInstance& p) {
  if (p.n == 0 || p.m == 0) {
    throw Error(ErrorCode::kInvalidInstance, "n and m must be positive");
  }
  if (p.A.rows() != p.n || p.A.cols() != p.m) {
    throw Error(ErrorCode::kDimensionMismatch, "A must be n x m");
  }
  if (p.B.rows() != p.n || p.B.cols() != p.n) {
    throw Error(ErrorCode::kDimensionMismatch, "B must be n x n");
  }
  if (p.E.size() != p.n) throw Error(ErrorCode::kDimensionMismatch, "E must have n entries");
  if (p.v_lb.size() != p.m || p.v_ub.size() != p.m || p.cost_coeffs.size() != p.m) {
    throw Error(ErrorCode::kDimensionMismatch, "v_lb, v_ub, cost_coeffs must have m entries");
  }
  for (double x : p.A.data()) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidInstance, "A entries must be finite and >= 0");
    }
  }
  for (double x : p.B.data()) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidInstance, "B entries must be finite and >= 0");
    }
  }
  for (double x : p.E) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidInstance, "E entries must be finite");
  }
  if (!(p.t_idle > p.t_busy)) {
    throw Error(ErrorCode::kInvalidInstance, "t_idle must exceed t_busy");
  }
  for (std::size_t j = 0; j < p.m; ++j) {
    if (std::isnan(p.v_lb[j]) || std::isnan(p.v_ub[j]) || p.v_lb[j] > p.v_ub[j] ||
        !std::isfinite(p.v_lb[j])) {
      throw Error(ErrorCode::kInvalidInstance, "cooling bounds must satisfy finite v_lb <= v_ub");
    }
  }
  if (p.demand > p.n) throw Error(ErrorCode::kInvalidInstance, "demand exceeds n");
}

inline void CheckDims(const ProblemInstance& p, std::span<const double> v,
                      std::span<const double> rho) {
  if (v.size() != p.m || rho.size() != p.n) {
    throw Error(ErrorCode::kDimensionMismatch, "v must have m entries and rho n entries");
  }
}

// Substitutes v'_j = c_j v_j so that the objective becomes sum v'_j.
inline ProblemInstance Normalize(const ProblemInstance& p) {
  for (double c : p.cost_coeffs) {
    if (!(c > 0.0)) {
      throw Error(ErrorCode::kNonPositiveCoefficient, "cost coefficients must be > 0");
    }
  }
  ProblemInstance out = p;
  for (std::size_t j = 0; j < p.m; ++j) {
    const double c = p.cost_coeffs[j];
    for (std::size_t l = 0; l < p.n; ++l) out.A(l, j) = p.A(l, j) / c;
    out.v_lb[j] = c * p.v_lb[j];
    out.v_ub[j] = c * p.v_ub[j];
    out.cost_coeffs[j] = 1.0;
  }
  return out;
}

inline Vector InletTemperatures(const ProblemInstance& p, std::span<const double> v,
                                std::span<const double> rho) {
  CheckDims(p, v, rho);
  Vector t(p.n);
  for (std::size_t l = 0; l < p.n; ++l) {
    double s = p.E[l];
    for (std::size_t j = 0; j < p.m; ++j) s -= p.A(l, j) * v[j];
    for (std::size_t i = 0; i < p.n; ++i) s += p.B(l, i) * rho[i];
    t[l] = s;
  }
  return t;
}

// Signed red-line excess per server: inlet + a rho - b. Positive entries are
// violations.
inline Vector RedLineExcess(const ProblemInstance& p, std::span<const double> v,
                            std::span<const double> rho) {
  Vector t = InletTemperatures(p, v, rho);
  const double a = p.red_line_gap();
  for (std::size_t l = 0; l < p.n; ++l) t[l] += a * rho[l] - p.t_idle;
  return t;
}

inline Vector Violations(const ProblemInstance& p, std::span<const double> v,
                         std::span<const double> rho) {
  Vector t = RedLineExcess(p, v, rho);
  for (double& x : t) x = std::max(0.0, x);
  return t;
}

inline double MaxViolation(const ProblemInstance& p, std::span<const double> v,
                           std::span<const double> rho) {
  const Vector viol = Violations(p, v, rho);
  return viol.empty() ? 0.0 : *std::max_element(viol.begin(), viol.end());
}

inline bool IsFeasible(const ProblemInstance& p, std::span<const double> v,
                       const Assignment& rho, double tol = kFeasibilityTol) {
  if (rho.size() != p.n || v.size() != p.m) return false;
  if (rho.load() < p.demand) return false;
  for (std::size_t j = 0; j < p.m; ++j) {
    if (v[j] < p.v_lb[j] - tol || v[j] > p.v_ub[j] + tol) return false;
  }
  const Vector r = rho.as_vector();
  return MaxViolation(p, v, r) <= tol;
}

inline double CoolingCost(const ProblemInstance& p, std::span<const double> v) {
  if (v.size() != p.m) throw Error(ErrorCode::kDimensionMismatch, "v must have m entries");
  double s = 0.0;
  for (std::size_t j = 0; j < p.m; ++j) s += p.cost_coeffs[j] * v[j];
  return s;
}

struct Solution {
  Assignment rho;
  CoolingVector v;
  double cost = kInf;
  bool feasible = false;
  double max_violation = 0.0;
};

// Builds a Solution record and its feasibility fields for (rho, v).
inline Solution MakeSolution(const ProblemInstance& p, Assignment rho, CoolingVector v) {
  Solution s;
  s.cost = CoolingCost(p, v);
  s.max_violation = MaxViolation(p, v, rho.as_vector());
  s.feasible = IsFeasible(p, v, rho);
  s.rho = std::move(rho);
  s.v = std::move(v);
  return s;
}

}  // namespace dccool
