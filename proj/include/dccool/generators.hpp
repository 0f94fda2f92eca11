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

// Seeded instance families. Every generator is a pure function of its
// arguments; all randomness flows through Rng in the documented draw order.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dccool/core.hpp"
#include "dccool/rng.hpp"
#include "dccool/surrogate.hpp"

namespace dccool {

inline constexpr double kHugeBound = 1e8;

// Ones at columns i, i+1, ..., i+window-1 (mod n) of row i.
inline Matrix CirculantOnes(std::size_t n, std::size_t window) {
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < window; ++k) b(i, (i + k) % n) = 1.0;
  }
  return b;
}

struct CaseParams {
  std::size_t n = 25;
  std::size_t m = 3;
  std::size_t p = 5;
  std::size_t demand = 0;
};

namespace generators_detail {

inline ProblemInstance CaseSkeleton(std::size_t n, std::size_t m, std::size_t demand) {
  ProblemInstance q;
  q.n = n;
  q.m = m;
  q.A = Matrix(n, m);
  q.B = Matrix(n, n);
  q.E.assign(n, 0.0);
  q.t_idle = 2.0;
  q.t_busy = 1.0;
  q.v_lb.assign(m, 1e-3);
  q.v_ub.assign(m, kHugeBound);
  q.demand = demand;
  q.cost_coeffs.assign(m, 1.0);
  return q;
}

inline void CheckCase(const CaseParams& c) {
  if (c.n == 0 || c.m == 0 || c.p == 0 || c.p > c.n || c.demand > c.n) {
    throw Error(ErrorCode::kPreconditionViolated, "case parameters out of range");
  }
}

// Value in (0, 1]; A entries must be positive for the row to be coolable.
inline double PositiveUnit(Rng& rng) { return 1.0 - rng.uniform(); }

}  // namespace generators_detail

// Each A row: one entry at a uniform column with a uniform value. B is the
// circulant with p ones per row and column. Draw order: per row, column then value.
inline ProblemInstance GenCase1(std::uint64_t seed, const CaseParams& c = {}) {
  generators_detail::CheckCase(c);
  ProblemInstance q = generators_detail::CaseSkeleton(c.n, c.m, c.demand);
  Rng rng(seed);
  for (std::size_t l = 0; l < c.n; ++l) {
    const std::size_t col = rng.below(c.m);
    q.A(l, col) = generators_detail::PositiveUnit(rng);
  }
  q.B = CirculantOnes(c.n, c.p);
  return q;
}

// As Case 1, but every A row equals one dense random row.
inline ProblemInstance GenCase2(std::uint64_t seed, const CaseParams& c = {}) {
  generators_detail::CheckCase(c);
  ProblemInstance q = generators_detail::CaseSkeleton(c.n, c.m, c.demand);
  Rng rng(seed);
  Vector row(c.m);
  for (double& x : row) x = generators_detail::PositiveUnit(rng);
  for (std::size_t l = 0; l < c.n; ++l) {
    for (std::size_t j = 0; j < c.m; ++j) q.A(l, j) = row[j];
  }
  q.B = CirculantOnes(c.n, c.p);
  return q;
}

// All ways to write 3 as an ordered sum of m nonnegative integers.
inline std::vector<std::vector<int>> CompositionsOfThree(std::size_t m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(m, 0);
  const auto rec = [&](auto&& self, std::size_t j, int left) -> void {
    if (j + 1 == m) {
      cur[j] = left;
      out.push_back(cur);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      cur[j] = k;
      self(self, j + 1, left - k);
    }
  };
  if (m > 0) rec(rec, 0, 3);
  return out;
}

// A rows: a uniform composition of 3. B rows: diagonal U[2,5], four distinct
// off-diagonal positions U[1,2], all others U[0,0.5].
// Draw order: all A rows, then per B row: diagonal, positions, then the
// remaining values in column order.
inline ProblemInstance GenCase3(std::uint64_t seed, const CaseParams& c = {}) {
  generators_detail::CheckCase(c);
  if (c.n < 5) throw Error(ErrorCode::kPreconditionViolated, "case 3 needs n >= 5");
  ProblemInstance q = generators_detail::CaseSkeleton(c.n, c.m, c.demand);
  Rng rng(seed);
  const auto comps = CompositionsOfThree(c.m);
  for (std::size_t l = 0; l < c.n; ++l) {
    const auto& pick = comps[rng.below(comps.size())];
    for (std::size_t j = 0; j < c.m; ++j) q.A(l, j) = pick[j];
  }
  for (std::size_t l = 0; l < c.n; ++l) {
    q.B(l, l) = rng.uniform(2.0, 5.0);
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < c.n; ++i) {
      if (i != l) others.push_back(i);
    }
    std::vector<bool> strong(c.n, false);
    for (std::size_t i : rng.sample(others, 4)) strong[i] = true;
    for (std::size_t i = 0; i < c.n; ++i) {
      if (i == l) continue;
      q.B(l, i) = strong[i] ? rng.uniform(1.0, 2.0) : rng.uniform(0.0, 0.5);
    }
  }
  return q;
}

struct Lemma1Params {
  std::size_t p = 3;
  double a = 1.0;
  double b = 2.0;
  double q = 1.0;
  double v_lb = 1e-3;
  std::size_t demand = 4;
  std::size_t n = 10;
  std::size_t m = 1;
  // kIndexOrder: good servers are 0..D-1 and the extra ones of every row sit
  // in columns D, D+1, ... . kAdversarial: the same instance with servers
  // relabeled so the good servers are the last D and the extra ones fill
  // columns 0, 1, ... ; index-ordered tie-breaking then rounds onto the
  // crowded columns.
  enum class Layout { kIndexOrder, kAdversarial } layout = Layout::kIndexOrder;
};

// One cooling entry q per row (in column l mod m), E = 0, red lines b and b - a.
// Good rows carry a diagonal one plus p-1 extra ones; all other rows carry p
// extra ones.
inline ProblemInstance GenLemma1(const Lemma1Params& s) {
  const double n = static_cast<double>(s.n);
  const double d = static_cast<double>(s.demand);
  const double lhs = d / n * (static_cast<double>(s.p) + s.a);
  const double mid = s.b + s.q * s.v_lb;
  const double rhs = static_cast<double>(std::min(s.demand, s.p)) + s.a;
  if (!(lhs <= mid && mid < rhs)) {
    throw Error(ErrorCode::kPreconditionViolated, "lemma 1 inequality (D/n)(p+a) <= b+q*v_L < min(D,p)+a fails");
  }
  if (s.p == 0 || s.m == 0 || s.demand == 0 || s.demand >= s.n || s.p > s.n - s.demand ||
      !(s.a > 0.0) || !(s.q > 0.0) || !(s.v_lb >= 0.0)) {
    throw Error(ErrorCode::kPreconditionViolated, "lemma 1 parameters out of range");
  }
  ProblemInstance r;
  r.n = s.n;
  r.m = s.m;
  r.A = Matrix(s.n, s.m);
  for (std::size_t l = 0; l < s.n; ++l) r.A(l, l % s.m) = s.q;
  r.B = Matrix(s.n, s.n);
  const bool adversarial = s.layout == Lemma1Params::Layout::kAdversarial;
  const std::size_t first_good = adversarial ? s.n - s.demand : 0;
  const std::size_t first_extra = adversarial ? 0 : s.demand;
  for (std::size_t l = 0; l < s.n; ++l) {
    const bool good = l >= first_good && l < first_good + s.demand;
    std::size_t extras = s.p;
    if (good) {
      r.B(l, l) = 1.0;
      extras = s.p - 1;
    }
    for (std::size_t k = 0; k < extras; ++k) r.B(l, first_extra + k) = 1.0;
  }
  r.E.assign(s.n, 0.0);
  r.t_idle = s.b;
  r.t_busy = s.b - s.a;
  r.v_lb.assign(s.m, s.v_lb);
  r.v_ub.assign(s.m, kHugeBound);
  r.demand = s.demand;
  r.cost_coeffs.assign(s.m, 1.0);
  return r;
}

struct Lemma2Params {
  std::size_t p = 5;
  std::size_t n = 25;
  double a = 1.0;
  double b = 1.5;
};

// Circulant window-p B, one all-ones cooling column, D = n / p.
inline ProblemInstance GenLemma2(const Lemma2Params& s) {
  if (s.p == 0 || s.n % s.p != 0) throw Error(ErrorCode::kPreconditionViolated, "p must divide n");
  if (!(1.0 + s.a > s.b)) throw Error(ErrorCode::kPreconditionViolated, "lemma 2 needs 1 + a > b");
  if (!(s.a > 0.0)) throw Error(ErrorCode::kPreconditionViolated, "lemma 2 needs a > 0");
  ProblemInstance r;
  r.n = s.n;
  r.m = 1;
  r.A = Matrix(s.n, 1, 1.0);
  r.B = CirculantOnes(s.n, s.p);
  r.E.assign(s.n, 0.0);
  r.t_idle = s.b;
  r.t_busy = s.b - s.a;
  r.v_lb = {0.0};
  r.v_ub = {kHugeBound};
  r.demand = s.n / s.p;
  r.cost_coeffs = {1.0};
  return r;
}

// The max-min instance family: m = 1, A = ones, E = 0, v in [0, inf).
inline ProblemInstance GenReduction(const Matrix& B, double a, double b, std::size_t demand) {
  if (B.rows() != B.cols()) throw Error(ErrorCode::kDimensionMismatch, "B must be square");
  for (double x : B.data()) {
    if (x != 0.0 && x != 1.0) throw Error(ErrorCode::kPreconditionViolated, "B must be 0/1");
  }
  ProblemInstance r;
  r.n = B.rows();
  r.m = 1;
  r.A = Matrix(r.n, 1, 1.0);
  r.B = B;
  r.E.assign(r.n, 0.0);
  r.t_idle = b;
  r.t_busy = b - a;
  r.v_lb = {0.0};
  r.v_ub = {kInf};
  r.demand = demand;
  r.cost_coeffs = {1.0};
  Validate(r);
  return r;
}

struct DatacenterOptions {
  std::size_t size = 25;  // 25, 50 or 75
  std::size_t samples = 5000;
  std::uint64_t seed = 0;
  std::size_t demand = 0;
  double t_idle = 35.0;
  double t_busy = 27.0;
  std::size_t servers_per_rack = 5;
};

struct DatacenterBuild {
  ProblemInstance instance;  // normalized
  ProblemInstance raw;       // raw cooling units, columns as in `instance`
  FitReport report;          // fit of the 25-server base
};

namespace generators_detail {

// Splits the airflow column (0) of a tied 25-server fit into left and right
// fan columns weighted by rack proximity. Columns: left fan, right fan,
// then the remaining columns of `base`.
inline ProblemInstance SplitFans(const ProblemInstance& base, std::size_t per_rack) {
  const std::size_t n = base.n;
  const std::size_t racks = (n + per_rack - 1) / per_rack;
  ProblemInstance out = base;
  out.m = base.m + 1;
  out.A = Matrix(n, out.m);
  for (std::size_t l = 0; l < n; ++l) {
    const double wl = FanWeightLeft(l / per_rack, racks);
    out.A(l, 0) = 2.0 * wl * base.A(l, 0);
    out.A(l, 1) = 2.0 * (1.0 - wl) * base.A(l, 0);
    for (std::size_t j = 1; j < base.m; ++j) out.A(l, j + 1) = base.A(l, j);
  }
  const auto widen = [&](const Vector& v, double fan_scale) {
    Vector r{v[0] * fan_scale, v[0] * fan_scale};
    r.insert(r.end(), v.begin() + 1, v.end());
    return r;
  };
  out.v_lb = widen(base.v_lb, 0.5);
  out.v_ub = widen(base.v_ub, 0.5);
  out.cost_coeffs = widen(base.cost_coeffs, 1.0);
  return out;
}

// Chains `blocks` copies of a split 25-server block. Fan k sits between
// blocks k-1 and k; an inner fan's flow is shared equally by its two
// neighbors, so its coefficient is halved and its bounds doubled.
// Adjacent blocks recirculate 0.15 * r * (same-block values), where r counts
// racks from the far end (1) to the shared boundary (racks); non-adjacent
// blocks are isolated.
inline ProblemInstance ChainBlocks(const ProblemInstance& block, std::size_t blocks,
                                   std::size_t per_rack) {
  const std::size_t nb = block.n;
  const std::size_t racks = (nb + per_rack - 1) / per_rack;
  const std::size_t extra = block.m - 2;  // non-fan columns
  const std::size_t fans = blocks + 1;
  ProblemInstance out;
  out.n = nb * blocks;
  out.m = fans + extra;
  out.A = Matrix(out.n, out.m);
  out.B = Matrix(out.n, out.n);
  out.E.resize(out.n);
  out.t_idle = block.t_idle;
  out.t_busy = block.t_busy;
  out.demand = block.demand;
  out.v_lb.resize(out.m);
  out.v_ub.resize(out.m);
  out.cost_coeffs.resize(out.m);
  for (std::size_t f = 0; f < fans; ++f) {
    const bool inner = f > 0 && f + 1 < fans;
    const std::size_t side = f == 0 ? 0 : 1;
    out.v_lb[f] = block.v_lb[side] * (inner ? 2.0 : 1.0);
    out.v_ub[f] = block.v_ub[side] * (inner ? 2.0 : 1.0);
    out.cost_coeffs[f] = block.cost_coeffs[side];
  }
  for (std::size_t j = 0; j < extra; ++j) {
    out.v_lb[fans + j] = block.v_lb[2 + j];
    out.v_ub[fans + j] = block.v_ub[2 + j];
    out.cost_coeffs[fans + j] = block.cost_coeffs[2 + j];
  }
  for (std::size_t k = 0; k < blocks; ++k) {
    for (std::size_t l = 0; l < nb; ++l) {
      const std::size_t row = k * nb + l;
      const double left_share = k == 0 ? 1.0 : 0.5;
      const double right_share = k + 1 == blocks ? 1.0 : 0.5;
      out.A(row, k) = left_share * block.A(l, 0);
      out.A(row, k + 1) = right_share * block.A(l, 1);
      for (std::size_t j = 0; j < extra; ++j) out.A(row, fans + j) = block.A(l, 2 + j);
      out.E[row] = block.E[l];
      const std::size_t rack = l / per_rack;
      for (std::size_t k2 = 0; k2 < blocks; ++k2) {
        double scale = 0.0;
        if (k2 == k) {
          scale = 1.0;
        } else if (k2 == k + 1) {
          scale = 0.15 * static_cast<double>(rack + 1);
        } else if (k2 + 1 == k) {
          scale = 0.15 * static_cast<double>(racks - rack);
        }
        if (scale == 0.0) continue;
        for (std::size_t i = 0; i < nb; ++i) out.B(row, k2 * nb + i) = scale * block.B(l, i);
      }
    }
  }
  return out;
}

}  // namespace generators_detail

// Fits the tied 25-server base model (airflow, coldness), then applies the
// fan split and, for 50 and 75 servers, the block chaining.
inline DatacenterBuild GenDatacenterBuild(const NonlinearModel& base_model,
                                          const DatacenterOptions& opt) {
  if (opt.size != 25 && opt.size != 50 && opt.size != 75) {
    throw Error(ErrorCode::kPreconditionViolated, "datacenter size must be 25, 50 or 75");
  }
  if (base_model.m != 2) {
    throw Error(ErrorCode::kPreconditionViolated, "datacenter base model must have (airflow, coldness)");
  }
  if (opt.demand > opt.size) throw Error(ErrorCode::kPreconditionViolated, "demand exceeds size");
  const SampleSet samples = SampleModel(base_model, opt.samples, opt.seed);
  FitResult fit = FitLinear(samples, opt.t_idle, opt.t_busy, std::min(opt.demand, base_model.n));
  ProblemInstance block = generators_detail::SplitFans(fit.raw, opt.servers_per_rack);
  DatacenterBuild out;
  out.raw = opt.size == 25 ? block
                           : generators_detail::ChainBlocks(block, opt.size / base_model.n,
                                                            opt.servers_per_rack);
  out.raw.demand = opt.demand;
  Validate(out.raw);
  out.instance = Normalize(out.raw);
  out.report = std::move(fit.report);
  return out;
}

inline ProblemInstance GenDatacenter(const NonlinearModel& base_model, const DatacenterOptions& opt) {
  return GenDatacenterBuild(base_model, opt).instance;
}

enum class Family { kCase1, kCase2, kCase3, kLemma1, kLemma2, kDc25, kDc50, kDc75, kReduction };

inline const char* FamilyName(Family f) {
  switch (f) {
    case Family::kCase1: return "case1";
    case Family::kCase2: return "case2";
    case Family::kCase3: return "case3";
    case Family::kLemma1: return "lemma1";
    case Family::kLemma2: return "lemma2";
    case Family::kDc25: return "dc25";
    case Family::kDc50: return "dc50";
    case Family::kDc75: return "dc75";
    case Family::kReduction: return "reduction";
  }
  return "?";
}

inline std::optional<Family> ParseFamily(const std::string& s) {
  for (Family f : {Family::kCase1, Family::kCase2, Family::kCase3, Family::kLemma1, Family::kLemma2,
                   Family::kDc25, Family::kDc50, Family::kDc75, Family::kReduction}) {
    if (s == FamilyName(f)) return f;
  }
  return std::nullopt;
}

inline bool IsDatacenter(Family f) {
  return f == Family::kDc25 || f == Family::kDc50 || f == Family::kDc75;
}

// Flat parameter bag covering every family; unset optionals take the
// family defaults.
struct GeneratorSpec {
  Family family = Family::kCase1;
  std::uint64_t seed = 0;
  std::optional<std::size_t> n, m, p, demand;
  std::optional<double> a, b, q, v_lb;
  bool adversarial = false;  // lemma1 labeling
  std::size_t samples = 5000;
  std::optional<Matrix> reduction_b;  // reduction only
};

inline ProblemInstance Generate(const GeneratorSpec& g) {
  switch (g.family) {
    case Family::kCase1:
    case Family::kCase2:
    case Family::kCase3: {
      CaseParams c;
      c.n = g.n.value_or(25);
      c.m = g.m.value_or(3);
      c.p = g.p.value_or(5);
      c.demand = g.demand.value_or(0);
      if (g.family == Family::kCase1) return GenCase1(g.seed, c);
      if (g.family == Family::kCase2) return GenCase2(g.seed, c);
      return GenCase3(g.seed, c);
    }
    case Family::kLemma1: {
      Lemma1Params s;
      s.p = g.p.value_or(s.p);
      s.a = g.a.value_or(s.a);
      s.b = g.b.value_or(s.b);
      s.q = g.q.value_or(s.q);
      s.v_lb = g.v_lb.value_or(s.v_lb);
      s.demand = g.demand.value_or(s.demand);
      s.n = g.n.value_or(s.n);
      s.m = g.m.value_or(s.m);
      if (g.adversarial) s.layout = Lemma1Params::Layout::kAdversarial;
      return GenLemma1(s);
    }
    case Family::kLemma2: {
      Lemma2Params s;
      s.p = g.p.value_or(s.p);
      s.n = g.n.value_or(s.n);
      s.a = g.a.value_or(s.a);
      s.b = g.b.value_or(s.b);
      ProblemInstance r = GenLemma2(s);
      if (g.demand) r.demand = *g.demand;
      return r;
    }
    case Family::kDc25:
    case Family::kDc50:
    case Family::kDc75: {
      DatacenterOptions opt;
      opt.size = g.family == Family::kDc25 ? 25 : g.family == Family::kDc50 ? 50 : 75;
      opt.samples = g.samples;
      opt.seed = g.seed;
      opt.demand = g.demand.value_or(0);
      return GenDatacenter(DefaultSyntheticModel(25, g.seed), opt);
    }
    case Family::kReduction: {
      if (!g.reduction_b) throw Error(ErrorCode::kPreconditionViolated, "reduction needs a B matrix");
      return GenReduction(*g.reduction_b, g.a.value_or(1.0), g.b.value_or(1.5), g.demand.value_or(0));
    }
  }
  throw Error(ErrorCode::kPreconditionViolated, "unknown family");
}

}  // namespace dccool
