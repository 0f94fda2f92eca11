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

// Nonlinear side of the toolkit: a black-box cooling/thermal model, uniform
// sampling, least-squares linearization into a ProblemInstance, and scoring
// of linear-model solutions on the nonlinear model.
//
// The bundled synthetic model describes a small air-cooled room: racks of
// five servers in a row, one fan at each end of the row, and a chiller.
//
//   supply(v)    = chw_offset - coldness + approach
//   f_eff_l      = effective airflow seen by server l
//   s(f)         = (f_ref / f)^gamma                       (decreasing, convex)
//   P_i(rho)     = p_idle + (p_busy - p_idle) rho_i
//   inlet_l      = supply + s(f_eff_l) H_l
//                  + (1 + coupling (s(f_eff_l) - 1)) sum_i K_li P_i
//   power(v)     = fan_coeff * sum_fans (flow / 1000)^3 + q_design / cop(coldness)
//   cop(c)       = cop0 - cop_slope c
//
// Inlet temperatures fall with airflow and coldness and rise with load;
// power rises with both cooling variables. In kTied mode the cooling vector
// is (total airflow, coldness) and the flow is split evenly between the two
// fans; in kSplit mode it is (left fan, right fan, coldness) and server l in
// rack r sees f_eff = 2 (wl_r f_left + wr_r f_right) with proximity weights
// 0.9/0.1, 0.7/0.3, ..., 0.1/0.9 from the left rack to the right rack.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dccool/core.hpp"
#include "dccool/relaxation.hpp"
#include "dccool/rng.hpp"

namespace dccool {

// Black-box F(v) and M(v, rho) with the box of admissible cooling vectors.
struct NonlinearModel {
  std::size_t n = 0;
  std::size_t m = 0;
  Vector v_lb;
  Vector v_ub;
  std::function<double(std::span<const double>)> cooling_power;
  std::function<Vector(std::span<const double>, std::span<const double>)> temperatures;
};

enum class FanMode { kTied, kSplit };

struct SyntheticModelParams {
  std::size_t n = 25;
  std::size_t servers_per_rack = 5;
  std::uint64_t seed = 0;
  double airflow_lb = 1300.0;
  double airflow_ub = 2300.0;
  double coldness_lb = 10.0;
  double coldness_ub = 22.0;
  double chw_offset = 32.0;
  double approach = 2.0;
  double p_idle = 100.0;
  double p_busy = 300.0;
  double f_ref = 1800.0;
  double gamma = 0.5;
  double coupling = 0.1;
  // Recirculation kernel magnitudes (degrees per watt) before jitter.
  double k_self = 0.004;
  double k_rack = 0.0015;
  double k_adjacent = 0.0006;
  double k_far = 0.0001;
  // Base heating offset per height position (bottom to top).
  double h_base = 1.0;
  double h_step = 0.5;
  double fan_coeff = 400.0;
  double q_design = 7500.0;
  double cop0 = 7.0;
  double cop_slope = 0.2;
  // Hottest busy inlet allowed at maximum cooling; the kernel is scaled down
  // until it holds.
  double calibration_ceiling = 26.0;
  // Filled by calibration.
  Matrix kernel;
  Vector heating;
};

inline double FanWeightLeft(std::size_t rack, std::size_t racks) {
  if (racks <= 1) return 0.5;
  return 0.9 - 0.8 * static_cast<double>(rack) / static_cast<double>(racks - 1);
}

namespace surrogate_detail {

inline std::size_t RackOf(const SyntheticModelParams& q, std::size_t l) {
  return l / q.servers_per_rack;
}

inline std::size_t Racks(const SyntheticModelParams& q) {
  return (q.n + q.servers_per_rack - 1) / q.servers_per_rack;
}

inline double EffectiveFlow(const SyntheticModelParams& q, FanMode mode,
                            std::span<const double> v, std::size_t l) {
  if (mode == FanMode::kTied) return v[0];
  const double wl = FanWeightLeft(RackOf(q, l), Racks(q));
  return 2.0 * (wl * v[0] + (1.0 - wl) * v[1]);
}

inline Vector Inlet(const SyntheticModelParams& q, FanMode mode, std::span<const double> v,
                    std::span<const double> rho) {
  const std::size_t cold = mode == FanMode::kTied ? 1 : 2;
  const double supply = q.chw_offset - v[cold] + q.approach;
  Vector t(q.n);
  for (std::size_t l = 0; l < q.n; ++l) {
    const double f = std::max(EffectiveFlow(q, mode, v, l), 1e-9);
    const double s = std::pow(q.f_ref / f, q.gamma);
    double recirc = 0.0;
    for (std::size_t i = 0; i < q.n; ++i) {
      recirc += q.kernel(l, i) * (q.p_idle + (q.p_busy - q.p_idle) * rho[i]);
    }
    t[l] = supply + s * q.heating[l] + (1.0 + q.coupling * (s - 1.0)) * recirc;
  }
  return t;
}

inline double Power(const SyntheticModelParams& q, FanMode mode, std::span<const double> v) {
  double fans = 0.0;
  double coldness = 0.0;
  if (mode == FanMode::kTied) {
    fans = 2.0 * std::pow(0.5 * v[0] / 1000.0, 3.0);
    coldness = v[1];
  } else {
    fans = std::pow(v[0] / 1000.0, 3.0) + std::pow(v[1] / 1000.0, 3.0);
    coldness = v[2];
  }
  return q.fan_coeff * fans + q.q_design / (q.cop0 - q.cop_slope * coldness);
}

}  // namespace surrogate_detail

// Seeds the recirculation kernel and heating offsets, then scales the kernel
// so that every server stays below `calibration_ceiling` when all servers
// are busy and cooling is at its maximum.
inline SyntheticModelParams CalibrateSyntheticParams(SyntheticModelParams q) {
  using surrogate_detail::RackOf;
  Rng rng(DeriveSeed(q.seed, {0x6b65726eULL}));
  q.kernel = Matrix(q.n, q.n);
  q.heating.assign(q.n, 0.0);
  for (std::size_t l = 0; l < q.n; ++l) {
    const std::size_t height = l % q.servers_per_rack;
    // Hot air rises: upper servers recirculate more.
    const double lift = 1.0 + 0.15 * static_cast<double>(height);
    q.heating[l] = (q.h_base + q.h_step * static_cast<double>(height)) * rng.uniform(0.9, 1.1);
    for (std::size_t i = 0; i < q.n; ++i) {
      const std::size_t dr = RackOf(q, l) > RackOf(q, i) ? RackOf(q, l) - RackOf(q, i)
                                                         : RackOf(q, i) - RackOf(q, l);
      double k = q.k_far;
      if (l == i) {
        k = q.k_self;
      } else if (dr == 0) {
        k = q.k_rack;
      } else if (dr == 1) {
        k = q.k_adjacent;
      }
      q.kernel(l, i) = k * lift * rng.uniform(0.8, 1.2);
    }
  }
  const Vector ones(q.n, 1.0);
  const Vector v_max{q.airflow_ub, q.coldness_ub};
  for (int attempt = 0; attempt < 200; ++attempt) {
    const Vector t = surrogate_detail::Inlet(q, FanMode::kTied, v_max, ones);
    if (*std::max_element(t.begin(), t.end()) <= q.calibration_ceiling) break;
    for (double& k : q.kernel.data()) k *= 0.95;
  }
  return q;
}

inline NonlinearModel MakeSyntheticModel(const SyntheticModelParams& calibrated,
                                         FanMode mode = FanMode::kTied) {
  if (calibrated.kernel.rows() != calibrated.n) {
    throw Error(ErrorCode::kPreconditionViolated, "synthetic parameters are not calibrated");
  }
  NonlinearModel model;
  model.n = calibrated.n;
  if (mode == FanMode::kTied) {
    model.m = 2;
    model.v_lb = {calibrated.airflow_lb, calibrated.coldness_lb};
    model.v_ub = {calibrated.airflow_ub, calibrated.coldness_ub};
  } else {
    model.m = 3;
    model.v_lb = {calibrated.airflow_lb / 2, calibrated.airflow_lb / 2, calibrated.coldness_lb};
    model.v_ub = {calibrated.airflow_ub / 2, calibrated.airflow_ub / 2, calibrated.coldness_ub};
  }
  model.cooling_power = [q = calibrated, mode](std::span<const double> v) {
    return surrogate_detail::Power(q, mode, v);
  };
  model.temperatures = [q = calibrated, mode](std::span<const double> v,
                                               std::span<const double> rho) {
    return surrogate_detail::Inlet(q, mode, v, rho);
  };
  return model;
}

inline NonlinearModel DefaultSyntheticModel(std::size_t n = 25, std::uint64_t seed = 0,
                                            FanMode mode = FanMode::kTied) {
  SyntheticModelParams q;
  q.n = n;
  q.seed = seed;
  return MakeSyntheticModel(CalibrateSyntheticParams(q), mode);
}

struct Sample {
  Vector v;
  Vector rho;
  double power = 0.0;
  Vector temperatures;
};

struct SampleSet {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
  std::size_t count() const { return samples.size(); }
};

// i.i.d. uniform cooling vectors in the model box and continuous loads in
// [0,1]^n. Draw order per sample: v then rho.
inline SampleSet SampleModel(const NonlinearModel& model, std::size_t count, std::uint64_t seed) {
  SampleSet set;
  set.seed = seed;
  set.samples.reserve(count);
  Rng rng(seed);
  for (std::size_t s = 0; s < count; ++s) {
    Sample x;
    x.v.resize(model.m);
    x.rho.resize(model.n);
    for (std::size_t j = 0; j < model.m; ++j) x.v[j] = rng.uniform(model.v_lb[j], model.v_ub[j]);
    for (double& r : x.rho) r = rng.uniform();
    x.power = model.cooling_power(x.v);
    x.temperatures = model.temperatures(x.v, x.rho);
    set.samples.push_back(std::move(x));
  }
  return set;
}

struct ClampedEntry {
  char matrix = 'A';
  std::size_t row = 0;
  std::size_t col = 0;
  double fitted = 0.0;
};

struct FitReport {
  std::size_t sample_count = 0;
  Vector row_r2;
  Vector row_max_residual;
  double power_r2 = 0.0;
  double power_intercept = 0.0;
  Vector cost_coeffs;  // raw watts per raw unit, i.e. the normalization scale
  std::vector<ClampedEntry> clamped;
};

struct FitOptions {
  bool power_intercept = true;
};

struct FitResult {
  ProblemInstance raw;       // raw cooling units
  ProblemInstance instance;  // normalized
  FitReport report;
};

namespace surrogate_detail {

inline double RSquared(const Eigen::VectorXd& y, const Eigen::VectorXd& pred) {
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = (y - pred).squaredNorm();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace surrogate_detail

// Ordinary least squares: power ~ c . v (+ const), inlet_l ~ -A_l v + B_l rho + E_l.
// Fitted A or B entries below zero are set to zero and listed in the report;
// values within rounding of zero are snapped silently.
inline FitResult FitLinear(const SampleSet& set, double t_idle, double t_busy, std::size_t demand,
                           const FitOptions& opt = {}) {
  if (set.samples.empty()) throw Error(ErrorCode::kRankDeficient, "no samples");
  const std::size_t n = set.samples.front().rho.size();
  const std::size_t m = set.samples.front().v.size();
  const std::size_t count = set.samples.size();
  if (count < m + n + 1) throw Error(ErrorCode::kRankDeficient, "too few samples for the fit");

  const Eigen::Index cols = static_cast<Eigen::Index>(1 + m + n);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(count), cols);
  Eigen::MatrixXd Y(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(n));
  Eigen::VectorXd power(static_cast<Eigen::Index>(count));
  for (std::size_t s = 0; s < count; ++s) {
    const Sample& x = set.samples[s];
    const auto r = static_cast<Eigen::Index>(s);
    X(r, 0) = 1.0;
    for (std::size_t j = 0; j < m; ++j) X(r, static_cast<Eigen::Index>(1 + j)) = x.v[j];
    for (std::size_t i = 0; i < n; ++i) X(r, static_cast<Eigen::Index>(1 + m + i)) = x.rho[i];
    for (std::size_t l = 0; l < n; ++l) Y(r, static_cast<Eigen::Index>(l)) = x.temperatures[l];
    power(r) = x.power;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < cols) throw Error(ErrorCode::kRankDeficient, "thermal design matrix is rank deficient");
  const Eigen::MatrixXd coef = qr.solve(Y);

  FitResult out;
  FitReport& rep = out.report;
  rep.sample_count = count;

  // Power fit on [1, v] or [v].
  {
    const Eigen::Index off = opt.power_intercept ? 0 : 1;
    const Eigen::MatrixXd Xp = X.leftCols(static_cast<Eigen::Index>(1 + m)).rightCols(
        static_cast<Eigen::Index>(1 + m) - off);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qp(Xp);
    if (qp.rank() < Xp.cols()) throw Error(ErrorCode::kRankDeficient, "power design matrix is rank deficient");
    const Eigen::VectorXd pc = qp.solve(power);
    rep.power_intercept = opt.power_intercept ? pc(0) : 0.0;
    rep.cost_coeffs.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      rep.cost_coeffs[j] = pc(static_cast<Eigen::Index>(j) + (opt.power_intercept ? 1 : 0));
    }
    rep.power_r2 = surrogate_detail::RSquared(power, Xp * pc);
  }

  ProblemInstance raw;
  raw.n = n;
  raw.m = m;
  raw.A = Matrix(n, m);
  raw.B = Matrix(n, n);
  raw.E.assign(n, 0.0);
  raw.t_idle = t_idle;
  raw.t_busy = t_busy;
  raw.demand = demand;
  raw.cost_coeffs = rep.cost_coeffs;
  raw.v_lb.assign(m, kInf);
  raw.v_ub.assign(m, -kInf);
  for (const Sample& x : set.samples) {
    for (std::size_t j = 0; j < m; ++j) {
      raw.v_lb[j] = std::min(raw.v_lb[j], x.v[j]);
      raw.v_ub[j] = std::max(raw.v_ub[j], x.v[j]);
    }
  }

  const Eigen::MatrixXd pred = X * coef;
  rep.row_r2.resize(n);
  rep.row_max_residual.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    const auto cl = static_cast<Eigen::Index>(l);
    rep.row_r2[l] = surrogate_detail::RSquared(Y.col(cl), pred.col(cl));
    rep.row_max_residual[l] = (Y.col(cl) - pred.col(cl)).cwiseAbs().maxCoeff();
    raw.E[l] = coef(0, cl);
    double scale = 0.0;
    for (Eigen::Index k = 1; k < cols; ++k) scale = std::max(scale, std::abs(coef(k, cl)));
    const double snap = 1e-9 * std::max(1.0, scale);
    const auto keep = [&](char which, std::size_t col, double value) {
      if (value >= 0.0) return value;
      if (value > -snap) return 0.0;
      rep.clamped.push_back({which, l, col, value});
      return 0.0;
    };
    for (std::size_t j = 0; j < m; ++j) {
      raw.A(l, j) = keep('A', j, -coef(static_cast<Eigen::Index>(1 + j), cl));
    }
    for (std::size_t i = 0; i < n; ++i) {
      raw.B(l, i) = keep('B', i, coef(static_cast<Eigen::Index>(1 + m + i), cl));
    }
  }
  Validate(raw);
  out.instance = Normalize(raw);
  out.raw = std::move(raw);
  return out;
}

// Maps a normalized cooling vector back to raw model units.
inline Vector Denormalize(std::span<const double> v_normalized, std::span<const double> cost_coeffs) {
  Vector raw(v_normalized.size());
  for (std::size_t j = 0; j < raw.size(); ++j) raw[j] = v_normalized[j] / cost_coeffs[j];
  return raw;
}

// Lowers both red lines by delta.
inline ProblemInstance WithSafetyMargin(ProblemInstance p, double delta) {
  p.t_idle -= delta;
  p.t_busy -= delta;
  return p;
}

struct ModelEvaluation {
  double true_power = 0.0;
  double temp_margin = 0.0;  // max_l inlet_l - redline_l; <= 0 means within limits
  bool feasible = false;
};

// Scores (v, rho) on the nonlinear model. The red line of server l is
// t_idle - (t_idle - t_busy) rho_l. v is in raw model units.
inline ModelEvaluation EvaluateOnModel(const NonlinearModel& model, std::span<const double> v,
                                       std::span<const double> rho, double t_idle, double t_busy,
                                       std::size_t demand, double tol = kFeasibilityTol) {
  if (v.size() != model.m || rho.size() != model.n) {
    throw Error(ErrorCode::kDimensionMismatch, "solution does not match the model");
  }
  ModelEvaluation e;
  e.true_power = model.cooling_power(v);
  const Vector t = model.temperatures(v, rho);
  e.temp_margin = -kInf;
  double load = 0.0;
  for (std::size_t l = 0; l < model.n; ++l) {
    e.temp_margin = std::max(e.temp_margin, t[l] - (t_idle - (t_idle - t_busy) * rho[l]));
    load += rho[l];
  }
  e.feasible = e.temp_margin <= tol && load + 1e-9 >= static_cast<double>(demand);
  return e;
}

struct ContinuousSolution {
  FractionalAssignment rho;
  CoolingVector v;
  double cost = 0.0;
};

// Continuous utilizations with the single red line t_busy for every server.
inline ContinuousSolution SolveContinuousSingleRedline(const ProblemInstance& p) {
  RelaxationOptions opt;
  auto r = SolveRelaxationWith(p, RedLines::Single(p), opt);
  if (!r) throw Error(ErrorCode::kInfeasible, "single red-line problem is infeasible");
  return {std::move(r->rho), std::move(r->v), r->cost};
}

}  // namespace dccool
