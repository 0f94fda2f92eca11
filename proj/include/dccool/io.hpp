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

// JSON forms of instances, solutions, synthetic models and fit reports.
// Matrices are flat row-major arrays. Non-finite numbers are written as the
// strings "inf", "-inf" and "nan".

#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "dccool/core.hpp"
#include "dccool/surrogate.hpp"

namespace dccool {

using Json = nlohmann::json;

inline constexpr const char* kInstanceFormat = "dc-coolopt/1";
inline constexpr const char* kSolutionFormat = "dc-coolopt-solution/1";
inline constexpr const char* kModelFormat = "dc-coolopt-model/1";
inline constexpr const char* kFitFormat = "dc-coolopt-fit/1";

namespace io_detail {

inline Json Number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double ReadNumber(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
  }
  throw Error(ErrorCode::kParse, "expected a number, got " + j.dump());
}

inline Json Array(std::span<const double> xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(Number(x));
  return a;
}

inline Vector ReadArray(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "expected an array");
  Vector out;
  out.reserve(j.size());
  for (const Json& x : j) out.push_back(ReadNumber(x));
  return out;
}

// Accepts a flat row-major array or a nested array of rows.
inline Matrix ReadMatrix(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "expected a matrix array");
  Matrix m(rows, cols);
  if (!j.empty() && j.front().is_array()) {
    if (j.size() != rows) throw Error(ErrorCode::kDimensionMismatch, "matrix row count mismatch");
    for (std::size_t r = 0; r < rows; ++r) {
      const Vector row = ReadArray(j[r]);
      if (row.size() != cols) throw Error(ErrorCode::kDimensionMismatch, "matrix column count mismatch");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
  }
  const Vector flat = ReadArray(j);
  if (flat.size() != rows * cols) throw Error(ErrorCode::kDimensionMismatch, "matrix size mismatch");
  m.data() = flat;
  return m;
}

inline const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

inline std::size_t ReadCount(const Json& j, const char* key) {
  const Json& x = Field(j, key);
  if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0)) {
    throw Error(ErrorCode::kParse, std::string("field '") + key + "' must be a nonnegative integer");
  }
  return x.get<std::size_t>();
}

}  // namespace io_detail

inline Json ToJson(const ProblemInstance& p) {
  using io_detail::Array;
  using io_detail::Number;
  Json j;
  j["format"] = kInstanceFormat;
  j["n"] = p.n;
  j["m"] = p.m;
  j["A"] = Array(p.A.data());
  j["B"] = Array(p.B.data());
  j["E"] = Array(p.E);
  j["t_idle"] = Number(p.t_idle);
  j["t_busy"] = Number(p.t_busy);
  j["v_lb"] = Array(p.v_lb);
  j["v_ub"] = Array(p.v_ub);
  j["demand"] = p.demand;
  j["cost_coeffs"] = Array(p.cost_coeffs);
  return j;
}

// Parses and validates an instance.
inline ProblemInstance InstanceFromJson(const Json& j) {
  using namespace io_detail;
  try {
    if (j.contains("format") && j.at("format") != kInstanceFormat) {
      throw Error(ErrorCode::kParse, "unsupported instance format " + j.at("format").dump());
    }
    ProblemInstance p;
    p.n = ReadCount(j, "n");
    p.m = ReadCount(j, "m");
    p.A = ReadMatrix(Field(j, "A"), p.n, p.m);
    p.B = ReadMatrix(Field(j, "B"), p.n, p.n);
    p.E = ReadArray(Field(j, "E"));
    p.t_idle = ReadNumber(Field(j, "t_idle"));
    p.t_busy = ReadNumber(Field(j, "t_busy"));
    p.v_lb = ReadArray(Field(j, "v_lb"));
    p.v_ub = ReadArray(Field(j, "v_ub"));
    p.demand = ReadCount(j, "demand");
    p.cost_coeffs = j.contains("cost_coeffs") ? ReadArray(j.at("cost_coeffs")) : Vector(p.m, 1.0);
    if (p.E.size() != p.n) throw Error(ErrorCode::kDimensionMismatch, "E must have n entries");
    Validate(p);
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

inline Json ToJson(const Solution& s, double wall_time = 0.0) {
  using io_detail::Array;
  using io_detail::Number;
  Json j;
  j["format"] = kSolutionFormat;
  j["rho"] = Array(s.rho.as_vector());
  j["v"] = Array(s.v);
  j["cost"] = Number(s.cost);
  j["feasible"] = s.feasible;
  j["max_violation"] = Number(s.max_violation);
  j["wall_time"] = Number(wall_time);
  return j;
}

// rho may be fractional (continuous solutions share the schema).
struct SolutionRecord {
  Vector rho;
  Vector v;
  double cost = 0.0;
};

inline SolutionRecord SolutionFromJson(const Json& j) {
  using namespace io_detail;
  try {
    SolutionRecord r;
    r.rho = ReadArray(Field(j, "rho"));
    r.v = ReadArray(Field(j, "v"));
    r.cost = j.contains("cost") ? ReadNumber(j.at("cost")) : 0.0;
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

struct ModelSpec {
  SyntheticModelParams params;
  FanMode mode = FanMode::kTied;
};

// The kernel is not stored: it is rebuilt from the seed by calibration.
inline Json ToJson(const ModelSpec& spec) {
  const SyntheticModelParams& q = spec.params;
  Json j;
  j["format"] = kModelFormat;
  j["mode"] = spec.mode == FanMode::kTied ? "tied" : "split";
  j["n"] = q.n;
  j["servers_per_rack"] = q.servers_per_rack;
  j["seed"] = q.seed;
  const std::pair<const char*, double> scalars[] = {
      {"airflow_lb", q.airflow_lb}, {"airflow_ub", q.airflow_ub},
      {"coldness_lb", q.coldness_lb}, {"coldness_ub", q.coldness_ub},
      {"chw_offset", q.chw_offset}, {"approach", q.approach},
      {"p_idle", q.p_idle}, {"p_busy", q.p_busy},
      {"f_ref", q.f_ref}, {"gamma", q.gamma}, {"coupling", q.coupling},
      {"k_self", q.k_self}, {"k_rack", q.k_rack}, {"k_adjacent", q.k_adjacent}, {"k_far", q.k_far},
      {"h_base", q.h_base}, {"h_step", q.h_step},
      {"fan_coeff", q.fan_coeff}, {"q_design", q.q_design},
      {"cop0", q.cop0}, {"cop_slope", q.cop_slope},
      {"calibration_ceiling", q.calibration_ceiling}};
  for (const auto& [k, v] : scalars) j[k] = v;
  return j;
}

inline ModelSpec ModelSpecFromJson(const Json& j) {
  using namespace io_detail;
  try {
    if (j.contains("format") && j.at("format") != kModelFormat) {
      throw Error(ErrorCode::kParse, "unsupported model format " + j.at("format").dump());
    }
    ModelSpec spec;
    SyntheticModelParams& q = spec.params;
    const std::string mode = j.value("mode", std::string("tied"));
    if (mode != "tied" && mode != "split") throw Error(ErrorCode::kParse, "mode must be tied or split");
    spec.mode = mode == "tied" ? FanMode::kTied : FanMode::kSplit;
    q.n = j.value("n", q.n);
    q.servers_per_rack = j.value("servers_per_rack", q.servers_per_rack);
    q.seed = j.value("seed", q.seed);
    const std::pair<const char*, double*> scalars[] = {
        {"airflow_lb", &q.airflow_lb}, {"airflow_ub", &q.airflow_ub},
        {"coldness_lb", &q.coldness_lb}, {"coldness_ub", &q.coldness_ub},
        {"chw_offset", &q.chw_offset}, {"approach", &q.approach},
        {"p_idle", &q.p_idle}, {"p_busy", &q.p_busy},
        {"f_ref", &q.f_ref}, {"gamma", &q.gamma}, {"coupling", &q.coupling},
        {"k_self", &q.k_self}, {"k_rack", &q.k_rack}, {"k_adjacent", &q.k_adjacent}, {"k_far", &q.k_far},
        {"h_base", &q.h_base}, {"h_step", &q.h_step},
        {"fan_coeff", &q.fan_coeff}, {"q_design", &q.q_design},
        {"cop0", &q.cop0}, {"cop_slope", &q.cop_slope},
        {"calibration_ceiling", &q.calibration_ceiling}};
    for (const auto& [k, dst] : scalars) {
      if (j.contains(k)) *dst = ReadNumber(j.at(k));
    }
    if (q.n == 0 || q.servers_per_rack == 0) throw Error(ErrorCode::kParse, "n and servers_per_rack must be positive");
    return spec;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

inline NonlinearModel BuildModel(const ModelSpec& spec) {
  return MakeSyntheticModel(CalibrateSyntheticParams(spec.params), spec.mode);
}

inline Json ToJson(const FitReport& r) {
  using io_detail::Array;
  using io_detail::Number;
  Json j;
  j["format"] = kFitFormat;
  j["sample_count"] = r.sample_count;
  j["row_r2"] = Array(r.row_r2);
  j["row_max_residual"] = Array(r.row_max_residual);
  j["power_r2"] = Number(r.power_r2);
  j["power_intercept"] = Number(r.power_intercept);
  j["cost_coeffs"] = Array(r.cost_coeffs);
  Json clamped = Json::array();
  for (const ClampedEntry& c : r.clamped) {
    clamped.push_back({{"matrix", std::string(1, c.matrix)}, {"row", c.row}, {"col", c.col},
                       {"fitted", Number(c.fitted)}});
  }
  j["clamped"] = std::move(clamped);
  return j;
}

inline FitReport FitReportFromJson(const Json& j) {
  using namespace io_detail;
  try {
    FitReport r;
    r.sample_count = ReadCount(j, "sample_count");
    r.row_r2 = ReadArray(Field(j, "row_r2"));
    r.row_max_residual = ReadArray(Field(j, "row_max_residual"));
    r.power_r2 = ReadNumber(Field(j, "power_r2"));
    r.power_intercept = ReadNumber(Field(j, "power_intercept"));
    r.cost_coeffs = ReadArray(Field(j, "cost_coeffs"));
    for (const Json& c : Field(j, "clamped")) {
      r.clamped.push_back({c.at("matrix").get<std::string>().at(0), c.at("row").get<std::size_t>(),
                           c.at("col").get<std::size_t>(), ReadNumber(c.at("fitted"))});
    }
    return r;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
}

// Human-readable fit summary.
inline std::string FitSummary(const FitReport& r) {
  double worst_r2 = 1.0, worst_res = 0.0;
  for (double x : r.row_r2) worst_r2 = std::min(worst_r2, x);
  for (double x : r.row_max_residual) worst_res = std::max(worst_res, x);
  std::ostringstream os;
  os << "samples: " << r.sample_count << "\n"
     << "thermal rows: " << r.row_r2.size() << ", min R^2 " << worst_r2
     << ", max |residual| " << worst_res << "\n"
     << "power R^2 " << r.power_r2 << ", intercept " << r.power_intercept << "\n"
     << "clamped entries: " << r.clamped.size() << "\n";
  return os.str();
}

inline Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path + ": " + e.what());
  }
}

}  // namespace dccool
