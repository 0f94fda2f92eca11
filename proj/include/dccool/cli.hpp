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

// Command-line front end. Exit codes: 0 success, 1 usage or input error,
// 2 solver error.

#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dccool/bench.hpp"
#include "dccool/core.hpp"
#include "dccool/generators.hpp"
#include "dccool/io.hpp"
#include "dccool/surrogate.hpp"

namespace dccool {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;

namespace cli_detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

inline std::vector<std::size_t> ParseCountList(const std::string& s) {
  // Accepts "3", "2,4,6" and ranges "1-5".
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dash = tok.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoul(tok));
      } else {
        const std::size_t lo = std::stoul(tok.substr(0, dash));
        const std::size_t hi = std::stoul(tok.substr(dash + 1));
        if (hi < lo) throw UsageError("bad range " + tok);
        for (std::size_t d = lo; d <= hi; ++d) out.push_back(d);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad count list '" + s + "'");
    }
  }
  if (out.empty()) throw UsageError("empty count list");
  return out;
}

inline Json FractionalSolutionJson(const ProblemInstance& p, const Vector& rho, const Vector& v,
                                   double cost, double max_violation, double tol, double wall) {
  Json j;
  j["format"] = kSolutionFormat;
  j["rho"] = io_detail::Array(rho);
  j["v"] = io_detail::Array(v);
  j["cost"] = io_detail::Number(cost);
  bool in_box = true;
  for (std::size_t k = 0; k < p.m; ++k) in_box = in_box && v[k] >= p.v_lb[k] - tol && v[k] <= p.v_ub[k] + tol;
  j["feasible"] = in_box && max_violation <= tol;
  j["max_violation"] = io_detail::Number(max_violation);
  j["wall_time"] = io_detail::Number(wall);
  return j;
}

struct CompareRow {
  std::size_t demand = 0;
  double binary_linear_cost = 0.0;
  double binary_predicted_power = 0.0;
  double binary_true_power = 0.0;
  double binary_temp_margin = 0.0;
  bool binary_feasible = false;
  double continuous_linear_cost = 0.0;
  double continuous_predicted_power = 0.0;
  double continuous_true_power = 0.0;
  double continuous_temp_margin = 0.0;
  bool continuous_feasible = false;
  std::string error;
};

}  // namespace cli_detail

// Binary two-red-line H2 versus the continuous single-red-line LP on one
// fitted instance, for every demand 1..n-1. Predicted power adds the fitted
// power intercept to the linear cost; true power comes from the model.
inline std::vector<cli_detail::CompareRow> RunCompare(const NonlinearModel& model, std::size_t samples,
                                                      std::uint64_t seed, double t_idle, double t_busy,
                                                      double delta) {
  const SampleSet set = SampleModel(model, samples, seed);
  const FitResult fit = FitLinear(set, t_idle, t_busy, 0);
  std::vector<cli_detail::CompareRow> rows;
  for (std::size_t d = 1; d < model.n; ++d) {
    cli_detail::CompareRow r;
    r.demand = d;
    try {
      ProblemInstance inst = WithSafetyMargin(fit.instance, delta);
      inst.demand = d;
      const Solution h2 = RunHeuristic(inst, Variant::kH2, DeriveSeed(seed, {d}));
      r.binary_linear_cost = h2.cost;
      r.binary_predicted_power = h2.cost + fit.report.power_intercept;
      const Vector v_raw = Denormalize(h2.v, fit.report.cost_coeffs);
      const ModelEvaluation e = EvaluateOnModel(model, v_raw, h2.rho.as_vector(), t_idle, t_busy, d);
      r.binary_true_power = e.true_power;
      r.binary_temp_margin = e.temp_margin;
      r.binary_feasible = e.feasible;

      const ContinuousSolution c = SolveContinuousSingleRedline(inst);
      r.continuous_linear_cost = c.cost;
      r.continuous_predicted_power = c.cost + fit.report.power_intercept;
      const Vector c_raw = Denormalize(c.v, fit.report.cost_coeffs);
      // One red line at t_busy for every server.
      const ModelEvaluation ec = EvaluateOnModel(model, c_raw, c.rho, t_busy, t_busy, d);
      r.continuous_true_power = ec.true_power;
      r.continuous_temp_margin = ec.temp_margin;
      r.continuous_feasible = ec.feasible;
    } catch (const Error& e) {
      r.error = e.what();
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline constexpr const char* kCompareHeader =
    "D,binary_linear_cost,binary_predicted_power,binary_true_power,binary_temp_margin,binary_feasible,"
    "continuous_linear_cost,continuous_predicted_power,continuous_true_power,continuous_temp_margin,"
    "continuous_feasible,error";

inline std::string EmitCompare(const std::vector<cli_detail::CompareRow>& rows, ReportFormat format) {
  using bench_detail::Fixed;
  if (format == ReportFormat::kJson) {
    Json arr = Json::array();
    for (const auto& r : rows) {
      arr.push_back({{"D", r.demand},
                     {"binary_linear_cost", io_detail::Number(r.binary_linear_cost)},
                     {"binary_predicted_power", io_detail::Number(r.binary_predicted_power)},
                     {"binary_true_power", io_detail::Number(r.binary_true_power)},
                     {"binary_temp_margin", io_detail::Number(r.binary_temp_margin)},
                     {"binary_feasible", r.binary_feasible},
                     {"continuous_linear_cost", io_detail::Number(r.continuous_linear_cost)},
                     {"continuous_predicted_power", io_detail::Number(r.continuous_predicted_power)},
                     {"continuous_true_power", io_detail::Number(r.continuous_true_power)},
                     {"continuous_temp_margin", io_detail::Number(r.continuous_temp_margin)},
                     {"continuous_feasible", r.continuous_feasible},
                     {"error", r.error}});
    }
    return Json{{"rows", arr}}.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.demand), Fixed(r.binary_linear_cost, 4),
                     Fixed(r.binary_predicted_power, 4), Fixed(r.binary_true_power, 4),
                     Fixed(r.binary_temp_margin, 4), r.binary_feasible ? "1" : "0",
                     Fixed(r.continuous_linear_cost, 4), Fixed(r.continuous_predicted_power, 4),
                     Fixed(r.continuous_true_power, 4), Fixed(r.continuous_temp_margin, 4),
                     r.continuous_feasible ? "1" : "0", r.error});
  }
  std::string out;
  if (format == ReportFormat::kCsv) {
    out = std::string(kCompareHeader) + "\n";
    for (const auto& c : cells) {
      for (std::size_t k = 0; k < c.size(); ++k) out += (k ? "," : "") + c[k];
      out += "\n";
    }
    return out;
  }
  std::string header = kCompareHeader;
  out = "|";
  std::size_t cols = 0;
  std::stringstream hs(header);
  std::string h;
  while (std::getline(hs, h, ',')) {
    out += " " + h + " |";
    ++cols;
  }
  out += "\n|";
  for (std::size_t k = 0; k < cols; ++k) out += "---|";
  out += "\n";
  for (const auto& c : cells) {
    out += "|";
    for (const auto& x : c) out += " " + x + " |";
    out += "\n";
  }
  return out;
}

inline int CliMain(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  using namespace cli_detail;
  CLI::App app{"dccool: cooling-aware workload placement toolkit", "dccool"};
  app.require_subcommand(1);
  std::string output;

  // gen
  auto* gen = app.add_subcommand("gen", "generate an instance");
  GeneratorSpec gs;
  std::string family_name;
  std::size_t n = 0, m = 0, p = 0, demand = 0;
  double a = 0, b = 0, q = 0, v_lb = 0;
  std::string b_matrix_path;
  gen->add_option("--family", family_name, "case1|case2|case3|lemma1|lemma2|dc25|dc50|dc75|reduction")->required();
  gen->add_option("--seed", gs.seed, "generator seed");
  auto* o_n = gen->add_option("--n", n, "servers");
  auto* o_m = gen->add_option("--m", m, "cooling variables");
  auto* o_p = gen->add_option("--p", p, "ones per row of B");
  auto* o_d = gen->add_option("--demand", demand, "busy servers D");
  auto* o_a = gen->add_option("--a", a, "red-line gap t_idle - t_busy");
  auto* o_b = gen->add_option("--b", b, "idle red line");
  auto* o_q = gen->add_option("--q", q, "cooling entry (lemma1)");
  auto* o_v = gen->add_option("--v-lb", v_lb, "cooling lower bound (lemma1)");
  gen->add_flag("--adversarial", gs.adversarial, "lemma1: put the good servers last");
  gen->add_option("--samples", gs.samples, "regression samples (dc families)");
  gen->add_option("--b-matrix", b_matrix_path, "reduction: JSON file with a 0/1 matrix");
  gen->add_option("-o,--output", output, "output file (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance");
  std::string instance_path, alg_name;
  std::size_t solve_demand = 0;
  std::uint64_t solve_seed = 0;
  solve->add_option("instance", instance_path, "instance JSON")->required();
  solve->add_option("--alg", alg_name, "sr|ga|h1|h2|bnb|enum|lp|single-redline")->required();
  auto* o_sd = solve->add_option("--demand", solve_demand, "override the instance demand");
  solve->add_option("--seed", solve_seed, "algorithm seed");
  solve->add_option("-o,--output", output, "output file (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "run the benchmark harness");
  BenchConfig cfg;
  std::string bench_family = "case1", demand_list, alg_list = "sr,ga,h1,h2", format_name = "csv";
  bool no_timing = false;
  std::size_t bn = 0, bm = 0, bp = 0;
  bench->add_option("--family", bench_family, "benchmark family");
  bench->add_option("--demands", demand_list, "D values, e.g. 2,3,4 or 2-6")->required();
  bench->add_option("--algorithms", alg_list, "comma-separated algorithm ids");
  auto* o_trials = bench->add_option("--trials", cfg.trials, "trials per cell");
  bench->add_option("--seed", cfg.seed, "master seed");
  bench->add_option("--threads", cfg.threads, "worker threads");
  bench->add_option("--format", format_name, "csv|markdown|json");
  bench->add_flag("--no-timing", no_timing, "write 0 for timings (byte-stable output)");
  auto* o_bn = bench->add_option("--n", bn, "servers (synthetic families)");
  auto* o_bm = bench->add_option("--m", bm, "cooling variables (synthetic families)");
  auto* o_bp = bench->add_option("--p", bp, "window (synthetic families)");
  bench->add_option("--samples", cfg.samples, "regression samples (dc families)");
  bench->add_option("-o,--output", output, "output file (default stdout)");

  // surrogate
  auto* sur = app.add_subcommand("surrogate", "nonlinear model tools");
  sur->require_subcommand(1);
  auto* s_model = sur->add_subcommand("model", "emit a synthetic model");
  ModelSpec mspec;
  std::string mode_name = "tied";
  s_model->add_option("--n", mspec.params.n, "servers");
  s_model->add_option("--seed", mspec.params.seed, "model seed");
  s_model->add_option("--mode", mode_name, "tied|split");
  s_model->add_option("-o,--output", output, "output file (default stdout)");

  auto* s_fit = sur->add_subcommand("fit", "regress a model into an instance");
  std::string model_path, report_path;
  std::size_t samples = 5000, fit_demand = 0;
  std::uint64_t sample_seed = 0;
  double t_idle = 35.0, t_busy = 27.0, delta = 0.0;
  bool text_report = false;
  s_fit->add_option("--model", model_path, "model JSON (default: built-in model)");
  s_fit->add_option("--samples", samples, "sample count");
  s_fit->add_option("--seed", sample_seed, "sampling seed");
  s_fit->add_option("--t-idle", t_idle, "idle red line");
  s_fit->add_option("--t-busy", t_busy, "busy red line");
  s_fit->add_option("--demand", fit_demand, "demand D of the instance");
  s_fit->add_option("--delta", delta, "safety margin subtracted from both red lines");
  s_fit->add_option("--report", report_path, "write the fit report JSON here");
  s_fit->add_flag("--text", text_report, "print a readable fit summary to stderr");
  s_fit->add_option("-o,--output", output, "output file (default stdout)");

  auto* s_eval = sur->add_subcommand("eval", "score a solution on a model");
  std::string solution_path, fit_report_path;
  s_eval->add_option("--model", model_path, "model JSON (default: built-in model)");
  s_eval->add_option("--solution", solution_path, "solution JSON")->required();
  s_eval->add_option("--fit-report", fit_report_path, "fit report; maps normalized v back to model units");
  s_eval->add_option("--t-idle", t_idle, "idle red line");
  s_eval->add_option("--t-busy", t_busy, "busy red line");
  s_eval->add_option("--demand", fit_demand, "demand D");
  s_eval->add_option("-o,--output", output, "output file (default stdout)");

  auto* s_cmp = sur->add_subcommand("compare", "binary two-red-line vs continuous single-red-line");
  std::string cmp_format = "csv";
  s_cmp->add_option("--model", model_path, "model JSON (default: built-in model)");
  s_cmp->add_option("--samples", samples, "sample count");
  s_cmp->add_option("--seed", sample_seed, "sampling seed");
  s_cmp->add_option("--t-idle", t_idle, "idle red line");
  s_cmp->add_option("--t-busy", t_busy, "busy red line");
  s_cmp->add_option("--delta", delta, "safety margin");
  s_cmp->add_option("--format", cmp_format, "csv|markdown|json");
  s_cmp->add_option("-o,--output", output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os, es;
    const int code = app.exit(e, os, es);
    out << os.str();
    err << es.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto load_model = [&](FanMode fallback) {
    if (model_path.empty()) return DefaultSyntheticModel(25, 0, fallback);
    return BuildModel(ModelSpecFromJson(ReadJsonFile(model_path)));
  };

  // Input and parameter problems are usage errors; failures inside a solver
  // are solver errors.
  bool solving = false;
  try {
    if (gen->parsed()) {
      const auto fam = ParseFamily(family_name);
      if (!fam) throw UsageError("unknown family '" + family_name + "'");
      gs.family = *fam;
      if (*o_n) gs.n = n;
      if (*o_m) gs.m = m;
      if (*o_p) gs.p = p;
      if (*o_d) gs.demand = demand;
      if (*o_a) gs.a = a;
      if (*o_b) gs.b = b;
      if (*o_q) gs.q = q;
      if (*o_v) gs.v_lb = v_lb;
      if (gs.family == Family::kReduction) {
        if (b_matrix_path.empty()) throw UsageError("reduction needs --b-matrix");
        const Json j = ReadJsonFile(b_matrix_path);
        const std::size_t rows = j.size();
        gs.reduction_b = io_detail::ReadMatrix(j, rows, rows);
      }
      Emit(ToJson(Generate(gs)).dump(2) + "\n", output, out);
      return kExitOk;
    }

    if (solve->parsed()) {
      ProblemInstance inst = InstanceFromJson(ReadJsonFile(instance_path));
      if (*o_sd) {
        if (solve_demand > inst.n) throw UsageError("demand exceeds n");
        inst.demand = solve_demand;
      }
      solving = true;
      const auto t0 = std::chrono::steady_clock::now();
      Json j;
      if (alg_name == "single-redline") {
        const ContinuousSolution c = SolveContinuousSingleRedline(inst);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const Vector t = InletTemperatures(inst, c.v, c.rho);
        double viol = 0.0;
        for (double x : t) viol = std::max(viol, x - inst.t_busy);
        j = FractionalSolutionJson(inst, c.rho, c.v, c.cost, viol, kFeasibilityTol, wall);
      } else {
        const auto alg = ParseAlgorithm(alg_name);
        if (!alg) throw UsageError("unknown algorithm '" + alg_name + "'");
        const AlgorithmOutput o = RunAlgorithm(inst, *alg, solve_seed);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.solution) {
          j = ToJson(*o.solution, wall);
        } else {
          j = FractionalSolutionJson(inst, o.fractional, o.fractional_v, o.cost,
                                     MaxViolation(inst, o.fractional_v, o.fractional), kFeasibilityTol, wall);
        }
      }
      Emit(j.dump(2) + "\n", output, out);
      return kExitOk;
    }

    if (bench->parsed()) {
      const auto fam = ParseFamily(bench_family);
      if (!fam) throw UsageError("unknown family '" + bench_family + "'");
      cfg.family = *fam;
      cfg.demands = ParseCountList(demand_list);
      std::stringstream ss(alg_list);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        const auto alg = ParseAlgorithm(tok);
        if (!alg) throw UsageError("unknown algorithm '" + tok + "'");
        cfg.algorithms.push_back(*alg);
      }
      if (cfg.algorithms.empty()) throw UsageError("no algorithms given");
      const auto fmt = ParseReportFormat(format_name);
      if (!fmt) throw UsageError("unknown format '" + format_name + "'");
      if (*o_bn) cfg.n = bn;
      if (*o_bm) cfg.m = bm;
      if (*o_bp) cfg.p = bp;
      cfg.timing = !no_timing;
      ApplyTrialsOverride(cfg, static_cast<bool>(*o_trials));
      if (cfg.trials_source != "default") err << "trials: " << cfg.trials << " (" << cfg.trials_source << ")\n";
      solving = true;
      const BenchReport report = RunBenchmark(cfg);
      Emit(EmitReport(report, *fmt), output, out);
      return kExitOk;
    }

    if (s_model->parsed()) {
      if (mode_name != "tied" && mode_name != "split") throw UsageError("mode must be tied or split");
      mspec.mode = mode_name == "tied" ? FanMode::kTied : FanMode::kSplit;
      Emit(ToJson(mspec).dump(2) + "\n", output, out);
      return kExitOk;
    }

    if (s_fit->parsed()) {
      const NonlinearModel model = load_model(FanMode::kTied);
      if (fit_demand > model.n) throw UsageError("demand exceeds n");
      solving = true;
      const FitResult fit = FitLinear(SampleModel(model, samples, sample_seed), t_idle, t_busy, fit_demand);
      if (!report_path.empty()) Emit(ToJson(fit.report).dump(2) + "\n", report_path, out);
      if (text_report) err << FitSummary(fit.report);
      Emit(ToJson(WithSafetyMargin(fit.instance, delta)).dump(2) + "\n", output, out);
      return kExitOk;
    }

    if (s_eval->parsed()) {
      const NonlinearModel model = load_model(FanMode::kTied);
      const SolutionRecord sol = SolutionFromJson(ReadJsonFile(solution_path));
      Vector v = sol.v;
      if (!fit_report_path.empty()) {
        const FitReport rep = FitReportFromJson(ReadJsonFile(fit_report_path));
        if (rep.cost_coeffs.size() != v.size()) throw UsageError("fit report does not match the solution");
        v = Denormalize(v, rep.cost_coeffs);
      }
      if (v.size() != model.m || sol.rho.size() != model.n) throw UsageError("solution does not match the model");
      const ModelEvaluation e = EvaluateOnModel(model, v, sol.rho, t_idle, t_busy, fit_demand);
      Json j{{"true_power", io_detail::Number(e.true_power)},
             {"temp_margin", io_detail::Number(e.temp_margin)},
             {"feasible", e.feasible}};
      Emit(j.dump(2) + "\n", output, out);
      return kExitOk;
    }

    if (s_cmp->parsed()) {
      const auto fmt = ParseReportFormat(cmp_format);
      if (!fmt) throw UsageError("unknown format '" + cmp_format + "'");
      const NonlinearModel model = load_model(FanMode::kTied);
      solving = true;
      Emit(EmitCompare(RunCompare(model, samples, sample_seed, t_idle, t_busy, delta), *fmt), output, out);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    if (!solving || e.code() == ErrorCode::kParse) return kExitUsage;
    return kExitSolver;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace dccool
