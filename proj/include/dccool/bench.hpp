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

// Benchmark harness: per (family, D) cell, run every algorithm on `trials`
// instances and aggregate ratios to the exact optimum.
//
// Synthetic families draw a fresh instance per trial; data-center families
// perturb one fitted base instance per trial. Every random stream is derived
// from (master seed, family, D, trial[, algorithm]), so results do not depend
// on thread scheduling or on which other algorithms are selected.

#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dccool/core.hpp"
#include "dccool/exact.hpp"
#include "dccool/generators.hpp"
#include "dccool/heuristics.hpp"
#include "dccool/io.hpp"
#include "dccool/perturb.hpp"
#include "dccool/relaxation.hpp"
#include "dccool/rng.hpp"

namespace dccool {

enum class Algorithm { kSR, kGA, kH1, kH2, kBnB, kEnum, kLP };

inline const char* AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kSR: return "SR";
    case Algorithm::kGA: return "GA";
    case Algorithm::kH1: return "H1";
    case Algorithm::kH2: return "H2";
    case Algorithm::kBnB: return "BnB";
    case Algorithm::kEnum: return "Enum";
    case Algorithm::kLP: return "LP";
  }
  return "?";
}

inline std::optional<Algorithm> ParseAlgorithm(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Algorithm a : {Algorithm::kSR, Algorithm::kGA, Algorithm::kH1, Algorithm::kH2,
                      Algorithm::kBnB, Algorithm::kEnum, Algorithm::kLP}) {
    std::string name = AlgorithmName(a);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == name) return a;
  }
  return std::nullopt;
}

// Outcome of one algorithm on one instance. For kLP, rho is fractional and
// `solution` is empty.
struct AlgorithmOutput {
  double cost = 0.0;
  bool feasible = false;
  std::optional<Solution> solution;
  FractionalAssignment fractional;
  CoolingVector fractional_v;
};

inline AlgorithmOutput RunAlgorithm(const ProblemInstance& p, Algorithm alg, std::uint64_t seed) {
  AlgorithmOutput out;
  const auto take = [&](Solution s) {
    out.cost = s.cost;
    out.feasible = s.feasible;
    out.solution = std::move(s);
  };
  switch (alg) {
    case Algorithm::kSR: take(SimpleRounding(p)); break;
    case Algorithm::kGA: {
      GaParams g;
      g.seed = seed;
      take(GeneticAlgorithm(p, g));
      break;
    }
    case Algorithm::kH1: take(RunHeuristic(p, Variant::kH1, seed)); break;
    case Algorithm::kH2: take(RunHeuristic(p, Variant::kH2, seed)); break;
    case Algorithm::kBnB: take(BranchAndBound(p).solution); break;
    case Algorithm::kEnum: take(EnumerateExact(p)); break;
    case Algorithm::kLP: {
      RelaxationResult r = SolveRelaxation(p);
      out.cost = r.cost;
      out.feasible = false;
      out.fractional = std::move(r.rho);
      out.fractional_v = std::move(r.v);
      break;
    }
  }
  return out;
}

struct ExactOutcome {
  Solution solution;
  bool proven = true;
};

// Enumeration when C(n, D) is within `limit`, branch and bound otherwise.
inline ExactOutcome ExactReference(const ProblemInstance& p, double limit = kEnumerationLimit) {
  if (BinomialCount(p.n, p.demand) <= limit) return {EnumerateExact(p), true};
  BnbResult r = BranchAndBound(p);
  return {std::move(r.solution), r.proven};
}

inline constexpr double kPopTolerance = 1e-6;
inline constexpr const char* kTrialsEnvVar = "DCCOOL_TRIALS";

struct BenchConfig {
  Family family = Family::kCase1;
  std::vector<std::size_t> demands;
  std::vector<Algorithm> algorithms;
  std::size_t trials = 100;
  std::string trials_source = "default";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool timing = true;
  // Synthetic family overrides.
  std::optional<std::size_t> n, m, p;
  // Data-center regression sample count.
  std::size_t samples = 5000;
  double enumeration_limit = kEnumerationLimit;
};

// Applies the trial-count environment override when no explicit count was
// given. The source is echoed into every report.
inline void ApplyTrialsOverride(BenchConfig& cfg, bool explicit_trials) {
  if (explicit_trials) {
    cfg.trials_source = "flag";
    return;
  }
  if (const char* env = std::getenv(kTrialsEnvVar)) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      cfg.trials = static_cast<std::size_t>(v);
      cfg.trials_source = std::string("env ") + kTrialsEnvVar;
    }
  }
}

struct TrialResult {
  Algorithm algorithm = Algorithm::kSR;
  std::size_t trial = 0;
  std::uint64_t instance_seed = 0;
  double cost = 0.0;
  double exact_cost = 0.0;
  double ratio = 0.0;
  double wall_time = 0.0;
  bool feasible = false;
  bool exact_proven = true;
  bool error = false;
  std::string error_message;
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::kSR;
  double avg = 0.0;
  double wrc = 0.0;
  double pop = 0.0;
  double mean_time_s = 0.0;
  std::size_t trials = 0;  // trials with a ratio
  std::size_t errors = 0;
};

struct BenchCell {
  Family family = Family::kCase1;
  std::size_t demand = 0;
  std::vector<AlgorithmSummary> rows;
  std::vector<TrialResult> results;  // trial-major, algorithms in config order
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchCell> cells;
};

// cost / optimum; an optimum of zero gives 1 for a zero cost and inf otherwise.
inline double Ratio(double cost, double optimum) {
  if (optimum == 0.0) return std::abs(cost) <= 1e-12 ? 1.0 : kInf;
  return cost / optimum;
}

// avg / wrc / pop over the successful trials.
inline AlgorithmSummary Summarize(Algorithm alg, const std::vector<double>& ratios,
                                  const std::vector<double>& times, std::size_t errors) {
  AlgorithmSummary s;
  s.algorithm = alg;
  s.trials = ratios.size();
  s.errors = errors;
  if (ratios.empty()) return s;
  double sum = 0.0, t = 0.0;
  std::size_t hits = 0;
  s.wrc = -kInf;
  for (double r : ratios) {
    sum += r;
    s.wrc = std::max(s.wrc, r);
    if (r <= 1.0 + kPopTolerance) ++hits;
  }
  for (double x : times) t += x;
  s.avg = sum / static_cast<double>(ratios.size());
  s.pop = static_cast<double>(hits) / static_cast<double>(ratios.size());
  s.mean_time_s = times.empty() ? 0.0 : t / static_cast<double>(times.size());
  return s;
}

namespace bench_detail {

inline std::uint64_t CellSeed(const BenchConfig& cfg, std::size_t demand, std::size_t trial) {
  return DeriveSeed(cfg.seed, {HashString(FamilyName(cfg.family)), demand, trial});
}

inline ProblemInstance SyntheticInstance(const BenchConfig& cfg, std::size_t demand,
                                         std::uint64_t seed) {
  GeneratorSpec g;
  g.family = cfg.family;
  g.seed = seed;
  g.n = cfg.n;
  g.m = cfg.m;
  g.p = cfg.p;
  g.demand = demand;
  ProblemInstance p = Generate(g);
  p.demand = demand;
  return p;
}

inline double Seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace bench_detail

// Data-center base instance for a benchmark; `demand` is overwritten per cell.
inline ProblemInstance DatacenterBase(const BenchConfig& cfg) {
  DatacenterOptions opt;
  opt.size = cfg.family == Family::kDc25 ? 25 : cfg.family == Family::kDc50 ? 50 : 75;
  opt.samples = cfg.samples;
  opt.seed = DeriveSeed(cfg.seed, {HashString("dc-base")});
  return GenDatacenter(DefaultSyntheticModel(25, opt.seed), opt);
}

inline BenchReport RunBenchmark(const BenchConfig& cfg) {
  if (cfg.family == Family::kLemma1 || cfg.family == Family::kReduction) {
    throw Error(ErrorCode::kPreconditionViolated, "benchmark families: case1-3, lemma2, dc25/50/75");
  }
  BenchReport report;
  report.config = cfg;
  std::optional<ProblemInstance> base;
  if (IsDatacenter(cfg.family)) base = DatacenterBase(cfg);

  const std::size_t na = cfg.algorithms.size();
  for (std::size_t demand : cfg.demands) {
    BenchCell cell;
    cell.family = cfg.family;
    cell.demand = demand;
    cell.results.resize(cfg.trials * na);

    const auto run_trial = [&](std::size_t trial) {
      const std::uint64_t seed = bench_detail::CellSeed(cfg, demand, trial);
      TrialResult* slots = &cell.results[trial * na];
      for (std::size_t k = 0; k < na; ++k) {
        slots[k].algorithm = cfg.algorithms[k];
        slots[k].trial = trial;
        slots[k].instance_seed = seed;
      }
      ProblemInstance inst;
      double exact = 0.0;
      bool proven = true;
      try {
        if (base) {
          inst = Perturb(*base, 0.98, 1.02, seed);
          inst.demand = demand;
        } else {
          inst = bench_detail::SyntheticInstance(cfg, demand, seed);
        }
        Validate(inst);
        const ExactOutcome ref = ExactReference(inst, cfg.enumeration_limit);
        exact = ref.solution.cost;
        proven = ref.proven;
      } catch (const Error& e) {
        for (std::size_t k = 0; k < na; ++k) {
          slots[k].error = true;
          slots[k].error_message = std::string("reference: ") + e.what();
        }
        return;
      }
      for (std::size_t k = 0; k < na; ++k) {
        TrialResult& r = slots[k];
        r.exact_cost = exact;
        r.exact_proven = proven;
        const std::uint64_t alg_seed = DeriveSeed(
            cfg.seed, {HashString(FamilyName(cfg.family)), demand, trial, HashString(AlgorithmName(r.algorithm))});
        try {
          const auto t0 = std::chrono::steady_clock::now();
          AlgorithmOutput o = RunAlgorithm(inst, r.algorithm, alg_seed);
          const auto t1 = std::chrono::steady_clock::now();
          r.wall_time = cfg.timing ? bench_detail::Seconds(t0, t1) : 0.0;
          r.cost = o.cost;
          r.feasible = o.feasible;
          r.ratio = Ratio(o.cost, exact);
        } catch (const Error& e) {
          r.error = true;
          r.error_message = e.what();
        }
      }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.threads, cfg.trials));
    if (workers == 1) {
      for (std::size_t t = 0; t < cfg.trials; ++t) run_trial(t);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t t = next++; t < cfg.trials; t = next++) run_trial(t);
        });
      }
      for (auto& th : pool) th.join();
    }

    for (std::size_t k = 0; k < na; ++k) {
      std::vector<double> ratios, times;
      std::size_t errors = 0;
      for (std::size_t t = 0; t < cfg.trials; ++t) {
        const TrialResult& r = cell.results[t * na + k];
        if (r.error) {
          ++errors;
          continue;
        }
        ratios.push_back(r.ratio);
        times.push_back(r.wall_time);
      }
      cell.rows.push_back(Summarize(cfg.algorithms[k], ratios, times, errors));
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

enum class ReportFormat { kCsv, kMarkdown, kJson };

inline std::optional<ReportFormat> ParseReportFormat(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  if (s == "json") return ReportFormat::kJson;
  return std::nullopt;
}

inline constexpr const char* kCsvHeader = "family,D,algorithm,avg,wrc,pop,mean_time_s,trials,errors";

namespace bench_detail {

inline std::string Fixed(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

struct Row {
  std::string family, demand, algorithm, avg, wrc, pop, time, trials, errors;
};

inline std::vector<Row> Rows(const BenchReport& report) {
  std::vector<Row> rows;
  for (const BenchCell& c : report.cells) {
    for (const AlgorithmSummary& s : c.rows) {
      rows.push_back({FamilyName(c.family), std::to_string(c.demand), AlgorithmName(s.algorithm),
                      Fixed(s.avg, 6), Fixed(s.wrc, 6), Fixed(s.pop, 6), Fixed(s.mean_time_s, 6),
                      std::to_string(s.trials), std::to_string(s.errors)});
    }
  }
  return rows;
}

}  // namespace bench_detail

inline std::string EmitReport(const BenchReport& report, ReportFormat format) {
  const auto rows = bench_detail::Rows(report);
  std::string out;
  switch (format) {
    case ReportFormat::kCsv: {
      out = std::string(kCsvHeader) + "\n";
      for (const auto& r : rows) {
        out += r.family + "," + r.demand + "," + r.algorithm + "," + r.avg + "," + r.wrc + "," + r.pop +
               "," + r.time + "," + r.trials + "," + r.errors + "\n";
      }
      break;
    }
    case ReportFormat::kMarkdown: {
      const BenchConfig& c = report.config;
      out = "seed " + std::to_string(c.seed) + ", trials " + std::to_string(c.trials) + " (" +
            c.trials_source + ")\n\n";
      out += "| family | D | algorithm | avg | wrc | pop | mean_time_s | trials | errors |\n";
      out += "|---|---|---|---|---|---|---|---|---|\n";
      for (const auto& r : rows) {
        out += "| " + r.family + " | " + r.demand + " | " + r.algorithm + " | " + r.avg + " | " + r.wrc +
               " | " + r.pop + " | " + r.time + " | " + r.trials + " | " + r.errors + " |\n";
      }
      break;
    }
    case ReportFormat::kJson: {
      Json j;
      const BenchConfig& c = report.config;
      Json algs = Json::array();
      for (Algorithm a : c.algorithms) algs.push_back(AlgorithmName(a));
      j["config"] = {{"family", FamilyName(c.family)}, {"demands", c.demands}, {"algorithms", algs},
                     {"trials", c.trials}, {"trials_source", c.trials_source}, {"seed", c.seed},
                     {"timing", c.timing}};
      Json table = Json::array();
      for (const BenchCell& cell : report.cells) {
        for (const AlgorithmSummary& s : cell.rows) {
          table.push_back({{"family", FamilyName(cell.family)}, {"D", cell.demand},
                           {"algorithm", AlgorithmName(s.algorithm)}, {"avg", io_detail::Number(s.avg)},
                           {"wrc", io_detail::Number(s.wrc)}, {"pop", io_detail::Number(s.pop)},
                           {"mean_time_s", io_detail::Number(s.mean_time_s)}, {"trials", s.trials},
                           {"errors", s.errors}});
        }
      }
      j["rows"] = std::move(table);
      out = j.dump(2) + "\n";
      break;
    }
  }
  return out;
}

// Inverse of the JSON table rows; used to check round trips.
inline std::vector<AlgorithmSummary> SummariesFromJson(const Json& j) {
  std::vector<AlgorithmSummary> out;
  for (const Json& r : j.at("rows")) {
    AlgorithmSummary s;
    const auto alg = ParseAlgorithm(r.at("algorithm").get<std::string>());
    if (!alg) throw Error(ErrorCode::kParse, "unknown algorithm in report");
    s.algorithm = *alg;
    s.avg = io_detail::ReadNumber(r.at("avg"));
    s.wrc = io_detail::ReadNumber(r.at("wrc"));
    s.pop = io_detail::ReadNumber(r.at("pop"));
    s.mean_time_s = io_detail::ReadNumber(r.at("mean_time_s"));
    s.trials = r.at("trials").get<std::size_t>();
    s.errors = r.at("errors").get<std::size_t>();
    out.push_back(s);
  }
  return out;
}

}  // namespace dccool
