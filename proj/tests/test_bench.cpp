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


#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "dccool/bench.hpp"
#include "dccool/io.hpp"
#include "test_support.hpp"

namespace dccool {
namespace {

std::size_t Count(const std::string& s, char c) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), c)); }

BenchConfig SmallConfig() {
  BenchConfig cfg;
  cfg.family = Family::kCase3;
  cfg.demands = {3, 5};
  cfg.algorithms = {Algorithm::kSR, Algorithm::kH2, Algorithm::kGA};
  cfg.trials = 4;
  cfg.n = 10;
  cfg.seed = 77;
  cfg.timing = false;
  return cfg;
}

TEST(Metrics, Summaries) {
  const AlgorithmSummary s = Summarize(Algorithm::kSR, {Ratio(1, 1), Ratio(2, 1)}, {0.5, 1.5}, 1);
  EXPECT_DOUBLE_EQ(s.avg, 1.5);
  EXPECT_DOUBLE_EQ(s.wrc, 2.0);
  EXPECT_DOUBLE_EQ(s.pop, 0.5);
  EXPECT_DOUBLE_EQ(s.mean_time_s, 1.0);
  EXPECT_EQ(s.trials, 2u);
  EXPECT_EQ(s.errors, 1u);
  const AlgorithmSummary all = Summarize(Algorithm::kH2, {1.0, 1.0 + 1e-8, 1.0}, {}, 0);
  EXPECT_NEAR(all.avg, 1.0, 1e-8);
  EXPECT_EQ(all.pop, 1.0);
}

TEST(Metrics, ZeroOptimum) {
  EXPECT_EQ(Ratio(0.0, 0.0), 1.0);
  EXPECT_EQ(Ratio(0.1, 0.0), kInf);
}

TEST(Parse, Names) {
  EXPECT_EQ(ParseAlgorithm("h2"), Algorithm::kH2);
  EXPECT_EQ(ParseAlgorithm("BnB"), Algorithm::kBnB);
  EXPECT_FALSE(ParseAlgorithm("simplex"));
  EXPECT_EQ(ParseReportFormat("markdown"), ReportFormat::kMarkdown);
  EXPECT_FALSE(ParseReportFormat("xml"));
}

TEST(Emit, EmptyCsvIsHeader) {
  BenchReport r;
  EXPECT_EQ(EmitReport(r, ReportFormat::kCsv), std::string(kCsvHeader) + "\n");
}

TEST(Emit, FormatsAgree) {
  const BenchReport r = RunBenchmark(SmallConfig());
  ASSERT_EQ(r.cells.size(), 2u);
  const std::string csv = EmitReport(r, ReportFormat::kCsv);
  EXPECT_EQ(Count(csv, '\n'), 1u + 6u);
  const std::string md = EmitReport(r, ReportFormat::kMarkdown);
  std::istringstream lines(md);
  std::string line;
  std::size_t table = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] != '|') continue;
    EXPECT_EQ(Count(line, '|'), 10u) << line;
    ++table;
  }
  EXPECT_EQ(table, 2u + 6u);
  EXPECT_NE(md.find("seed 77"), std::string::npos);

  const auto back = SummariesFromJson(Json::parse(EmitReport(r, ReportFormat::kJson)));
  ASSERT_EQ(back.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    const AlgorithmSummary& s = r.cells[k / 3].rows[k % 3];
    EXPECT_EQ(back[k].algorithm, s.algorithm);
    EXPECT_EQ(back[k].avg, s.avg);
    EXPECT_EQ(back[k].wrc, s.wrc);
    EXPECT_EQ(back[k].pop, s.pop);
    EXPECT_EQ(back[k].trials, s.trials);
  }
}

TEST(Benchmark, ResultsAreSane) {
  const BenchReport r = RunBenchmark(SmallConfig());
  for (const BenchCell& cell : r.cells) {
    EXPECT_EQ(cell.results.size(), 4u * 3u);
    for (const TrialResult& t : cell.results) {
      EXPECT_FALSE(t.error) << t.error_message;
      EXPECT_TRUE(t.feasible);
      EXPECT_GE(t.ratio, 1.0 - 1e-9);
      EXPECT_EQ(t.wall_time, 0.0);
    }
    for (const AlgorithmSummary& s : cell.rows) {
      EXPECT_GE(s.avg, 1.0 - 1e-9);
      EXPECT_LE(s.avg, s.wrc + 1e-12);
      EXPECT_GE(s.pop, 0.0);
      EXPECT_LE(s.pop, 1.0);
    }
  }
}

TEST(Benchmark, DeterministicAcrossThreads) {
  BenchConfig cfg = SmallConfig();
  const std::string one = EmitReport(RunBenchmark(cfg), ReportFormat::kCsv);
  cfg.threads = 3;
  EXPECT_EQ(EmitReport(RunBenchmark(cfg), ReportFormat::kCsv), one);
  cfg.seed = 78;
  EXPECT_NE(EmitReport(RunBenchmark(cfg), ReportFormat::kCsv), one);
}

TEST(Benchmark, TrialsOverride) {
  BenchConfig cfg;
  ::setenv(kTrialsEnvVar, "7", 1);
  ApplyTrialsOverride(cfg, false);
  EXPECT_EQ(cfg.trials, 7u);
  EXPECT_EQ(cfg.trials_source, "env DCCOOL_TRIALS");
  BenchConfig flagged;
  flagged.trials = 3;
  ApplyTrialsOverride(flagged, true);
  EXPECT_EQ(flagged.trials, 3u);
  EXPECT_EQ(flagged.trials_source, "flag");
  ::setenv(kTrialsEnvVar, "lots", 1);
  BenchConfig bad;
  ApplyTrialsOverride(bad, false);
  EXPECT_EQ(bad.trials, 100u);
  ::unsetenv(kTrialsEnvVar);
}

// The adversarial rounding of the circulant family shows up at scale.
TEST(Benchmark, Case2SimpleRoundingIsSuboptimal) {
  BenchConfig cfg;
  cfg.family = Family::kCase2;
  cfg.demands = {11};
  cfg.algorithms = {Algorithm::kSR};
  cfg.trials = 5;
  cfg.seed = 1;
  cfg.timing = false;
  const BenchReport r = RunBenchmark(cfg);
  const AlgorithmSummary& s = r.cells[0].rows[0];
  EXPECT_EQ(s.errors, 0u);
  EXPECT_GT(s.avg, 1.01);
}

TEST(RunAlgorithm, LpIsALowerBound) {
  const ProblemInstance p = testing::SmallCase3(4, 10, 4);
  const double exact = ExactReference(p).solution.cost;
  const AlgorithmOutput lp = RunAlgorithm(p, Algorithm::kLP, 0);
  EXPECT_LE(lp.cost, exact + 1e-9);
  EXPECT_FALSE(lp.solution);
  EXPECT_EQ(lp.fractional.size(), 10u);
  for (Algorithm a : {Algorithm::kSR, Algorithm::kGA, Algorithm::kH1, Algorithm::kH2, Algorithm::kBnB,
                      Algorithm::kEnum}) {
    const AlgorithmOutput o = RunAlgorithm(p, a, 3);
    ASSERT_TRUE(o.solution);
    EXPECT_TRUE(o.feasible);
    EXPECT_GE(o.cost, exact - 1e-9);
  }
}

TEST(InstanceJson, RoundTrip) {
  const ProblemInstance p = testing::SmallCase3(6, 8, 3);
  const ProblemInstance q = InstanceFromJson(Json::parse(ToJson(p).dump()));
  EXPECT_EQ(q.A.data(), p.A.data());
  EXPECT_EQ(q.B.data(), p.B.data());
  EXPECT_EQ(q.E, p.E);
  EXPECT_EQ(q.v_ub, p.v_ub);
  EXPECT_EQ(q.demand, p.demand);
  GeneratorSpec g;
  g.family = Family::kReduction;
  g.reduction_b = CirculantOnes(6, 2);
  g.demand = 2;
  const ProblemInstance inf = Generate(g);
  EXPECT_EQ(InstanceFromJson(Json::parse(ToJson(inf).dump())).v_ub[0], kInf);
  EXPECT_THROW(InstanceFromJson(Json::parse(R"({"format":"dc-coolopt/1","n":2})")), Error);
}

}  // namespace
}  // namespace dccool
