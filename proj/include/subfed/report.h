// Copyright 2026 The subfed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef SUBFED_REPORT_H_
#define SUBFED_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "subfed/comm.h"
#include "subfed/fed.h"
#include "subfed/louvain.h"

namespace subfed {

// All run artefacts are JSON with a fixed key order; metrics are one JSON
// object per line.
inline constexpr const char* kMetricsFile = "metrics.jsonl";
inline constexpr const char* kLedgerFile = "ledger.json";
inline constexpr const char* kBudgetFile = "budget.json";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kPrototypesFile = "prototypes.json";

std::string metrics_line(const RoundLog& log);
void write_metrics(const std::vector<RoundLog>& rounds, std::ostream& out);
std::vector<RoundLog> read_metrics(std::istream& in);

void write_ledger(const CommLedger& ledger, std::ostream& out);
CommLedger read_ledger(std::istream& in);

void write_budget(const BudgetReport& report, std::ostream& out);
void write_prototypes(const std::vector<PrototypeSet>& sets, std::ostream& out);
void write_summary(const RunResult& result, std::ostream& out);

// Writes every artefact of one run into `dir` (created if needed).
void write_run(const RunResult& result, const std::filesystem::path& dir);

void write_partition_stats(const Graph& g, const Partition& p, std::ostream& out);
std::string partition_table(const Graph& g, const Partition& p);

// One completed run, rebuilt from its raw files.
struct RunRecord {
  std::filesystem::path dir;
  std::string variant;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  std::size_t generator_values = 0;
  std::size_t total_values = 0;  // both links, all phases
  bool budget_applicable = false;
  bool budget_ok = false;
  double epsilon = 0.0;
  double delta = 0.0;
};

RunRecord load_run(const std::filesystem::path& dir);
// Every directory below `root` (inclusive) holding a summary file; sorted by
// path. Throws ArgumentError when none is found.
std::vector<RunRecord> collect_runs(const std::filesystem::path& root);

struct VariantRow {
  std::string variant;
  std::size_t runs = 0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;  // population
  double generator_values = 0.0;
  double total_values = 0.0;
  bool budget_applicable = false;
  bool budget_violated = false;  // some run failed the degree precondition
  double epsilon = 0.0;  // worst over runs
  double delta = 0.0;
};

// Rows sorted by mean accuracy, best first; ties by name.
std::vector<VariantRow> aggregate_runs(const std::vector<RunRecord>& runs);
std::string render_report(const std::vector<VariantRow>& rows);
void write_report_json(const std::vector<VariantRow>& rows, std::ostream& out);

double mean_of(const std::vector<double>& xs);
double population_std(const std::vector<double>& xs);

}  // namespace subfed

#endif  // SUBFED_REPORT_H_
