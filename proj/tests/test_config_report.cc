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
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "subfed/config.h"
#include "subfed/errors.h"
#include "subfed/report.h"

using namespace subfed;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("subfed_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const Graph& fixture() {
  static const Graph g = load_graph(std::string(SUBFED_TEST_DATA) + "/sbm120.graph");
  return g;
}

ExperimentConfig tiny(Variant v, std::uint64_t seed) {
  ExperimentConfig c;
  c.variant = v;
  c.embed_dim = 8;
  c.prototypes = 4;
  c.pretrain_epochs = 2;
  c.rounds = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  std::istringstream empty("");
  const ExperimentConfig d = parse_config(empty);
  CHECK(d.clients == 3);
  CHECK(d.fanout == 5);
  CHECK(d.batch_size == 32);
  CHECK(d.learning_rate == 0.1);
  CHECK(d.impair_ratio == 0.5);
  CHECK(d.sampler_rate == 0.5);
  CHECK(d.delta_prime == 1e-4);
  CHECK(d.max_count == 5);
  CHECK(d.variant == Variant::kFedDep);

  std::istringstream in(
      "# comment\n"
      "dataset = data/cora.graph\n"
      "clients=5\n"
      "  variant = fedavg  \n"
      "fedavg_weighting = uniform\n"
      "printed_delta = true\n"
      "seed = 99\n");
  const ExperimentConfig c = parse_config(in);
  CHECK(c.dataset == "data/cora.graph");
  CHECK(c.clients == 5);
  CHECK(c.variant == Variant::kFedAvg);
  CHECK(c.weighting == FedAvgWeighting::kUniform);
  CHECK(c.printed_delta);
  CHECK(c.seed == 99);
}

TEST_CASE("config errors") {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_config(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("clients = 3\nbogus = 1\n") == 2);
  CHECK(line_of("clients = three\n") == 1);
  CHECK(line_of("\n\nvariant = fedsage\n") == 3);
  CHECK(line_of("no equals sign\n") == 1);
  CHECK(line_of("printed_delta = maybe\n") == 1);

  ExperimentConfig c;
  c.validate();
  c.sampler_rate = 1.5;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = {};
  c.impair_ratio = 1.0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = {};
  c.rounds = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("config write and parse round-trip") {
  ExperimentConfig c;
  c.dataset = "x.graph";
  c.clients = 7;
  c.variant = Variant::kFedDepNoProto;
  c.learning_rate = 0.05;
  c.weighting = FedAvgWeighting::kUniform;
  c.seed = 1234567890123ULL;
  std::ostringstream out;
  write_config(c, out);
  std::istringstream in(out.str());
  const ExperimentConfig back = parse_config(in);
  std::ostringstream again;
  write_config(back, again);
  CHECK(again.str() == out.str());
  CHECK(back.seed == c.seed);
  for (const char* name : {"local", "fedavg", "feddep_no_dgen", "feddep_no_proto", "feddep"})
    CHECK(variant_name(*parse_variant(name)) == name);
  CHECK_FALSE(parse_variant("fedsage").has_value());
}

TEST_CASE("metrics and ledger round-trip losslessly") {
  std::vector<RoundLog> logs(2);
  logs[0] = {1, {0.1, 1.0 / 3.0}, {}, 0.25, 0.5, 0.012345678901234};
  logs[1] = {2, {0.05, 2.0 / 7.0}, {1e-300, 3.5}, 0.75, 0.875, 1.5};
  std::stringstream s;
  write_metrics(logs, s);
  const auto back = read_metrics(s);
  CHECK(back == logs);
  CHECK(back[0].seconds == logs[0].seconds);

  CommLedger ledger;
  ledger.record(phase::kPrototypeBroadcast, Link::kInterClient, 3, 3840);
  ledger.record(phase::kClassifierUpload, Link::kClientServer, 150, 1234567);
  ledger.touch(phase::kDGenTraining);
  std::stringstream l;
  write_ledger(ledger, l);
  const CommLedger parsed = read_ledger(l);
  CHECK(parsed.phases() == ledger.phases());
  CHECK(parsed.generator_values() == 3840);

  std::istringstream bad("{\"round\": 1}\n");
  CHECK_THROWS_AS(read_metrics(bad), ParseError);
}

TEST_CASE("report aggregation") {
  const fs::path root = scratch("report");
  CHECK_THROWS_AS(collect_runs(root), ArgumentError);

  const RunResult a = run_training(tiny(Variant::kFedDep, 1), fixture());
  write_run(a, root / "feddep_seed1");
  auto single = aggregate_runs(collect_runs(root));
  REQUIRE(single.size() == 1);
  CHECK(single[0].runs == 1);
  CHECK(single[0].accuracy_std == 0.0);

  const RunResult b = run_training(tiny(Variant::kFedDep, 2), fixture());
  const RunResult c = run_training(tiny(Variant::kFedAvg, 1), fixture());
  write_run(b, root / "feddep_seed2");
  write_run(c, root / "nested" / "fedavg_seed1");
  const auto runs = collect_runs(root);
  CHECK(runs.size() == 3);
  const auto rows = aggregate_runs(runs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].accuracy_mean >= rows[1].accuracy_mean);

  // Recompute every row straight from the raw files.
  for (const auto& row : rows) {
    std::vector<double> acc;
    double gen = 0, total = 0;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (!entry.is_directory() || !fs::exists(entry.path() / kSummaryFile)) continue;
      std::ifstream sf(entry.path() / kSummaryFile);
      if (nlohmann::json::parse(sf).at("variant") != row.variant) continue;
      std::ifstream mf(entry.path() / kMetricsFile);
      std::string line, last;
      while (std::getline(mf, line))
        if (!line.empty()) last = line;
      acc.push_back(nlohmann::json::parse(last).at("test_accuracy").get<double>());
      std::ifstream lf(entry.path() / kLedgerFile);
      const auto ledger = nlohmann::json::parse(lf);
      double values = 0;
      for (const auto& p : ledger.at("phases")) {
        values += p.at("inter_client").at("values").get<double>() +
                  p.at("client_server").at("values").get<double>();
        if (p.at("phase") == "prototype_broadcast" || p.at("phase") == "dgen_training")
          gen += p.at("inter_client").at("values").get<double>();
      }
      total += values;
    }
    REQUIRE(acc.size() == row.runs);
    CHECK(row.accuracy_mean == doctest::Approx(mean_of(acc)).epsilon(1e-15));
    CHECK(row.generator_values == doctest::Approx(gen / acc.size()));
    CHECK(row.total_values == doctest::Approx(total / acc.size()));
  }
  const std::string table = render_report(rows);
  CHECK(table.find("feddep") != std::string::npos);
  CHECK(table.find("fedavg") != std::string::npos);
  std::ostringstream js;
  write_report_json(rows, js);
  CHECK(nlohmann::json::parse(js.str()).size() == 2);
}

TEST_CASE("population std") {
  CHECK(population_std({0.5}) == 0.0);
  CHECK(population_std({1.0, 3.0}) == doctest::Approx(1.0));
  CHECK(mean_of({1.0, 2.0, 6.0}) == doctest::Approx(3.0));
}
