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
#include "subfed/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "subfed/errors.h"

namespace subfed {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kLocal: return "local";
    case Variant::kFedAvg: return "fedavg";
    case Variant::kFedDepNoDGen: return "feddep_no_dgen";
    case Variant::kFedDepNoProto: return "feddep_no_proto";
    case Variant::kFedDep: return "feddep";
  }
  return "?";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::kLocal, Variant::kFedAvg, Variant::kFedDepNoDGen,
                    Variant::kFedDepNoProto, Variant::kFedDep})
    if (variant_name(v) == name) return v;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  auto positive = [](int v, const char* key) {
    if (v < 1) throw ArgumentError(std::string(key) + " must be >= 1");
  };
  positive(clients, "clients");
  positive(classifier_layers, "classifier_layers");
  positive(embed_layers, "embed_layers");
  positive(fanout, "fanout");
  positive(embed_dim, "embed_dim");
  positive(prototypes, "prototypes");
  positive(pretrain_epochs, "pretrain_epochs");
  positive(rounds, "rounds");
  positive(batch_size, "batch_size");
  positive(max_count, "max_count");
  positive(repetitions, "repetitions");
  positive(kmeans_iters, "kmeans_iters");
  if (!(impair_ratio >= 0.0 && impair_ratio < 1.0))
    throw ArgumentError("impair_ratio must be in [0, 1)");
  if (!(sampler_rate >= 0.0 && sampler_rate <= 1.0))
    throw ArgumentError("sampler_rate must be in [0, 1]");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw ArgumentError("delta_prime must be in (0, 1)");
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be > 0");
  if (threads < 0) throw ArgumentError("threads must be >= 0");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& text, int line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(line, "bad numeric value '" + text + "'");
  return value;
}

bool boolean(const std::string& text, int line) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParseError(line, "bad boolean '" + text + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"dataset", [](auto& c, auto& v, int) { c.dataset = v; }},
      {"clients", [](auto& c, auto& v, int l) { c.clients = number<int>(v, l); }},
      {"impair_ratio", [](auto& c, auto& v, int l) { c.impair_ratio = number<double>(v, l); }},
      {"classifier_layers", [](auto& c, auto& v, int l) { c.classifier_layers = number<int>(v, l); }},
      {"embed_layers", [](auto& c, auto& v, int l) { c.embed_layers = number<int>(v, l); }},
      {"fanout", [](auto& c, auto& v, int l) { c.fanout = number<int>(v, l); }},
      {"embed_dim", [](auto& c, auto& v, int l) { c.embed_dim = number<int>(v, l); }},
      {"prototypes", [](auto& c, auto& v, int l) { c.prototypes = number<int>(v, l); }},
      {"sampler_rate", [](auto& c, auto& v, int l) { c.sampler_rate = number<double>(v, l); }},
      {"pretrain_epochs", [](auto& c, auto& v, int l) { c.pretrain_epochs = number<int>(v, l); }},
      {"rounds", [](auto& c, auto& v, int l) { c.rounds = number<int>(v, l); }},
      {"batch_size", [](auto& c, auto& v, int l) { c.batch_size = number<int>(v, l); }},
      {"learning_rate", [](auto& c, auto& v, int l) { c.learning_rate = number<double>(v, l); }},
      {"lambda_d", [](auto& c, auto& v, int l) { c.lambda_d = number<double>(v, l); }},
      {"lambda_f", [](auto& c, auto& v, int l) { c.lambda_f = number<double>(v, l); }},
      {"beta_d", [](auto& c, auto& v, int l) { c.beta_d = number<double>(v, l); }},
      {"beta_f", [](auto& c, auto& v, int l) { c.beta_f = number<double>(v, l); }},
      {"beta_n", [](auto& c, auto& v, int l) { c.beta_n = number<double>(v, l); }},
      {"max_count", [](auto& c, auto& v, int l) { c.max_count = number<int>(v, l); }},
      {"delta_prime", [](auto& c, auto& v, int l) { c.delta_prime = number<double>(v, l); }},
      {"printed_delta", [](auto& c, auto& v, int l) { c.printed_delta = boolean(v, l); }},
      {"variant",
       [](auto& c, auto& v, int l) {
         auto parsed = parse_variant(v);
         if (!parsed) throw ParseError(l, "unknown variant '" + v + "'");
         c.variant = *parsed;
       }},
      {"fedavg_weighting",
       [](auto& c, auto& v, int l) {
         if (v == "samples") c.weighting = FedAvgWeighting::kSampleCount;
         else if (v == "uniform") c.weighting = FedAvgWeighting::kUniform;
         else throw ParseError(l, "fedavg_weighting must be samples or uniform");
       }},
      {"seed", [](auto& c, auto& v, int l) { c.seed = number<std::uint64_t>(v, l); }},
      {"repetitions", [](auto& c, auto& v, int l) { c.repetitions = number<int>(v, l); }},
      {"kmeans_iters", [](auto& c, auto& v, int l) { c.kmeans_iters = number<int>(v, l); }},
      {"threads", [](auto& c, auto& v, int l) { c.threads = number<int>(v, l); }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line, "unknown key '" + key + "'");
    it->second(config, value, line);
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_config(in);
}

void write_config(const ExperimentConfig& c, std::ostream& out) {
  out << "dataset = " << c.dataset << '\n'
      << "clients = " << c.clients << '\n'
      << "impair_ratio = " << c.impair_ratio << '\n'
      << "classifier_layers = " << c.classifier_layers << '\n'
      << "embed_layers = " << c.embed_layers << '\n'
      << "fanout = " << c.fanout << '\n'
      << "embed_dim = " << c.embed_dim << '\n'
      << "prototypes = " << c.prototypes << '\n'
      << "sampler_rate = " << c.sampler_rate << '\n'
      << "pretrain_epochs = " << c.pretrain_epochs << '\n'
      << "rounds = " << c.rounds << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "learning_rate = " << c.learning_rate << '\n'
      << "lambda_d = " << c.lambda_d << '\n'
      << "lambda_f = " << c.lambda_f << '\n'
      << "beta_d = " << c.beta_d << '\n'
      << "beta_f = " << c.beta_f << '\n'
      << "beta_n = " << c.beta_n << '\n'
      << "max_count = " << c.max_count << '\n'
      << "delta_prime = " << c.delta_prime << '\n'
      << "printed_delta = " << (c.printed_delta ? "true" : "false") << '\n'
      << "variant = " << variant_name(c.variant) << '\n'
      << "fedavg_weighting = "
      << (c.weighting == FedAvgWeighting::kSampleCount ? "samples" : "uniform") << '\n'
      << "seed = " << c.seed << '\n'
      << "repetitions = " << c.repetitions << '\n'
      << "kmeans_iters = " << c.kmeans_iters << '\n'
      << "threads = " << c.threads << '\n';
}

}  // namespace subfed
