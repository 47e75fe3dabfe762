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
#ifndef SUBFED_CONFIG_H_
#define SUBFED_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace subfed {

enum class Variant { kLocal, kFedAvg, kFedDepNoDGen, kFedDepNoProto, kFedDep };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

enum class FedAvgWeighting { kSampleCount, kUniform };

// Flat key = value settings. Defaults follow the reference setup: two-layer
// GraphSage with fanout 5, batch 32, lr 0.1, 50 epochs, h = 0.5, all loss
// weights 1.
struct ExperimentConfig {
  std::string dataset;
  int clients = 3;                // M
  double impair_ratio = 0.5;      // h
  int classifier_layers = 2;      // K
  int embed_layers = 2;           // L
  int fanout = 5;                 // d
  int embed_dim = 128;            // d_z (= d_h)
  int prototypes = 10;            // C
  double sampler_rate = 0.5;      // r
  int pretrain_epochs = 50;       // N, local embedder
  int rounds = 50;                // FL rounds, one local epoch each
  int batch_size = 32;
  double learning_rate = 0.1;
  double lambda_d = 1.0;
  double lambda_f = 1.0;
  double beta_d = 1.0;
  double beta_f = 1.0;
  double beta_n = 1.0;
  int max_count = 5;              // N_max
  double delta_prime = 1e-4;
  bool printed_delta = false;     // audit mode for the composed delta
  Variant variant = Variant::kFedDep;
  FedAvgWeighting weighting = FedAvgWeighting::kSampleCount;
  std::uint64_t seed = 0;
  int repetitions = 3;
  int kmeans_iters = 100;
  int threads = 0;                // 0: one worker per client

  // Throws ArgumentError describing the first invalid field.
  void validate() const;
};

// Unknown keys and malformed values raise ParseError with the line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

// Inverse of parse_config: every key, fixed order.
void write_config(const ExperimentConfig& config, std::ostream& out);

}  // namespace subfed

#endif  // SUBFED_CONFIG_H_
