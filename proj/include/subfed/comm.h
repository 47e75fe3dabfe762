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
#ifndef SUBFED_COMM_H_
#define SUBFED_COMM_H_

#include <cstddef>
#include <map>
#include <mutex>
#include <string>

namespace subfed {

namespace phase {
inline constexpr const char* kLocalPretraining = "local_pretraining";
inline constexpr const char* kPrototypeBroadcast = "prototype_broadcast";
inline constexpr const char* kDGenTraining = "dgen_training";
inline constexpr const char* kClassifierUpload = "classifier_upload";
inline constexpr const char* kClassifierDownload = "classifier_download";
}  // namespace phase

enum class Link { kInterClient, kClientServer };

struct Traffic {
  std::size_t messages = 0;
  std::size_t values = 0;  // count of real numbers
  bool operator==(const Traffic&) const = default;
};

struct PhaseTraffic {
  Traffic inter_client;
  Traffic client_server;
  bool operator==(const PhaseTraffic&) const = default;
};

// Monotone per-phase counters of simulated transfers. Safe to record from
// concurrent client workers.
class CommLedger {
 public:
  CommLedger() = default;
  CommLedger(const CommLedger& other);
  CommLedger& operator=(const CommLedger& other);

  void record(const std::string& phase, Link link, std::size_t messages,
              std::size_t values);
  // Registers a phase with zero traffic so that it shows up in reports.
  void touch(const std::string& phase);

  PhaseTraffic phase(const std::string& name) const;
  std::map<std::string, PhaseTraffic> phases() const;
  Traffic total(Link link) const;

  // Traffic attributable to neighbour-generator training: the prototype
  // broadcast plus any exchange during generator updates.
  std::size_t generator_values() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, PhaseTraffic> phases_;
};

}  // namespace subfed

#endif  // SUBFED_COMM_H_
