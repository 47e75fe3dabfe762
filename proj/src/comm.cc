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
#include "subfed/comm.h"

namespace subfed {

CommLedger::CommLedger(const CommLedger& other) : phases_(other.phases()) {}

CommLedger& CommLedger::operator=(const CommLedger& other) {
  if (this != &other) {
    auto copy = other.phases();
    std::lock_guard lock(mu_);
    phases_ = std::move(copy);
  }
  return *this;
}

void CommLedger::record(const std::string& phase, Link link,
                        std::size_t messages, std::size_t values) {
  std::lock_guard lock(mu_);
  auto& entry = phases_[phase];
  Traffic& t = link == Link::kInterClient ? entry.inter_client : entry.client_server;
  t.messages += messages;
  t.values += values;
}

void CommLedger::touch(const std::string& phase) {
  std::lock_guard lock(mu_);
  phases_[phase];
}

PhaseTraffic CommLedger::phase(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = phases_.find(name);
  return it == phases_.end() ? PhaseTraffic{} : it->second;
}

std::map<std::string, PhaseTraffic> CommLedger::phases() const {
  std::lock_guard lock(mu_);
  return phases_;
}

Traffic CommLedger::total(Link link) const {
  std::lock_guard lock(mu_);
  Traffic sum;
  for (const auto& [name, p] : phases_) {
    const Traffic& t = link == Link::kInterClient ? p.inter_client : p.client_server;
    sum.messages += t.messages;
    sum.values += t.values;
  }
  return sum;
}

std::size_t CommLedger::generator_values() const {
  const auto broadcast = phase(phase::kPrototypeBroadcast);
  const auto training = phase(phase::kDGenTraining);
  return broadcast.inter_client.values + training.inter_client.values +
         training.client_server.values;
}

}  // namespace subfed
