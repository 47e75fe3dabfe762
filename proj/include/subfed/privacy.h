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
#ifndef SUBFED_PRIVACY_H_
#define SUBFED_PRIVACY_H_

#include <cstddef>
#include <string>
#include <vector>

#include "subfed/graph.h"

namespace subfed {

// Noise-free edge-level local DP accounting for mini-batch neighbour
// sampling. The chain is:
//   base       one epoch of sampling d neighbours out of >= D
//   composed   k = L * N adaptive compositions of the base mechanism
//   amplified  Bernoulli(r) subsampling of generated neighbours

struct EpsilonDelta {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct BudgetStage {
  std::string name;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<BudgetStage> trace;  // base, composed, amplified
};

enum class DeltaComposition {
  // 1 - (1 - delta)^k (1 - delta')
  kFailureProbability,
  // (1 - delta)^k (1 - delta'), as printed in the composed-budget statement;
  // kept for auditing only.
  kPrintedForm,
};

struct AccountantInput {
  std::size_t min_degree = 1;  // D
  std::size_t fanout = 5;      // d
  int layers = 2;              // L
  int epochs = 50;             // N
  double rate = 0.5;           // r
  double delta_prime = 1e-4;
  DeltaComposition delta_mode = DeltaComposition::kFailureProbability;
};

// d < D: (ln((D+1)/(D+1-d)), d/D)   sampling without replacement
// d >= D: (d ln((D+1)/D), 1 - ((D-1)/D)^d)   sampling with replacement
EpsilonDelta nfdp_base(std::size_t min_degree, std::size_t fanout);

// k-fold adaptive composition with slack delta'.
EpsilonDelta compose(double epsilon, double delta, std::size_t k,
                     double delta_prime,
                     DeltaComposition mode = DeltaComposition::kFailureProbability);

// Amplification by independent Bernoulli(r) subsampling.
EpsilonDelta amplify(double epsilon, double delta, double rate);

PrivacyBudget feddep_budget(const AccountantInput& input);

struct GraphBudget {
  DegreeScan degree;
  PrivacyBudget budget;
};

// Wires the impaired view's minimum degree into the accountant. Throws
// ArgumentError naming the offending node when D = 0.
GraphBudget budget_for_graph(const ImpairedView& view, AccountantInput input);

}  // namespace subfed

#endif  // SUBFED_PRIVACY_H_
