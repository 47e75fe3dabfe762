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
#include "subfed/privacy.h"

#include <algorithm>
#include <cmath>

#include "subfed/errors.h"

namespace subfed {

EpsilonDelta nfdp_base(std::size_t min_degree, std::size_t fanout) {
  if (min_degree == 0) throw ArgumentError("minimum degree D must be >= 1");
  const double D = static_cast<double>(min_degree);
  const double d = static_cast<double>(fanout);
  if (fanout == 0) return {0.0, 0.0};
  if (fanout < min_degree)
    return {std::log((D + 1.0) / (D + 1.0 - d)), d / D};
  return {d * std::log((D + 1.0) / D), 1.0 - std::pow((D - 1.0) / D, d)};
}

EpsilonDelta compose(double epsilon, double delta, std::size_t k,
                     double delta_prime, DeltaComposition mode) {
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw ArgumentError("delta' must lie in (0, 1)");
  if (k == 0) throw ArgumentError("composition count must be >= 1");
  const double kd = static_cast<double>(k);
  const double linear = kd * epsilon;
  const double u = std::min(
      std::sqrt(std::log(std::exp(1.0) + epsilon * std::sqrt(kd) / delta_prime)),
      std::sqrt(std::log(1.0 / delta_prime)));
  const double advanced =
      kd * epsilon * std::expm1(epsilon) / (std::exp(epsilon) + 1.0) +
      epsilon * u * std::sqrt(2.0 * kd);
  EpsilonDelta out;
  out.epsilon = std::min(linear, advanced);
  const double survive = std::pow(1.0 - delta, kd) * (1.0 - delta_prime);
  out.delta = mode == DeltaComposition::kFailureProbability ? 1.0 - survive : survive;
  return out;
}

EpsilonDelta amplify(double epsilon, double delta, double rate) {
  if (!(rate >= 0.0 && rate <= 1.0))
    throw ArgumentError("sampler rate must be in [0, 1]");
  return {std::log1p(rate * std::expm1(epsilon)), rate * delta};
}

PrivacyBudget feddep_budget(const AccountantInput& input) {
  if (input.layers < 1 || input.epochs < 1)
    throw ArgumentError("L and N must be >= 1");
  PrivacyBudget budget;
  const auto base = nfdp_base(input.min_degree, input.fanout);
  budget.trace.push_back({"base", base.epsilon, base.delta});
  const auto k = static_cast<std::size_t>(input.layers) *
                 static_cast<std::size_t>(input.epochs);
  const auto composed =
      compose(base.epsilon, base.delta, k, input.delta_prime, input.delta_mode);
  budget.trace.push_back({"composed", composed.epsilon, composed.delta});
  const auto amplified = amplify(composed.epsilon, composed.delta, input.rate);
  budget.trace.push_back({"amplified", amplified.epsilon, amplified.delta});
  budget.epsilon = amplified.epsilon;
  budget.delta = amplified.delta;
  return budget;
}

GraphBudget budget_for_graph(const ImpairedView& view, AccountantInput input) {
  GraphBudget out;
  out.degree = min_retained_degree(view, input.layers);
  if (out.degree.degree == 0)
    throw ArgumentError("degree precondition violated: node " +
                        std::to_string(out.degree.node) + " has degree 0");
  input.min_degree = out.degree.degree;
  out.budget = feddep_budget(input);
  return out;
}

}  // namespace subfed
