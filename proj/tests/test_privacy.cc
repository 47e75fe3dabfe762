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

#include <cmath>

#include "subfed/errors.h"
#include "subfed/privacy.h"
#include "support.h"

using namespace subfed;

TEST_CASE("base mechanism closed forms") {
  auto a = nfdp_base(15, 5);
  CHECK(std::abs(a.epsilon - std::log(16.0 / 11.0)) < 1e-12);
  CHECK(std::abs(a.delta - 1.0 / 3.0) < 1e-12);
  auto b = nfdp_base(10, 5);
  CHECK(std::abs(b.epsilon - std::log(11.0 / 6.0)) < 1e-12);
  CHECK(b.epsilon == doctest::Approx(0.6061).epsilon(1e-4));
  CHECK(b.delta == 0.5);
  auto c = nfdp_base(3, 5);
  CHECK(std::abs(c.epsilon - 5 * std::log(4.0 / 3.0)) < 1e-12);
  CHECK(std::abs(c.delta - (1 - std::pow(2.0 / 3.0, 5))) < 1e-12);
  CHECK(nfdp_base(7, 0).epsilon == 0.0);
  CHECK(nfdp_base(7, 0).delta == 0.0);
  CHECK_THROWS_AS(nfdp_base(0, 5), ArgumentError);
  // At d = D the with-replacement branch applies.
  auto eq = nfdp_base(5, 5);
  CHECK(std::abs(eq.epsilon - 5 * std::log(6.0 / 5.0)) < 1e-12);
}

TEST_CASE("composition") {
  const auto one = compose(0.5, 0.1, 1, 1e-4);
  CHECK(one.epsilon <= 0.5);
  const auto zero_delta = compose(0.3, 0.0, 17, 1e-3);
  CHECK(zero_delta.delta == doctest::Approx(1e-3).epsilon(1e-12));
  const auto big = compose(std::log(16.0 / 11.0), 1.0 / 3.0, 100, 1e-4);
  CHECK(big.epsilon < 100 * std::log(16.0 / 11.0));
  CHECK(big.epsilon == doctest::Approx(23.0).epsilon(0.01));
  CHECK_THROWS_AS(compose(0.3, 0.1, 3, 0.0), ArgumentError);
  CHECK_THROWS_AS(compose(0.3, 0.1, 3, 1.0), ArgumentError);
  // failure-probability form grows with k; the printed form shrinks
  CHECK(compose(0.3, 0.1, 10, 1e-4).delta < compose(0.3, 0.1, 20, 1e-4).delta);
  CHECK(compose(0.3, 0.1, 10, 1e-4, DeltaComposition::kPrintedForm).delta >
        compose(0.3, 0.1, 20, 1e-4, DeltaComposition::kPrintedForm).delta);
}

TEST_CASE("amplification") {
  CHECK(amplify(1.0, 0.2, 0.0).epsilon == 0.0);
  CHECK(amplify(1.0, 0.2, 0.0).delta == 0.0);
  CHECK(amplify(1.0, 0.2, 1.0).epsilon == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(amplify(1.0, 0.2, 1.0).delta == 0.2);
  CHECK(amplify(1.0, 0.2, 0.5).epsilon == doctest::Approx(0.6201).epsilon(1e-4));
}

TEST_CASE("full chain equals stage-by-stage calls") {
  AccountantInput in;
  in.min_degree = 15;
  in.fanout = 5;
  in.layers = 2;
  in.epochs = 50;
  in.rate = 0.5;
  const auto budget = feddep_budget(in);
  REQUIRE(budget.trace.size() == 3);
  const auto base = nfdp_base(15, 5);
  const auto comp = compose(base.epsilon, base.delta, 100, 1e-4);
  const auto amp = amplify(comp.epsilon, comp.delta, 0.5);
  CHECK(budget.trace[0].name == "base");
  CHECK(budget.trace[0].epsilon == doctest::Approx(0.3747).epsilon(1e-4));
  CHECK(budget.trace[1].epsilon == comp.epsilon);
  CHECK(budget.trace[2].epsilon == amp.epsilon);
  CHECK(budget.epsilon == amp.epsilon);
  CHECK(budget.delta == amp.delta);

  in.rate = 0.0;
  CHECK(feddep_budget(in).epsilon == 0.0);
  in.rate = 1.0;
  in.layers = 1;
  in.epochs = 1;
  in.delta_prime = 1e-300;
  CHECK(feddep_budget(in).epsilon == doctest::Approx(base.epsilon).epsilon(1e-12));
}

TEST_CASE("budget_for_graph") {
  std::vector<Edge> clique;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) clique.emplace_back(a, b);
  const Graph k4 = build_graph(4, clique, Matrix(4, 1), {0, 0, 0, 0}, 1);
  const std::vector<NodeId> four{0, 1, 2, 3};
  const ImpairedView view = impair(induced_subgraph(k4, four, 0), 0.0, 1);
  AccountantInput in;
  in.layers = 1;
  const auto gb = budget_for_graph(view, in);
  CHECK(gb.degree.degree == 3);
  CHECK(gb.budget.trace[0].epsilon == nfdp_base(3, 5).epsilon);

  const Graph with_isolated = build_graph(3, std::vector<Edge>{{0, 1}}, Matrix(3, 1), {0, 0, 0}, 1);
  const std::vector<NodeId> three{0, 1, 2};
  try {
    budget_for_graph(impair(induced_subgraph(with_isolated, three, 0), 0.0, 1), in);
    FAIL("expected the degree precondition to fail");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("degree precondition violated") != std::string::npos);
    CHECK(msg.find("node 2") != std::string::npos);
  }
}
