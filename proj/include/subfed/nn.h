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
#ifndef SUBFED_NN_H_
#define SUBFED_NN_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subfed/matrix.h"

namespace subfed {

struct DenseGrads {
  Matrix weight;
  Matrix input;
};

// W x input. Input columns are samples.
Matrix dense_forward(const Matrix& w, const Matrix& input);
DenseGrads dense_backward(const Matrix& w, const Matrix& input,
                          const Matrix& upstream);

enum class Activation { kSigmoid, kRelu, kIdentity };

double activate(Activation kind, double x);
// Derivative expressed through the pre-activation value.
double activate_derivative(Activation kind, double pre);

Matrix activate(Activation kind, const Matrix& input);
Matrix activate_backward(Activation kind, const Matrix& input,
                         const Matrix& upstream);

void activate_inplace(Activation kind, std::span<double> values);
// upstream[i] *= f'(pre[i])
void activate_backward_inplace(Activation kind, std::span<const double> pre,
                               std::span<double> upstream);

std::vector<double> softmax(std::span<const double> logits);

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;
};

// Max-subtracted softmax cross-entropy for a single column of logits.
LossAndGrad softmax_cross_entropy(const Matrix& logits, int label);

// Span form writes d loss / d logits into `grad` and returns the loss.
double softmax_cross_entropy(std::span<const double> logits, int label,
                             std::span<double> grad);

struct ScalarLoss {
  double loss;
  double derivative;
};

// Huber loss with threshold 1.
ScalarLoss smooth_l1(double x);

struct Param {
  Matrix value;
  Matrix grad;
};

// Named parameters with a gradient accumulator per entry. Iteration order is
// by name, which keeps aggregation and serialisation deterministic.
class ParamStore {
 public:
  Matrix& add(const std::string& name, Matrix value);

  bool contains(const std::string& name) const;
  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Matrix& grad(const std::string& name);
  const Matrix& grad(const std::string& name) const;

  void zero_grad();
  std::size_t parameter_count() const;
  bool same_layout(const ParamStore& other) const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;

  std::map<std::string, Param> params_;
};

// value -= lr * grad for every parameter, then zeroes the gradients.
void sgd_step(ParamStore& params, double learning_rate);

}  // namespace subfed

#endif  // SUBFED_NN_H_
