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
#include "subfed/nn.h"

#include <algorithm>
#include <cmath>

#include "subfed/errors.h"

namespace subfed {

Matrix dense_forward(const Matrix& w, const Matrix& input) {
  if (w.cols() != input.rows()) {
    throw DimensionError("dense_forward: W is " + w.shape_string() +
                         " but input is " + input.shape_string());
  }
  return matmul(w, input);
}

DenseGrads dense_backward(const Matrix& w, const Matrix& input,
                          const Matrix& upstream) {
  if (w.cols() != input.rows() || w.rows() != upstream.rows() ||
      input.cols() != upstream.cols()) {
    throw DimensionError("dense_backward: W " + w.shape_string() + ", input " +
                         input.shape_string() + ", upstream " +
                         upstream.shape_string());
  }
  return {matmul(upstream, transpose(input)), matmul(transpose(w), upstream)};
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::kSigmoid:
      if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
      else {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case Activation::kRelu:
      return x > 0.0 ? x : 0.0;
    case Activation::kIdentity:
      return x;
  }
  return x;
}

double activate_derivative(Activation kind, double pre) {
  switch (kind) {
    case Activation::kSigmoid: {
      const double s = activate(Activation::kSigmoid, pre);
      return s * (1.0 - s);
    }
    case Activation::kRelu:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

Matrix activate(Activation kind, const Matrix& input) {
  Matrix out = input;
  activate_inplace(kind, out.values());
  return out;
}

Matrix activate_backward(Activation kind, const Matrix& input,
                         const Matrix& upstream) {
  if (!input.same_shape(upstream)) {
    throw DimensionError("activate_backward: " + input.shape_string() +
                         " vs " + upstream.shape_string());
  }
  Matrix out = upstream;
  activate_backward_inplace(kind, input.values(), out.values());
  return out;
}

void activate_inplace(Activation kind, std::span<double> values) {
  if (kind == Activation::kIdentity) return;
  for (double& v : values) v = activate(kind, v);
}

void activate_backward_inplace(Activation kind, std::span<const double> pre,
                               std::span<double> upstream) {
  if (kind == Activation::kIdentity) return;
  for (std::size_t i = 0; i < upstream.size(); ++i)
    upstream[i] *= activate_derivative(kind, pre[i]);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

double softmax_cross_entropy(std::span<const double> logits, int label,
                             std::span<double> grad) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw IndexError("label " + std::to_string(label) + " outside [0, " +
                     std::to_string(logits.size()) + ")");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double log_z = mx + std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i)
    grad[i] = std::exp(logits[i] - log_z);
  grad[label] -= 1.0;
  return log_z - logits[label];
}

LossAndGrad softmax_cross_entropy(const Matrix& logits, int label) {
  if (logits.cols() != 1) {
    throw DimensionError("softmax_cross_entropy expects a column, got " +
                         logits.shape_string());
  }
  LossAndGrad out{0.0, Matrix(logits.rows(), 1)};
  out.loss = softmax_cross_entropy(logits.values(), label, out.grad.values());
  return out;
}

ScalarLoss smooth_l1(double x) {
  if (std::abs(x) < 1.0) return {0.5 * x * x, x};
  return {std::abs(x) - 0.5, x > 0 ? 1.0 : -1.0};
}

Matrix& ParamStore::add(const std::string& name, Matrix value) {
  Matrix grad(value.rows(), value.cols());
  auto [it, inserted] =
      params_.insert_or_assign(name, Param{std::move(value), std::move(grad)});
  return it->second.value;
}

bool ParamStore::contains(const std::string& name) const {
  return params_.count(name) > 0;
}

Param& ParamStore::at(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw StateError("unknown parameter '" + name + "'");
  return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw StateError("unknown parameter '" + name + "'");
  return it->second;
}

Matrix& ParamStore::value(const std::string& name) { return at(name).value; }
const Matrix& ParamStore::value(const std::string& name) const {
  return at(name).value;
}
Matrix& ParamStore::grad(const std::string& name) { return at(name).grad; }
const Matrix& ParamStore::grad(const std::string& name) const {
  return at(name).grad;
}

void ParamStore::zero_grad() {
  for (auto& [name, p] : params_) p.grad.fill(0.0);
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

bool ParamStore::same_layout(const ParamStore& other) const {
  if (params_.size() != other.params_.size()) return false;
  auto a = params_.begin();
  auto b = other.params_.begin();
  for (; a != params_.end(); ++a, ++b) {
    if (a->first != b->first || !a->second.value.same_shape(b->second.value))
      return false;
  }
  return true;
}

void sgd_step(ParamStore& params, double learning_rate) {
  for (auto& [name, p] : params) {
    axpy(-learning_rate, p.grad, p.value);
    p.grad.fill(0.0);
  }
}

}  // namespace subfed
