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
#ifndef SUBFED_MATRIX_H_
#define SUBFED_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace subfed {

using Rng = std::mt19937_64;

// Mixes a master seed with a stream tag so that independent components
// (clients, repetitions, phases) draw from decorrelated generators.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Dense row-major matrix of doubles. Column vectors are n x 1 matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix column(std::span<const double> values);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double v);
  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  std::string shape_string() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);

// Glorot-uniform initialisation.
Matrix glorot(std::size_t rows, std::size_t cols, Rng& rng);

// this += scale * other
void axpy(double scale, const Matrix& other, Matrix& target);

bool all_finite(const Matrix& m);

// Span kernels used by the layer code. `matvec` skips zero inputs, which
// makes it cheap on bag-of-words features.
void matvec(const Matrix& w, std::span<const double> x, std::span<double> out);
// out += W^T * y
void matvec_transposed_add(const Matrix& w, std::span<const double> y,
                           std::span<double> out);
// grad += y * x^T
void add_outer(std::span<const double> y, std::span<const double> x,
               Matrix& grad);

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace subfed

#endif  // SUBFED_MATRIX_H_
