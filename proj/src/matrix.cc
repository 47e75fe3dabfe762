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
#include "subfed/matrix.h"

#include <cmath>
#include <sstream>

#include "subfed/errors.h"

namespace subfed {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 over the combined state
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw DimensionError("ragged initializer list");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Matrix::shape_string() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + a.shape_string() + " * " +
                         b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

Matrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = dist(rng);
  return m;
}

void axpy(double scale, const Matrix& other, Matrix& target) {
  if (!other.same_shape(target)) {
    throw DimensionError("axpy: " + other.shape_string() + " vs " +
                         target.shape_string());
  }
  auto src = other.values();
  auto dst = target.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

bool all_finite(const Matrix& m) {
  for (double v : m.values())
    if (!std::isfinite(v)) return false;
  return true;
}

void matvec(const Matrix& w, std::span<const double> x, std::span<double> out) {
  if (w.cols() != x.size() || w.rows() != out.size()) {
    throw DimensionError("matvec: W " + w.shape_string() + ", x " +
                         std::to_string(x.size()) + ", out " +
                         std::to_string(out.size()));
  }
  std::size_t nonzero = 0;
  for (double v : x) nonzero += (v != 0.0);
  if (nonzero * 4 < x.size()) {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t cols = w.cols();
    const double* base = w.values().data();
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += base[i * cols + j] * xj;
    }
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dot(w.row(i), x);
}

void matvec_transposed_add(const Matrix& w, std::span<const double> y,
                           std::span<double> out) {
  if (w.rows() != y.size() || w.cols() != out.size()) {
    throw DimensionError("matvec_transposed_add: W " + w.shape_string() +
                         ", y " + std::to_string(y.size()));
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    auto wrow = w.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += wrow[j] * yi;
  }
}

void add_outer(std::span<const double> y, std::span<const double> x,
               Matrix& grad) {
  if (grad.rows() != y.size() || grad.cols() != x.size()) {
    throw DimensionError("add_outer: grad " + grad.shape_string());
  }
  std::vector<std::size_t> nz;
  nz.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] != 0.0) nz.push_back(j);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    auto grow = grad.row(i);
    for (std::size_t j : nz) grow[j] += yi * x[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace subfed
