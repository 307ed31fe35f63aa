// Copyright 2026 The LAREN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "laren/error.hpp"

namespace laren {

/// Dimensions of a tensor, outermost first. Rank is at most 4.
using Shape = std::vector<Eigen::Index>;

std::string shape_string(const Shape& shape);

inline Eigen::Index shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Eigen::Index{1}, std::multiplies<>());
}

/// Dense row-major tensor of rank 1..4 backed by an Eigen vector.
///
/// Every constructor that accepts data rejects NaN and Inf, so a tensor that
/// exists is finite. Matrix views reinterpret the storage as rows x cols with
/// rows = dims[0] and cols = product of the remaining dims.
template <typename Scalar>
class BasicTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<RowMatrix>;
  using ConstMatrixMap = Eigen::Map<const RowMatrix>;

  BasicTensor() = default;

  BasicTensor(Shape shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    validate_shape(shape_);
    require(shape_size(shape_) == data_.size(), ErrorCode::kDimMismatch,
            "shape " + shape_string(shape_) + " does not match " + std::to_string(data_.size()) +
                " values");
    require(data_.allFinite(), ErrorCode::kNonFinite, "tensor contains NaN or Inf");
  }

  BasicTensor(Shape shape, std::initializer_list<Scalar> values)
      : BasicTensor(std::move(shape), from_list(values)) {}

  static BasicTensor zeros(Shape shape) { return constant(std::move(shape), Scalar(0)); }

  static BasicTensor constant(Shape shape, Scalar value) {
    const auto n = shape_size(shape);
    return BasicTensor(std::move(shape), Vector::Constant(n, value));
  }

  static BasicTensor vector(std::initializer_list<Scalar> values) {
    return BasicTensor({static_cast<Eigen::Index>(values.size())}, values);
  }

  static BasicTensor from_matrix(const RowMatrix& m) {
    Vector v = Eigen::Map<const Vector>(m.data(), m.size());
    return BasicTensor({m.rows(), m.cols()}, std::move(v));
  }

  static BasicTensor scalar(Scalar value) { return BasicTensor({1}, {value}); }

  bool empty() const { return shape_.empty(); }
  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  Eigen::Index dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Eigen::Index size() const { return data_.size(); }
  bool is_scalar() const { return !empty() && size() == 1; }

  const Vector& values() const { return data_; }
  Vector& values() { return data_; }
  const Scalar* data() const { return data_.data(); }
  Scalar* data() { return data_.data(); }
  std::span<const Scalar> span() const { return {data_.data(), static_cast<std::size_t>(size())}; }

  Scalar item() const {
    require(is_scalar(), ErrorCode::kDimMismatch, "item() on tensor of shape " + shape_string(shape_));
    return data_[0];
  }

  Scalar& operator[](Eigen::Index i) { return data_[i]; }
  Scalar operator[](Eigen::Index i) const { return data_[i]; }
  Scalar& operator()(Eigen::Index i, Eigen::Index j) { return data_[i * row_stride() + j]; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return data_[i * row_stride() + j]; }
  Scalar& operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  Scalar operator()(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  Eigen::Index rows() const { return shape_[0]; }
  Eigen::Index cols() const { return rank() == 1 ? 1 : size() / shape_[0]; }

  /// rows x cols view; a rank-1 tensor is a column.
  MatrixMap matrix() { return MatrixMap(data_.data(), rows(), cols()); }
  ConstMatrixMap matrix() const { return ConstMatrixMap(data_.data(), rows(), cols()); }

  ConstMatrixMap view(Eigen::Index r, Eigen::Index c) const {
    require(r * c == size(), ErrorCode::kDimMismatch, "view size mismatch");
    return ConstMatrixMap(data_.data(), r, c);
  }
  MatrixMap view(Eigen::Index r, Eigen::Index c) {
    require(r * c == size(), ErrorCode::kDimMismatch, "view size mismatch");
    return MatrixMap(data_.data(), r, c);
  }

  BasicTensor reshaped(Shape shape) const {
    require(shape_size(shape) == size(), ErrorCode::kDimMismatch,
            "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    return BasicTensor(std::move(shape), data_);
  }

  bool same_shape(const BasicTensor& other) const { return shape_ == other.shape_; }

  friend bool operator==(const BasicTensor& a, const BasicTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  static Vector from_list(std::initializer_list<Scalar> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (Scalar x : values) v[i++] = x;
    return v;
  }

  static void validate_shape(const Shape& shape) {
    require(!shape.empty() && shape.size() <= 4, ErrorCode::kDimMismatch,
            "tensor rank must be 1..4, got " + std::to_string(shape.size()));
    for (auto d : shape) {
      require(d > 0, ErrorCode::kDimMismatch, "non-positive dimension in " + shape_string(shape));
    }
  }

  Eigen::Index row_stride() const { return cols(); }

  Shape shape_;
  Vector data_;
};

using Tensor = BasicTensor<double>;
using RowMatrix = Tensor::RowMatrix;

}  // namespace laren
