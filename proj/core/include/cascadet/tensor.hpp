// Copyright 2026 The cascadet Authors. All Rights Reserved.
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

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace cascadet {

// Extents of a rank-1..4 tensor. Rank-4 tensors are batch, channel, height,
// width; lower ranks are used for bias/statistics vectors and dense weights.
class Shape {
 public:
  static constexpr std::size_t kMaxRank = 4;

  Shape() = default;
  Shape(std::initializer_list<int> extents);
  explicit Shape(std::span<const int> extents);

  std::size_t rank() const noexcept { return rank_; }
  int operator[](std::size_t axis) const {
    if (axis >= rank_) throw_axis(axis);
    return dims_[axis];
  }
  std::size_t numel() const noexcept;
  std::span<const int> extents() const noexcept { return {dims_.data(), rank_}; }

  // NCHW accessors; valid for rank-4 shapes only.
  int n() const { return (*this)[0]; }
  int c() const { return (*this)[1]; }
  int h() const { return (*this)[2]; }
  int w() const { return (*this)[3]; }

  std::string str() const;

  friend bool operator==(const Shape& a, const Shape& b) noexcept;

 private:
  [[noreturn]] void throw_axis(std::size_t axis) const;

  std::array<int, kMaxRank> dims_{};
  std::size_t rank_ = 0;
};

// Dense float32 tensor, row-major with the last axis fastest.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  static Tensor nchw(int n, int c, int h, int w, float fill = 0.0f) {
    return Tensor(Shape{n, c, h, w}, fill);
  }
  static Tensor vector(std::vector<float> values);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  // Rank-4 element access.
  float& at(int n, int c, int y, int x) { return data_[offset(n, c, y, x)]; }
  float at(int n, int c, int y, int x) const { return data_[offset(n, c, y, x)]; }

  // Pointer to the start of plane (n, c) of a rank-4 tensor.
  float* plane(int n, int c) { return data_.data() + offset(n, c, 0, 0); }
  const float* plane(int n, int c) const { return data_.data() + offset(n, c, 0, 0); }

  // Same data, new extents. The element count must match.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const noexcept;

  // Bitwise equality of shape and float bit patterns.
  bool bit_equal(const Tensor& other) const noexcept;

 private:
  std::size_t offset(int n, int c, int y, int x) const noexcept {
    return ((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + y) * shape_[3] + x;
  }

  Shape shape_;
  std::vector<float> data_;
};

}  // namespace cascadet
