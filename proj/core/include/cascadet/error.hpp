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

#include <stdexcept>
#include <string>

namespace cascadet {

// Base for all library errors. The category maps onto CLI exit codes:
// data errors (bad files, bad shapes in user-supplied weights) exit 2,
// everything else escaping to main() exits 3.
class Error : public std::runtime_error {
 public:
  enum class Category { kData, kInternal };

  explicit Error(const std::string& what, Category category = Category::kData)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

// Tensor shape / layer wiring problems.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments to an operator (negative variance, bad stride, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace cascadet
