// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stablesketch {

/// Coarse failure classes. The CLI prints category_name() as the first token
/// of its one-line error report, so these names are part of the interface.
enum class error_category {
  invalid_argument,
  numerical_failure,
  range,
  tail_underflow,
  degenerate,
  format,
  mismatch,
  io,
};

constexpr std::string_view category_name(error_category c) noexcept {
  switch (c) {
    case error_category::invalid_argument: return "invalid-argument";
    case error_category::numerical_failure: return "numerical-failure";
    case error_category::range: return "range";
    case error_category::tail_underflow: return "tail-underflow";
    case error_category::degenerate: return "degenerate";
    case error_category::format: return "format";
    case error_category::mismatch: return "mismatch";
    case error_category::io: return "io";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(error_category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  error_category category() const noexcept { return category_; }

 private:
  error_category category_;
};

/// Adaptive quadrature did not reach its tolerance within the subdivision budget.
class numerical_failure : public error {
 public:
  numerical_failure(double x, double alpha, const std::string& what)
      : error(error_category::numerical_failure, what), x_(x), alpha_(alpha) {}

  double x() const noexcept { return x_; }
  double alpha() const noexcept { return alpha_; }

 private:
  double x_;
  double alpha_;
};

/// A projected difference was exactly zero, so its logarithm does not exist.
class degenerate_coordinate : public error {
 public:
  degenerate_coordinate(std::size_t index, const std::string& what)
      : error(error_category::degenerate, what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Text file rejected by a parser; line is 1-based, 0 when not applicable.
class format_error : public error {
 public:
  format_error(std::size_t line, std::size_t column, const std::string& what)
      : error(error_category::format, what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw error(error_category::invalid_argument, what);
}

}  // namespace stablesketch
