// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// Text formats. All numbers go through std::to_chars / std::from_chars, so
// output is locale independent and doubles round-trip exactly.
//
// Weight table:
//   stable-ltable 1
//   alpha=<dec> k=<int> trimmed=<0|1>
//   I_mu=<dec> BC=<dec> S=<dec>
//   <i> <q_i> <w_i>            (k lines, i = 1..k)
//
// Dataset: headerless CSV, one point per row, uniform column count.
// Sketch:  "# stable-sketch 1 alpha=<dec> k=<int> seed=<int> m=<int>" then an n x k CSV body.

#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "stablesketch/error.hpp"
#include "stablesketch/lestimator.hpp"
#include "stablesketch/projection.hpp"

namespace stablesketch::io {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

/// 17 significant digits, as stored in weight tables.
inline std::string format_double17(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

template <class Int>
bool parse_integer(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Lines without terminators; a final empty line after the last newline is dropped.
inline std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out = split(text, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  for (auto& l : out) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(error_category::io, "cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a temporary sibling and renames it over the target, so readers
/// never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<std::uint64_t> counter{0};
  std::filesystem::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error(error_category::io, "cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw error(error_category::io, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw error(error_category::io, "cannot rename onto " + path.string() + ": " + ec.message());
  }
}

// ---------------------------------------------------------------------------
// Weight tables

inline constexpr std::string_view kTableMagic = "stable-ltable";
inline constexpr int kTableVersion = 1;

inline std::string format_table(const WeightTable& t) {
  std::string out;
  out.reserve(64 * (t.k + 3));
  out += std::string(kTableMagic) + " " + std::to_string(kTableVersion) + "\n";
  out += "alpha=" + format_double17(t.alpha) + " k=" + std::to_string(t.k) + " trimmed=" + (t.trimmed ? "1" : "0") +
         "\n";
  out += "I_mu=" + format_double17(t.I_mu) + " BC=" + format_double17(t.BC) + " S=" + format_double17(t.S) + "\n";
  for (std::size_t i = 0; i < t.k; ++i) {
    out += std::to_string(i + 1) + " " + format_double17(t.q[i]) + " " + format_double17(t.w[i]) + "\n";
  }
  return out;
}

namespace detail {

// Parses "key=value" with a fixed key.
inline std::string_view expect_field(std::string_view token, std::string_view key, std::size_t line) {
  if (token.size() <= key.size() || token.substr(0, key.size()) != key || token[key.size()] != '=') {
    throw format_error(line, 0, "expected field '" + std::string(key) + "=' on line " + std::to_string(line));
  }
  return token.substr(key.size() + 1);
}

inline double expect_double(std::string_view token, std::string_view key, std::size_t line) {
  double v = 0.0;
  if (!parse_double(expect_field(token, key, line), v)) {
    throw format_error(line, 0, "malformed number for '" + std::string(key) + "' on line " + std::to_string(line));
  }
  return v;
}

template <class Int>
Int expect_integer(std::string_view token, std::string_view key, std::size_t line) {
  Int v{};
  if (!parse_integer(expect_field(token, key, line), v)) {
    throw format_error(line, 0, "malformed integer for '" + std::string(key) + "' on line " + std::to_string(line));
  }
  return v;
}

inline std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  for (auto t : split(line, ' ')) {
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace detail

inline WeightTable parse_table(std::string_view text) {
  const auto ls = lines(text);
  if (ls.size() < 3) throw format_error(ls.size(), 0, "weight table header is incomplete");

  const auto head = detail::tokens(ls[0]);
  if (head.size() != 2 || head[0] != kTableMagic) throw format_error(1, 0, "not a stable-ltable file");
  int version = 0;
  if (!parse_integer(head[1], version)) throw format_error(1, 0, "malformed table version");
  if (version != kTableVersion) {
    throw format_error(1, 0, "unsupported table version " + std::to_string(version));
  }

  WeightTable t;
  const auto l2 = detail::tokens(ls[1]);
  if (l2.size() != 3) throw format_error(2, 0, "expected 'alpha=<dec> k=<int> trimmed=<0|1>'");
  t.alpha = detail::expect_double(l2[0], "alpha", 2);
  const long long k = detail::expect_integer<long long>(l2[1], "k", 2);
  const int trimmed = detail::expect_integer<int>(l2[2], "trimmed", 2);
  if (k < 2) throw format_error(2, 0, "table k must be at least 2");
  if (trimmed != 0 && trimmed != 1) throw format_error(2, 0, "trimmed must be 0 or 1");
  t.k = static_cast<std::size_t>(k);
  t.trimmed = trimmed == 1;

  const auto l3 = detail::tokens(ls[2]);
  if (l3.size() != 3) throw format_error(3, 0, "expected 'I_mu=<dec> BC=<dec> S=<dec>'");
  t.I_mu = detail::expect_double(l3[0], "I_mu", 3);
  t.BC = detail::expect_double(l3[1], "BC", 3);
  t.S = detail::expect_double(l3[2], "S", 3);

  if (ls.size() - 3 != t.k) {
    throw format_error(ls.size(), 0, "table declares k=" + std::to_string(t.k) + " but has " +
                                         std::to_string(ls.size() - 3) + " weight rows");
  }
  t.q.resize(t.k);
  t.w.resize(t.k);
  for (std::size_t i = 0; i < t.k; ++i) {
    const std::size_t line = i + 4;
    const auto tok = detail::tokens(ls[i + 3]);
    std::size_t index = 0;
    if (tok.size() != 3 || !parse_integer(tok[0], index) || !parse_double(tok[1], t.q[i]) ||
        !parse_double(tok[2], t.w[i])) {
      throw format_error(line, 0, "malformed weight row on line " + std::to_string(line));
    }
    if (index != i + 1) {
      throw format_error(line, 0, "weight row index " + std::to_string(index) + " out of sequence on line " +
                                      std::to_string(line));
    }
  }
  if (!(t.alpha >= kMinTableAlpha && t.alpha <= 2.0) || !(t.I_mu > 0.0)) {
    throw format_error(2, 0, "table constants out of range");
  }
  return t;
}

inline WeightTable read_table(const std::filesystem::path& path) { return parse_table(read_file(path)); }

inline void write_table(const std::filesystem::path& path, const WeightTable& t) {
  write_file_atomic(path, format_table(t));
}

// ---------------------------------------------------------------------------
// Datasets and sketches

inline std::string format_csv_body(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

/// Parses CSV rows starting at text line `first_line` (1-based, for diagnostics).
inline Matrix parse_csv_body(const std::vector<std::string_view>& rows, std::size_t first_line,
                             std::size_t expected_cols = 0) {
  std::vector<double> values;
  std::size_t cols = expected_cols;
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t line = first_line + r;
    const auto fields = split(rows[r], ',');
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols) {
      throw format_error(line, fields.size(), "row " + std::to_string(line) + " has " +
                                                  std::to_string(fields.size()) + " columns, expected " +
                                                  std::to_string(cols));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v) || !std::isfinite(v)) {
        throw format_error(line, c + 1, "row " + std::to_string(line) + ", column " + std::to_string(c + 1) +
                                            ": not a finite decimal number '" + std::string(fields[c]) + "'");
      }
      values.push_back(v);
    }
    ++n;
  }
  if (n == 0) throw format_error(first_line, 0, "no data rows");
  return Matrix(n, cols, std::move(values));
}

inline DataMatrix parse_dataset(std::string_view text) {
  auto ls = lines(text);
  while (!ls.empty() && ls.back().empty()) ls.pop_back();
  return parse_csv_body(ls, 1);
}

inline DataMatrix read_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

inline constexpr std::string_view kSketchMagic = "# stable-sketch";
inline constexpr int kSketchVersion = 1;

inline std::string format_sketch(const SketchMatrix& sk) {
  std::string out = std::string(kSketchMagic) + " " + std::to_string(kSketchVersion) +
                    " alpha=" + format_double17(sk.spec.alpha) + " k=" + std::to_string(sk.spec.k) +
                    " seed=" + std::to_string(sk.spec.seed) + " m=" + std::to_string(sk.spec.m) + "\n";
  out += format_csv_body(sk.values);
  return out;
}

inline SketchMatrix parse_sketch(std::string_view text) {
  auto ls = lines(text);
  while (!ls.empty() && ls.back().empty()) ls.pop_back();
  if (ls.empty()) throw format_error(1, 0, "empty sketch file");
  const auto head = detail::tokens(ls[0]);
  if (head.size() != 7 || head[0] != "#" || head[1] != "stable-sketch") {
    throw format_error(1, 0, "missing '# stable-sketch' header line");
  }
  int version = 0;
  if (!parse_integer(head[2], version)) throw format_error(1, 0, "malformed sketch version");
  if (version != kSketchVersion) throw format_error(1, 0, "unsupported sketch version " + std::to_string(version));
  SketchMatrix sk;
  sk.spec.alpha = detail::expect_double(head[3], "alpha", 1);
  const long long k = detail::expect_integer<long long>(head[4], "k", 1);
  sk.spec.seed = detail::expect_integer<std::uint64_t>(head[5], "seed", 1);
  const long long m = detail::expect_integer<long long>(head[6], "m", 1);
  if (k < 2 || m < 1) throw format_error(1, 0, "sketch header has invalid k or m");
  sk.spec.k = static_cast<std::size_t>(k);
  sk.spec.m = static_cast<std::size_t>(m);
  const std::vector<std::string_view> body(ls.begin() + 1, ls.end());
  sk.values = parse_csv_body(body, 2, sk.spec.k);
  return sk;
}

inline SketchMatrix read_sketch(const std::filesystem::path& path) { return parse_sketch(read_file(path)); }

inline void write_sketch(const std::filesystem::path& path, const SketchMatrix& sk) {
  write_file_atomic(path, format_sketch(sk));
}

}  // namespace stablesketch::io
