// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include <filesystem>
#include <string>

#include "catch_amalgamated.hpp"
#include "stablesketch/io.hpp"

namespace ss = stablesketch;
namespace fs = std::filesystem;

namespace {

template <class F>
ss::error_category category_of(F&& f) {
  try {
    f();
  } catch (const ss::error& e) {
    return e.category();
  }
  FAIL("no error thrown");
  return ss::error_category::io;
}

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / ("stablesketch_io_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("doubles print locale independently and round-trip", "[format]") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    double back = 0.0;
    REQUIRE(ss::io::parse_double(ss::io::format_double(v), back));
    CHECK(back == v);
    REQUIRE(ss::io::parse_double(ss::io::format_double17(v), back));
    CHECK(back == v);
  }
  CHECK(ss::io::format_double(1234567.5) == "1234567.5");
  double v = 0.0;
  CHECK(ss::io::parse_double(" +2.5 ", v));
  CHECK(v == 2.5);
  CHECK_FALSE(ss::io::parse_double("2,5", v));
  CHECK_FALSE(ss::io::parse_double("", v));
  CHECK_FALSE(ss::io::parse_double("1e", v));
}

TEST_CASE("weight table round-trips bit-exactly", "[table]") {
  for (bool trim : {false, true}) {
    const auto t = ss::build_weight_table(1.9, 40, trim);
    const auto text = ss::io::format_table(t);
    CHECK(text.rfind("stable-ltable 1\nalpha=1.8999999999999999 k=40 trimmed=", 0) == 0);
    const auto back = ss::io::parse_table(text);
    CHECK(back.alpha == t.alpha);
    CHECK(back.k == t.k);
    CHECK(back.trimmed == t.trimmed);
    CHECK(back.I_mu == t.I_mu);
    CHECK(back.BC == t.BC);
    CHECK(back.S == t.S);
    CHECK(back.q == t.q);
    CHECK(back.w == t.w);
    CHECK(ss::io::format_table(back) == text);
  }
}

TEST_CASE("weight table parser rejections", "[table][errors]") {
  const auto good = ss::io::format_table(ss::build_weight_table(1.0, 3, false));
  auto mutate = [&](std::string from, std::string to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("stable-ltable 1", "stable-ltable 2")); }) ==
        ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("stable-ltable", "other-table")); }) ==
        ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("k=3", "k=4")); }) == ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("k=3", "k=1")); }) == ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("k=3", "k=x")); }) == ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("trimmed=0", "trimmed=2")); }) ==
        ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("\n2 ", "\n5 ")); }) == ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("I_mu=", "I_nu=")); }) == ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table(mutate("alpha=1", "alpha=3")); }) == ss::error_category::format);
  CHECK(category_of([&] { (void)ss::io::parse_table("stable-ltable 1\n"); }) == ss::error_category::format);
  CHECK_NOTHROW(ss::io::parse_table(good));
}

TEST_CASE("dataset CSV parsing and diagnostics", "[csv]") {
  const auto d = ss::io::parse_dataset("1,2,3\n4.5,-6,7e-1\n");
  REQUIRE(d.rows() == 2);
  REQUIRE(d.cols() == 3);
  CHECK(d(1, 2) == 0.7);
  CHECK(ss::io::parse_dataset("1,2\r\n3,4").rows() == 2);

  try {
    (void)ss::io::parse_dataset("1,2,3\n4,5\n");
    FAIL("expected format error");
  } catch (const ss::format_error& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  try {
    (void)ss::io::parse_dataset("1,2\n3,4\n5,abc\n");
    FAIL("expected format error");
  } catch (const ss::format_error& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 2);
  }
  CHECK(category_of([] { (void)ss::io::parse_dataset(""); }) == ss::error_category::format);
  CHECK(category_of([] { (void)ss::io::parse_dataset("1,nan\n"); }) == ss::error_category::format);
  CHECK(category_of([] { (void)ss::io::parse_dataset("1,,2\n"); }) == ss::error_category::format);
}

TEST_CASE("sketch file round trip and header checks", "[sketch]") {
  const auto data = ss::io::parse_dataset("1,0,2\n0,1,0.5\n");
  const auto sk = ss::sketch(data, {0.7, 5, 123, 3});
  const auto text = ss::io::format_sketch(sk);
  CHECK(text.rfind("# stable-sketch 1 alpha=0.69999999999999996 k=5 seed=123 m=3\n", 0) == 0);
  const auto back = ss::io::parse_sketch(text);
  CHECK(back.spec.alpha == 0.7);
  CHECK(back.spec.k == 5);
  CHECK(back.spec.seed == 123);
  CHECK(back.spec.m == 3);
  CHECK(back.values == sk.values);
  CHECK(category_of([&] { (void)ss::io::parse_sketch(text.substr(text.find('\n') + 1)); }) ==
        ss::error_category::format);
  CHECK(category_of([] { (void)ss::io::parse_sketch("# stable-sketch 1 alpha=1 k=2 seed=0 m=1\n1,2,3\n"); }) ==
        ss::error_category::format);
  CHECK(category_of([] { (void)ss::io::parse_sketch("# stable-sketch 9 alpha=1 k=2 seed=0 m=1\n1,2\n"); }) ==
        ss::error_category::format);
}

TEST_CASE("atomic writes replace files and leave no temporaries", "[files]") {
  const auto dir = scratch_dir();
  const auto target = dir / "out.txt";
  ss::io::write_file_atomic(target, "first\n");
  ss::io::write_file_atomic(target, "second\n");
  CHECK(ss::io::read_file(target) == "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
  CHECK(category_of([&] { ss::io::write_file_atomic(dir / "missing" / "x.txt", "x"); }) == ss::error_category::io);
  CHECK(category_of([&] { (void)ss::io::read_file(dir / "absent.txt"); }) == ss::error_category::io);
  fs::remove_all(dir);
}
