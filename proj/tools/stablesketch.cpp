// Copyright 2026 The stablesketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

// stablesketch: weight tables, sketches, distance estimates and simulation
// studies from the command line.
//
// Failures print one line "error: <category>: <message>" on stderr and exit
// with a category-specific nonzero status.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <new>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "stablesketch/commands.hpp"
#include "stablesketch/stablesketch.hpp"

namespace {

namespace ss = stablesketch;
namespace cmd = stablesketch::commands;

int exit_code(ss::error_category c) {
  switch (c) {
    case ss::error_category::invalid_argument: return 2;
    case ss::error_category::numerical_failure: return 3;
    case ss::error_category::range: return 4;
    case ss::error_category::tail_underflow: return 5;
    case ss::error_category::degenerate: return 6;
    case ss::error_category::format: return 7;
    case ss::error_category::mismatch: return 8;
    case ss::error_category::io: return 9;
  }
  return 1;
}

constexpr int kValidationFailed = 10;

int fail(std::string_view category, const std::string& message, int code) {
  std::string line = message;
  for (char& ch : line) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "error: " << category << ": " << line << '\n';
  return code;
}

struct Options {
  double alpha = 0.0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string trim = "auto";
  std::size_t reps = 10000;
  std::string input;
  std::string table;
  std::string out;
  std::string pairs;
  bool all = false;
  std::string alpha_grid;
  unsigned threads = 1;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    ss::io::write_file_atomic(o.out, text);
  }
}

void require_distinct(const std::string& a, const std::string& b, const char* what) {
  if (a.empty() || b.empty()) return;
  std::error_code ec;
  const bool same = std::filesystem::weakly_canonical(a, ec) == std::filesystem::weakly_canonical(b, ec);
  ss::require(!same && a != b, std::string(what) + " and --out must name different files");
}

std::vector<double> grid_or_alpha(const Options& o, CLI::App* sub, const char* fallback) {
  if (!o.alpha_grid.empty()) return cmd::parse_alpha_grid(o.alpha_grid);
  if (sub->count("--alpha") > 0) return {o.alpha};
  return cmd::parse_alpha_grid(fallback);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable random projections and L-estimation of l_alpha distances"};
  app.require_subcommand(1);
  Options o;

  auto* table = app.add_subcommand("table", "Build a weight table for (alpha, k)");
  table->add_option("--alpha", o.alpha, "Index of stability in [0.14, 2]")->required();
  table->add_option("--k", o.k, "Sample size (sketch width)")->required();
  table->add_option("--trim", o.trim, "Negative-weight trimming: on, off or auto")->capture_default_str();
  table->add_option("--out", o.out, "Output file (default stdout)");

  auto* fisher = app.add_subcommand("fisher", "CSV alpha,I_mu,BC over an alpha grid");
  fisher->add_option("--alpha-grid", o.alpha_grid, "start:stop:step or a single value");
  fisher->add_option("--alpha", o.alpha, "Single alpha");
  fisher->add_option("--out", o.out, "Output file (default stdout)");

  auto* sketch = app.add_subcommand("sketch", "Project a CSV dataset to k dimensions");
  sketch->add_option("--input", o.input, "Dataset CSV")->required();
  sketch->add_option("--alpha", o.alpha, "Index of stability in [0.14, 2]")->required();
  sketch->add_option("--k", o.k, "Sketch width")->required();
  sketch->add_option("--seed", o.seed, "Projection seed")->capture_default_str();
  sketch->add_option("--threads", o.threads, "Worker threads; output does not depend on it")->capture_default_str();
  sketch->add_option("--out", o.out, "Output file (default stdout)");

  auto* estimate = app.add_subcommand("estimate", "CSV i,j,theta_hat,gamma_hat,se for sketch row pairs");
  estimate->add_option("--input", o.input, "Sketch file")->required();
  estimate->add_option("--table", o.table, "Weight table file")->required();
  auto* pairs_opt = estimate->add_option("--pairs", o.pairs, "i:j[,i:j...], 0-based rows");
  auto* all_opt = estimate->add_flag("--all", o.all, "All unordered pairs");
  pairs_opt->excludes(all_opt);
  estimate->add_option("--out", o.out, "Output file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "CSV alpha,k,mse_theta,mse_gamma,crlb_theta,crlb_gamma");
  simulate->add_option("--alpha-grid", o.alpha_grid, "start:stop:step or a single value");
  simulate->add_option("--alpha", o.alpha, "Single alpha");
  simulate->add_option("--k", o.k, "Sample size")->required();
  simulate->add_option("--reps", o.reps, "Replicates per alpha")->capture_default_str();
  simulate->add_option("--seed", o.seed, "Simulation seed")->capture_default_str();
  simulate->add_option("--trim", o.trim, "Negative-weight trimming: on, off or auto")->capture_default_str();
  simulate->add_option("--out", o.out, "Output file (default stdout)");

  auto* validate = app.add_subcommand("validate", "Run the numerical self-checks; optional CSV alpha,z,ell2");
  validate->add_option("--alpha-grid", o.alpha_grid, "Alpha grid for the ell2 CSV")->capture_default_str();
  validate->add_option("--seed", o.seed, "Sampler seed for the KS suite")->capture_default_str();
  validate->add_option("--out", o.out, "ell2 CSV output file (omitted: not written)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("invalid-argument", e.what(), 2);
  }

  try {
    if (*table) {
      emit(o, cmd::table_text(o.alpha, o.k, cmd::parse_trim(o.trim)));
    } else if (*fisher) {
      emit(o, cmd::fisher_csv(grid_or_alpha(o, fisher, "0.14:2.0:0.1")));
    } else if (*sketch) {
      require_distinct(o.input, o.out, "--input");
      ss::require(o.threads >= 1, "--threads must be at least 1");
      const auto data = ss::io::read_dataset(o.input);
      emit(o, cmd::sketch_text(data, o.alpha, o.k, o.seed, o.threads));
    } else if (*estimate) {
      require_distinct(o.input, o.out, "--input");
      require_distinct(o.table, o.out, "--table");
      ss::require(o.all || !o.pairs.empty(), "estimate needs --pairs or --all");
      const auto sk = ss::io::read_sketch(o.input);
      const auto tab = ss::io::read_table(o.table);
      const auto pairs = o.all ? cmd::all_pairs(sk.values.rows()) : cmd::parse_pairs(o.pairs);
      emit(o, cmd::estimate_csv(sk, tab, pairs));
    } else if (*simulate) {
      if (simulate->count("--seed") == 0) o.seed = 1;
      emit(o, cmd::simulate_csv(grid_or_alpha(o, simulate, "1.0"), o.k, o.reps, o.seed, cmd::parse_trim(o.trim)));
    } else if (*validate) {
      if (validate->count("--seed") == 0) o.seed = 1;
      const auto grid = cmd::parse_alpha_grid(o.alpha_grid.empty() ? "0.2:2.0:0.2" : o.alpha_grid);
      bool ok = true;
      for (const auto& s : {cmd::closed_form_suite(), cmd::finite_difference_suite(), cmd::sampler_suite({o.seed})}) {
        std::cout << cmd::outcome_line(s) << '\n';
        ok = ok && s.passed;
      }
      if (!o.out.empty()) ss::io::write_file_atomic(o.out, cmd::ell2_csv(grid));
      if (!ok) return fail("validation", "one or more self-check suites failed", kValidationFailed);
    }
  } catch (const ss::error& e) {
    return fail(ss::category_name(e.category()), e.what(), exit_code(e.category()));
  } catch (const std::bad_alloc&) {
    return fail("resource", "out of memory", 11);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 12);
  }
  return 0;
}
