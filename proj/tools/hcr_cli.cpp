// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hcr/bench.hpp"
#include "hcr/region_io.hpp"

namespace {

using hcr::Index;
using hcr::VectorXd;
using nlohmann::ordered_json;

// Stable exit codes per error category; see README.
int exit_code_for(const std::string& category) {
  static const std::map<std::string, int> codes = {
      {"io", 3},
      {"parse", 4},
      {"dimension-mismatch", 5},
      {"invalid-region", 6},
      {"infeasible-input", 7},
      {"infeasible-targets", 8},
      {"non-finite-loss", 9},
      {"escape-bound", 10},
      {"no-sign-change", 11},
      {"max-iter", 12},
      {"not-converged", 13},
      {"degenerate-region", 14},
      {"feasibility-guarantee", 15},
      {"bench", 16},
  };
  const auto it = codes.find(category);
  return it == codes.end() ? 70 : it->second;
}

VectorXd parse_point(const std::string& text) {
  std::vector<double> values;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string cell =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      while (used < cell.size() &&
             (cell[used] == ' ' || cell[used] == '\t')) {
        ++used;
      }
      if (used != cell.size()) throw std::invalid_argument(cell);
      values.push_back(v);
    } catch (const std::exception&) {
      throw hcr::ParseError("--point: bad coordinate '" + cell + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.empty()) throw hcr::ParseError("--point: empty point");
  VectorXd y(static_cast<Index>(values.size()));
  for (Index i = 0; i < y.size(); ++i) {
    y[i] = values[static_cast<std::size_t>(i)];
  }
  return y;
}

std::string number_text(double v) { return ordered_json(v).dump(); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw hcr::IoError("cannot write " + path);
  out << text;
  if (!out) throw hcr::IoError("failed writing " + path);
}

void emit_report(const hcr::BenchmarkReport& report,
                 const std::string& out_json, const std::string& out_csv) {
  hcr::print_report(report, std::cout);
  if (!out_json.empty()) {
    write_text_file(out_json, hcr::report_to_json(report).dump(2) + "\n");
    std::cout << "wrote " << out_json << "\n";
  }
  if (!out_csv.empty()) {
    write_text_file(out_csv, hcr::report_to_csv(report));
    std::cout << "wrote " << out_csv << "\n";
  }
}

struct BenchOptions {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  Index hidden = 128;
  std::string out_json;
  std::string out_csv;
};

void add_train_options(CLI::App* cmd, BenchOptions& opt) {
  cmd->add_option("--epochs", opt.epochs, "training epochs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--batch", opt.batch_size, "minibatch size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lr", opt.learning_rate, "Adam learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--hidden", opt.hidden, "encoder width")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opt.out_json, "write the JSON report here");
  cmd->add_option("--out-csv", opt.out_csv, "write the CSV report here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Constrained regression benchmark: feasible-by-construction "
      "hyperspherical outputs vs. projection and penalty baselines"};
  app.require_subcommand(1);

  // bench-synthetic
  auto* synthetic = app.add_subcommand(
      "bench-synthetic", "train and evaluate all methods on the ball task");
  hcr::SyntheticSpec spec;
  int n_seeds = 10;
  std::uint64_t seed_base = 0;
  BenchOptions syn_opt;
  synthetic->add_option("--k", spec.k, "input dimension")
      ->check(CLI::PositiveNumber);
  synthetic->add_option("--n", spec.n, "output dimension")
      ->check(CLI::PositiveNumber);
  synthetic->add_option("--radius", spec.radius, "ball radius")
      ->check(CLI::PositiveNumber);
  synthetic->add_option("--train", spec.n_train, "training samples")
      ->check(CLI::PositiveNumber);
  synthetic->add_option("--test", spec.n_test, "test samples")
      ->check(CLI::PositiveNumber);
  synthetic->add_option("--seeds", n_seeds, "number of seeds")
      ->check(CLI::PositiveNumber);
  synthetic->add_option("--seed-base", seed_base, "first seed value");
  add_train_options(synthetic, syn_opt);

  // bench-timeseries
  auto* timeseries = app.add_subcommand(
      "bench-timeseries",
      "train and evaluate all methods on windowed series under the "
      "box-plus-max-step polytope");
  std::string series_dir;
  std::string column;
  bool use_synthetic = false;
  Index window = 48;
  int n_series = 30;
  std::uint64_t ts_seed = 0;
  BenchOptions ts_opt;
  timeseries->add_option("--series-dir", series_dir,
                         "directory of CSV series (one file per series)");
  timeseries->add_flag("--synthetic", use_synthetic,
                       "generate random-walk series instead");
  timeseries->add_option("--column", column,
                         "CSV column name (single-column files otherwise)");
  timeseries->add_option("--n", window, "window length")
      ->check(CLI::PositiveNumber);
  timeseries->add_option("--count", n_series, "number of synthetic series")
      ->check(CLI::PositiveNumber);
  timeseries->add_option("--seed", ts_seed, "generator / training seed");
  add_train_options(timeseries, ts_opt);

  // roundtrip
  auto* roundtrip = app.add_subcommand(
      "roundtrip", "sample the region and measure conversion error");
  std::string rt_region;
  int rt_points = 10000;
  std::uint64_t rt_seed = 0;
  roundtrip->add_option("--region", rt_region, "region JSON file")
      ->required();
  roundtrip->add_option("--points", rt_points, "number of samples")
      ->check(CLI::PositiveNumber);
  roundtrip->add_option("--seed", rt_seed, "sampling seed");

  // convert
  auto* convert = app.add_subcommand(
      "convert", "print the hyperspherical coordinates of one point");
  std::string cv_region;
  std::string cv_point;
  convert->add_option("--region", cv_region, "region JSON file")->required();
  convert->add_option("--point", cv_point, "comma-separated coordinates")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synthetic) {
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < n_seeds; ++i) {
        seeds.push_back(seed_base + static_cast<std::uint64_t>(i));
      }
      hcr::TrainConfig cfg;
      cfg.epochs = syn_opt.epochs;
      cfg.batch_size = syn_opt.batch_size;
      cfg.learning_rate = syn_opt.learning_rate;
      cfg.hidden = syn_opt.hidden;
      emit_report(hcr::run_synthetic_bench(spec, seeds, cfg),
                  syn_opt.out_json, syn_opt.out_csv);
    } else if (*timeseries) {
      std::vector<hcr::WindowedSeries> series;
      if (!series_dir.empty()) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry :
             std::filesystem::directory_iterator(series_dir)) {
          if (entry.path().extension() == ".csv") {
            files.push_back(entry.path());
          }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
          throw hcr::IoError("no .csv files in " + series_dir);
        }
        for (const auto& file : files) {
          const auto values = hcr::load_csv_series(file.string(), column);
          try {
            series.push_back(hcr::windows_from_series(values, window));
          } catch (const std::invalid_argument& e) {
            std::cerr << "warning: skipping " << file.string() << ": "
                      << e.what() << "\n";
          }
        }
        if (series.empty()) {
          throw hcr::Error("bench", "no usable series in " + series_dir);
        }
      } else {
        series = hcr::gen_synthetic_timeseries(n_series, window, ts_seed);
      }
      hcr::TrainConfig cfg;
      cfg.epochs = ts_opt.epochs;
      cfg.batch_size = ts_opt.batch_size;
      cfg.learning_rate = ts_opt.learning_rate;
      cfg.hidden = ts_opt.hidden;
      cfg.seed = ts_seed;
      cfg.standardize_inputs = true;
      emit_report(hcr::run_timeseries_bench(series, cfg), ts_opt.out_json,
                  ts_opt.out_csv);
    } else if (*roundtrip) {
      const hcr::RoundtripReport report =
          hcr::run_roundtrip_check(rt_region, rt_points, rt_seed);
      std::cout << "points: " << report.n_points << "\n"
                << "max roundtrip error: " << number_text(report.max_error)
                << "\n"
                << "infeasible reconstructions: " << report.infeasible_count
                << "\n";
      if (report.infeasible_count > 0) {
        throw hcr::Error("feasibility-guarantee",
                         "roundtrip produced infeasible reconstructions");
      }
    } else if (*convert) {
      const hcr::FeasibleRegion<double> region = hcr::load_region(cv_region);
      const auto accel = hcr::AccelConfig<double>::for_region(region);
      const VectorXd y = parse_point(cv_point);
      const auto coord = hcr::to_hyperspherical(region, y, accel);
      const auto hit = hcr::frontier_distance(region, coord.direction, accel);
      ordered_json d = ordered_json::array();
      for (Index i = 0; i < coord.direction.size(); ++i) {
        d.push_back(coord.direction[i]);
      }
      std::cout << "d: " << d.dump() << "\n"
                << "r: " << number_text(coord.radius) << "\n"
                << "s: " << number_text(hit.distance) << "\n";
    }
  } catch (const hcr::Error& e) {
    std::cerr << "error [" << e.category() << "]: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
