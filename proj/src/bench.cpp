// Copyright (c) 2026 The hcr authors
// SPDX-License-Identifier: Apache-2.0

#include "hcr/bench.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "hcr/projection.hpp"
#include "hcr/region_io.hpp"

namespace hcr {

namespace {

using nlohmann::ordered_json;

constexpr std::array<Variant, 4> kVariants = {
    Variant::kSimple, Variant::kLagrangian, Variant::kProjection,
    Variant::kHcr};

Stat aggregate(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct EvalOutcome {
  RunMetrics metrics;
  bool has_time = false;
  double restricted_mean = 0.0;
};

EvalOutcome evaluate_on(const ModelParameters& params,
                        const FeasibleRegion<double>& region,
                        const AccelConfig<double>& accel, const Dataset& test,
                        bool relative_mse) {
  const Index n_test = test.size();
  const Index n = test.targets.cols();
  EvalOutcome out;

  // Warm-up predictions keep one-time costs out of the timing columns.
  const Index warmup = std::min<Index>(10, n_test);
  for (Index i = 0; i < warmup; ++i) {
    (void)predict(params, region, accel, test.inputs.row(i).transpose());
  }

  double sq_sum = 0.0, time_sum = 0.0, time_max = 0.0, restricted_sum = 0.0;
  Index inside = 0, inside_exact = 0;
  for (Index i = 0; i < n_test; ++i) {
    const VectorXd x = test.inputs.row(i).transpose();
    const Prediction pred = predict(params, region, accel, x);
    sq_sum += (pred.y - test.targets.row(i).transpose()).squaredNorm();
    if (region.is_feasible(pred.y)) ++inside;
    bool exact = true;
    for (Index c = 0; c < region.constraint_count() && exact; ++c) {
      exact = region.evaluate(c, pred.y) <= 0.0;
    }
    if (exact) ++inside_exact;
    if (pred.postprocess_seconds) {
      out.has_time = true;
      time_sum += *pred.postprocess_seconds;
      time_max = std::max(time_max, *pred.postprocess_seconds);
    }
    if (params.variant == Variant::kHcr) {
      const VectorXd d =
          normalize_direction(pred.y - region.origin());
      restricted_sum += static_cast<double>(
          restrict_constraints(region, d, accel).size());
    }
  }

  out.metrics.mse = sq_sum / static_cast<double>(n_test * n);
  if (relative_mse) {
    const VectorXd col_mean = test.targets.colwise().mean().transpose();
    const double variance = (test.targets.rowwise() - col_mean.transpose())
                                .array()
                                .square()
                                .mean();
    out.metrics.mse /= std::max(variance, 1e-300);
  }
  out.metrics.inside_ratio =
      static_cast<double>(inside) / static_cast<double>(n_test);
  out.metrics.inside_ratio_exact =
      static_cast<double>(inside_exact) / static_cast<double>(n_test);
  if (out.has_time) {
    out.metrics.avg_time_s = time_sum / static_cast<double>(n_test);
    out.metrics.max_time_s = time_max;
  }
  if (params.variant == Variant::kHcr) {
    out.restricted_mean = restricted_sum / static_cast<double>(n_test);
  }
  return out;
}

template <typename Fn>
void run_parallel(int n_runs, Fn&& fn) {
  const int workers = worker_count(n_runs);
  if (workers <= 1) {
    for (int i = 0; i < n_runs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n_runs) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> guard(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RunRow {
  std::array<RunMetrics, 4> metrics;
  std::array<bool, 4> has_time{};
  double restricted_mean = 0.0;
  bool skipped = false;
  std::string warning;
};

BenchmarkReport assemble(const std::string& task, ordered_json config,
                         const std::vector<RunRow>& rows) {
  BenchmarkReport report;
  report.task = task;
  report.config = std::move(config);

  std::vector<const RunRow*> kept;
  for (const RunRow& row : rows) {
    if (row.skipped) {
      report.warnings.push_back(row.warning);
    } else {
      kept.push_back(&row);
    }
  }
  if (kept.empty()) {
    throw Error("bench", "benchmark produced no usable runs");
  }
  report.n_runs = static_cast<int>(kept.size());

  std::vector<double> restricted;
  for (const RunRow* row : kept) restricted.push_back(row->restricted_mean);
  report.restricted_set_mean = aggregate(restricted).mean;

  for (std::size_t v = 0; v < kVariants.size(); ++v) {
    MethodReport method;
    method.name = variant_name(kVariants[v]);
    method.timing_na = !kept.front()->has_time[v];
    std::vector<double> mse, inside, inside_exact, avg_t, max_t;
    for (const RunRow* row : kept) {
      const RunMetrics& m = row->metrics[v];
      method.runs.push_back(m);
      mse.push_back(m.mse);
      inside.push_back(m.inside_ratio);
      inside_exact.push_back(m.inside_ratio_exact);
      if (!method.timing_na) {
        avg_t.push_back(m.avg_time_s);
        max_t.push_back(m.max_time_s);
      }
    }
    method.mse = aggregate(mse);
    method.inside_ratio = aggregate(inside);
    method.inside_ratio_exact = aggregate(inside_exact);
    method.avg_time_s = aggregate(avg_t);
    method.max_time_s = aggregate(max_t);
    report.methods.push_back(std::move(method));
  }

  // The constrained variants advertise a guarantee; a report that breaks it
  // must never be emitted quietly.
  for (const MethodReport& method : report.methods) {
    if ((method.name == "projection" || method.name == "hcr") &&
        method.inside_ratio.mean != 1.0) {
      throw Error("feasibility-guarantee",
                  "method '" + method.name +
                      "' produced infeasible outputs (inside ratio " +
                      std::to_string(method.inside_ratio.mean) + ")");
    }
  }
  return report;
}

void train_and_eval(const Dataset& train_data, const Dataset& test_data,
                    const FeasibleRegion<double>& region,
                    const AccelConfig<double>& accel, const TrainConfig& cfg,
                    bool relative_mse, RunRow& row) {
  for (std::size_t v = 0; v < kVariants.size(); ++v) {
    const Variant variant = kVariants[v];
    LagrangianConfig duals;
    const ModelParameters params =
        train(variant, train_data, region, cfg, accel,
              variant == Variant::kLagrangian ? &duals : nullptr);
    const EvalOutcome eval =
        evaluate_on(params, region, accel, test_data, relative_mse);
    row.metrics[v] = eval.metrics;
    row.has_time[v] = eval.has_time;
    if (variant == Variant::kHcr) row.restricted_mean = eval.restricted_mean;
  }
}

}  // namespace

int worker_count(int n_runs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HCR_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, static_cast<unsigned>(cap));
  }
  return std::max(1, std::min(n_runs, static_cast<int>(hw)));
}

BenchmarkReport run_synthetic_bench(const SyntheticSpec& spec,
                                    const std::vector<std::uint64_t>& seeds,
                                    const TrainConfig& cfg) {
  if (seeds.empty()) {
    throw std::invalid_argument("run_synthetic_bench: no seeds");
  }
  std::vector<RunRow> rows(seeds.size());
  run_parallel(static_cast<int>(seeds.size()), [&](int i) {
    SyntheticSpec run_spec = spec;
    run_spec.seed = seeds[static_cast<std::size_t>(i)];
    const SyntheticData data = gen_synthetic(run_spec);
    const auto accel = AccelConfig<double>::for_region(data.region);
    TrainConfig run_cfg = cfg;
    run_cfg.seed = seeds[static_cast<std::size_t>(i)];
    train_and_eval(data.train, data.test, data.region, accel, run_cfg,
                   /*relative_mse=*/false, rows[static_cast<std::size_t>(i)]);
  });

  ordered_json config;
  config["k"] = spec.k;
  config["n"] = spec.n;
  config["radius"] = spec.radius;
  config["n_train"] = spec.n_train;
  config["n_test"] = spec.n_test;
  config["seeds"] = seeds;
  config["epochs"] = cfg.epochs;
  config["batch_size"] = cfg.batch_size;
  config["learning_rate"] = cfg.learning_rate;
  config["hidden"] = cfg.hidden;
  return assemble("synthetic", std::move(config), rows);
}

BenchmarkReport run_timeseries_bench(const std::vector<WindowedSeries>& series,
                                     const TrainConfig& cfg) {
  if (series.empty()) {
    throw std::invalid_argument("run_timeseries_bench: no series");
  }
  std::vector<RunRow> rows(series.size());
  std::atomic<Index> constraint_count{0};
  run_parallel(static_cast<int>(series.size()), [&](int i) {
    RunRow& row = rows[static_cast<std::size_t>(i)];
    const WindowedSeries& s = series[static_cast<std::size_t>(i)];
    try {
      FeasibleRegion<double> region = build_timeseries_region(s.train);
      constraint_count.store(region.constraint_count());
      const auto accel = AccelConfig<double>::for_region(region);
      TrainConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(i);
      run_cfg.standardize_inputs = true;
      Dataset train_data = s.train;
      // Training targets define the region, so they are feasible by
      // construction; this is a guard for externally loaded data.
      for (Index r = 0; r < train_data.size(); ++r) {
        const VectorXd y = train_data.targets.row(r).transpose();
        if (!region.is_feasible(y)) {
          train_data.targets.row(r) = project(region, y).transpose();
        }
      }
      train_and_eval(train_data, s.test, region, accel, run_cfg,
                     /*relative_mse=*/true, row);
    } catch (const DegenerateRegion& e) {
      row.skipped = true;
      row.warning =
          "series " + std::to_string(i) + " skipped: " + e.what();
    }
  });

  ordered_json config;
  config["n"] = series.front().train.targets.cols();
  config["n_series"] = series.size();
  config["constraints_per_region"] = constraint_count.load();
  config["epochs"] = cfg.epochs;
  config["batch_size"] = cfg.batch_size;
  config["learning_rate"] = cfg.learning_rate;
  config["hidden"] = cfg.hidden;
  config["base_seed"] = cfg.seed;
  return assemble("timeseries", std::move(config), rows);
}

RoundtripReport run_roundtrip_check(const std::string& region_path,
                                    int n_points, std::uint64_t seed) {
  const FeasibleRegion<double> region = load_region(region_path);
  const auto accel = AccelConfig<double>::for_region(region);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RoundtripReport report;
  report.n_points = n_points;
  VectorXd raw(region.dimension());
  for (int i = 0; i < n_points; ++i) {
    for (Index j = 0; j < raw.size(); ++j) raw[j] = gauss(rng);
    const double r = (i % 100 == 0) ? 0.0 : unit(rng);
    const HypersphericalCoord<double> coord{normalize_direction(raw),
                                            r};
    const VectorXd y = from_hyperspherical(region, coord, accel);
    if (!region.is_feasible(y)) {
      ++report.infeasible_count;
      continue;
    }
    const auto back = to_hyperspherical(region, y, accel);
    const VectorXd again = from_hyperspherical(region, back, accel);
    report.max_error = std::max(report.max_error, (again - y).norm());
  }
  return report;
}

namespace {

ordered_json stat_to_json(const Stat& s) {
  return ordered_json{{"mean", s.mean}, {"stddev", s.stddev}};
}

}  // namespace

ordered_json report_to_json(const BenchmarkReport& report) {
  ordered_json j;
  j["task"] = report.task;
  j["config"] = report.config;
  j["n_runs"] = report.n_runs;
  j["restricted_set_mean"] = report.restricted_set_mean;
  j["warnings"] = report.warnings;
  j["methods"] = ordered_json::array();
  for (const MethodReport& method : report.methods) {
    ordered_json m;
    m["name"] = method.name;
    m["mse"] = stat_to_json(method.mse);
    m["inside_ratio"] = stat_to_json(method.inside_ratio);
    m["inside_ratio_exact"] = stat_to_json(method.inside_ratio_exact);
    if (method.timing_na) {
      m["avg_time_s"] = nullptr;
      m["max_time_s"] = nullptr;
    } else {
      m["avg_time_s"] = stat_to_json(method.avg_time_s);
      m["max_time_s"] = stat_to_json(method.max_time_s);
    }
    m["runs"] = ordered_json::array();
    for (const RunMetrics& run : method.runs) {
      ordered_json r;
      r["mse"] = run.mse;
      r["inside_ratio"] = run.inside_ratio;
      r["inside_ratio_exact"] = run.inside_ratio_exact;
      if (!method.timing_na) {
        r["avg_time_s"] = run.avg_time_s;
        r["max_time_s"] = run.max_time_s;
      }
      m["runs"].push_back(std::move(r));
    }
    j["methods"].push_back(std::move(m));
  }
  return j;
}

std::string report_to_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "method,mse_mean,mse_stddev,inside_ratio_mean,inside_ratio_stddev,"
         "inside_exact_mean,inside_exact_stddev,avg_time_s_mean,"
         "avg_time_s_stddev,max_time_s_mean,max_time_s_stddev\n";
  out << std::setprecision(17);
  for (const MethodReport& method : report.methods) {
    out << method.name << ',' << method.mse.mean << ',' << method.mse.stddev
        << ',' << method.inside_ratio.mean << ',' << method.inside_ratio.stddev
        << ',' << method.inside_ratio_exact.mean << ','
        << method.inside_ratio_exact.stddev << ',';
    if (method.timing_na) {
      out << ",,,";
    } else {
      out << method.avg_time_s.mean << ',' << method.avg_time_s.stddev << ','
          << method.max_time_s.mean << ',' << method.max_time_s.stddev;
    }
    out << '\n';
  }
  return out.str();
}

void print_report(const BenchmarkReport& report, std::ostream& out) {
  out << "task: " << report.task << "  runs: " << report.n_runs
      << "  restricted-set mean: " << std::fixed << std::setprecision(2)
      << report.restricted_set_mean << "\n";
  out.unsetf(std::ios_base::floatfield);
  for (const std::string& warning : report.warnings) {
    out << "warning: " << warning << "\n";
  }
  out << std::left << std::setw(12) << "method" << std::setw(25) << "mse"
      << std::setw(25) << "inside" << std::setw(25) << "inside(exact)"
      << std::setw(25) << "avg time [s]" << "max time [s]\n";
  auto cell = [](const Stat& s) {
    std::ostringstream c;
    c << std::scientific << std::setprecision(3) << s.mean << " +- "
      << s.stddev;
    return c.str();
  };
  for (const MethodReport& method : report.methods) {
    out << std::left << std::setw(12) << method.name << std::setw(25)
        << cell(method.mse) << std::setw(25) << cell(method.inside_ratio)
        << std::setw(25) << cell(method.inside_ratio_exact);
    if (method.timing_na) {
      out << std::setw(25) << "NA" << "NA\n";
    } else {
      out << std::setw(25) << cell(method.avg_time_s)
          << cell(method.max_time_s) << "\n";
    }
  }
}

}  // namespace hcr
