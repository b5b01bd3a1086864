// Copyright 2026 The ODkAnon Authors
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

#ifndef ODKANON_BENCH_HPP_
#define ODKANON_BENCH_HPP_

#include <optional>
#include <string>
#include <vector>

#include "odkanon/pipeline.hpp"
#include "odkanon/synth.hpp"

namespace odk {

struct BenchDatasetSpec {
  std::string name;
  std::optional<SynthConfig> synth;     // either a generator config...
  std::string trips_csv;                // ...or a trips file
  std::string hierarchy_spec;           // required with trips_csv
  std::optional<std::string> centroid_csv;
  std::optional<std::string> segment_by;  // expand one cell per category
};

struct BenchPlan {
  std::vector<Algorithm> algorithms;
  std::vector<BenchDatasetSpec> datasets;
  double base_k = 10.0;
  std::vector<Mode> protect_modes;
  std::vector<Mode> eval_modes;
  double time_limit_s = 7200.0;
  double suppression_budget = 0.1;
  int max_gen_levels = 5;
  int threads = 0;  // 0 = hardware concurrency; ODKANON_THREADS caps it
  std::string output_dir = "bench_out";
};

BenchPlan parse_bench_plan(const std::string& json_text);
BenchPlan load_bench_plan(const std::string& path);

// One report row per (algorithm, segment, protect_mode, eval_mode). Cells
// that blow the budget or fail carry status N/A with the reason; sibling
// cells are unaffected.
struct BenchRow {
  std::string algorithm;
  std::string segment;
  std::string protect_mode;
  std::string eval_mode;
  std::optional<MetricsReport> metrics;
  bool timed_out = false;
  std::string error;  // message for non-timeout failures
  double time_s = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string to_csv() const;
  std::string to_json() const;
};

// Runs the plan's cells in a worker pool, writes per-cell artifacts under
// `<output_dir>/<algorithm>/<segment>/<protect_mode>/` plus the
// consolidated report.csv / report.json, and returns the report.
BenchReport run_benchmark(const BenchPlan& plan);

}  // namespace odk

#endif  // ODKANON_BENCH_HPP_
