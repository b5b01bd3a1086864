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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "odkanon/bench.hpp"
#include "odkanon/error.hpp"
#include "odkanon/synth.hpp"

using namespace odk;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// report.csv minus the trailing time_s column
std::string strip_times(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    auto comma = line.rfind(',');
    out += line.substr(0, comma);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic byte for byte") {
  SynthConfig cfg;
  cfg.n_trips = 500;
  cfg.target_resolution = 4;
  cfg.weight_distribution = {0.5, 1.3};
  cfg.segment_schema = {{"sex", {"M", "F"}}, {"age", {"a1", "a2", "a3"}}};
  cfg.seed = 1;
  auto a = gen_synthetic(cfg);
  auto b = gen_synthetic(cfg);
  CHECK(trips_to_csv(*a) == trips_to_csv(*b));
  cfg.seed = 2;
  CHECK(trips_to_csv(*gen_synthetic(cfg)) != trips_to_csv(*a));
}

TEST_CASE("degenerate mixture collapses to one pair") {
  SynthConfig cfg;
  cfg.n_trips = 100;
  cfg.target_resolution = 4;
  cfg.n_hotspots = 1;
  cfg.hotspot_concentration = 1.0;
  cfg.seed = 3;
  auto ds = gen_synthetic(cfg);
  std::set<std::pair<std::string, std::string>> pairs;
  for (const TripRecord& r : ds->records())
    pairs.insert({r.origin.token(), r.destination.token()});
  CHECK(pairs.size() == 1);
}

TEST_CASE("large generations stay sparse") {
  SynthConfig cfg;
  cfg.n_trips = 10000;
  cfg.target_resolution = 6;
  cfg.n_hotspots = 30;
  cfg.seed = 4;
  auto ds = gen_synthetic(cfg);
  CHECK(ds->size() == 10000);
  SparseOD od = build_od(*ds, Mode::kParticipant);
  CHECK(od.size() <= 10000);  // far below the 7^12 dense pair space
  CHECK(od.size() > 100);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.n_trips = 0;
  CHECK_THROWS_AS((void)gen_synthetic(cfg), Error);
  cfg.n_trips = 10;
  cfg.hotspot_concentration = 0.0;
  CHECK_THROWS_AS((void)gen_synthetic(cfg), Error);
  cfg.hotspot_concentration = 0.5;
  cfg.segment_schema = {{"sex", {}}};
  CHECK_THROWS_AS((void)gen_synthetic(cfg), Error);
}

TEST_CASE("bench plan runs every cell exactly once") {
  fs::path dir = fresh_dir("odk_bench_ok");
  std::string plan_json = R"({
    "algorithms": ["odkanon", "oigh", "mondrian"],
    "base_k": 5,
    "protect_modes": ["participant"],
    "eval_modes": ["participant", "population"],
    "time_limit_s": 600,
    "output_dir": ")" + dir.string() + R"(",
    "datasets": [
      {"name": "tiny", "synth": {"n_trips": 300, "target_resolution": 3,
       "n_hotspots": 4, "hotspot_concentration": 0.8, "weight_sigma": 0.8,
       "seed": 5, "segments": {"sex": ["M", "F"]}}, "segment_by": "sex"}
    ]
  })";
  BenchPlan plan = parse_bench_plan(plan_json);
  BenchReport report = run_benchmark(plan);

  // 3 algorithms x 2 segments x 1 protect mode x 2 eval modes
  CHECK(report.rows.size() == 12);
  std::set<std::string> cells;
  for (const BenchRow& row : report.rows) {
    CHECK(cells
              .insert(row.algorithm + "|" + row.segment + "|" +
                      row.protect_mode + "|" + row.eval_mode)
              .second);
    REQUIRE(row.metrics.has_value());
    if (row.algorithm == "mondrian") {
      CHECK_FALSE(row.metrics->g_bar.has_value());
      CHECK_FALSE(row.metrics->recon_loss.has_value());
    } else {
      CHECK(row.metrics->g_bar.has_value());
      CHECK(row.metrics->recon_loss.has_value());
    }
  }
  CHECK(fs::exists(dir / "report.csv"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "odkanon" / "tiny:M" / "participant" /
                   "manifest.json"));
}

TEST_CASE("bench repeats identically apart from timings") {
  fs::path dir_a = fresh_dir("odk_bench_rep_a");
  fs::path dir_b = fresh_dir("odk_bench_rep_b");
  auto plan_for = [](const fs::path& dir) {
    return parse_bench_plan(R"({
      "algorithms": ["odkanon", "oigh"],
      "base_k": 5,
      "protect_modes": ["participant", "population"],
      "eval_modes": ["participant"],
      "time_limit_s": 600,
      "threads": 2,
      "output_dir": ")" + dir.string() + R"(",
      "datasets": [
        {"name": "d", "synth": {"n_trips": 400, "target_resolution": 3,
         "weight_sigma": 1.0, "seed": 9}}
      ]
    })");
  };
  BenchReport a = run_benchmark(plan_for(dir_a));
  BenchReport b = run_benchmark(plan_for(dir_b));
  CHECK(strip_times(a.to_csv()) == strip_times(b.to_csv()));
}

TEST_CASE("a millisecond budget leaves every cell N/A") {
  fs::path dir = fresh_dir("odk_bench_timeout");
  BenchPlan plan = parse_bench_plan(R"({
    "algorithms": ["odkanon", "oigh", "mondrian"],
    "base_k": 5,
    "protect_modes": ["participant"],
    "eval_modes": ["participant"],
    "time_limit_s": 0.001,
    "output_dir": ")" + dir.string() + R"(",
    "datasets": [
      {"name": "big", "synth": {"n_trips": 20000, "target_resolution": 5,
       "n_hotspots": 50, "seed": 6}}
    ]
  })");
  BenchReport report = run_benchmark(plan);
  REQUIRE(report.rows.size() == 3);
  for (const BenchRow& row : report.rows) {
    CHECK_FALSE(row.metrics.has_value());
    CHECK(row.timed_out);
  }
  std::ifstream in(dir / "report.csv");
  std::string csv((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(csv.find("N/A") != std::string::npos);
}

TEST_CASE("a broken dataset marks only its own cells") {
  fs::path dir = fresh_dir("odk_bench_partial");
  BenchPlan plan = parse_bench_plan(R"({
    "algorithms": ["oigh"],
    "base_k": 5,
    "protect_modes": ["participant"],
    "eval_modes": ["participant"],
    "time_limit_s": 600,
    "output_dir": ")" + dir.string() + R"(",
    "datasets": [
      {"name": "ok", "synth": {"n_trips": 200, "target_resolution": 3,
       "seed": 7}},
      {"name": "broken", "trips_csv": "/nonexistent/trips.csv",
       "hierarchy": "synthetic:3"}
    ]
  })");
  BenchReport report = run_benchmark(plan);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].metrics.has_value());
  CHECK_FALSE(report.rows[1].metrics.has_value());
  CHECK_FALSE(report.rows[1].error.empty());
}
