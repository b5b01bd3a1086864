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

#include "odkanon/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "json.hpp"
#include "odkanon/error.hpp"

namespace odk {

using nlohmann::json;

namespace {

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig cfg;
  if (j.contains("n_trips")) cfg.n_trips = j["n_trips"].get<std::int64_t>();
  if (j.contains("target_resolution"))
    cfg.target_resolution = j["target_resolution"].get<int>();
  if (j.contains("n_hotspots")) cfg.n_hotspots = j["n_hotspots"].get<int>();
  if (j.contains("hotspot_concentration"))
    cfg.hotspot_concentration = j["hotspot_concentration"].get<double>();
  if (j.contains("weight_mu"))
    cfg.weight_distribution.mu = j["weight_mu"].get<double>();
  if (j.contains("weight_sigma"))
    cfg.weight_distribution.sigma = j["weight_sigma"].get<double>();
  if (j.contains("trips_per_participant"))
    cfg.trips_per_participant = j["trips_per_participant"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("segments"))
    for (const auto& [attribute, categories] : j["segments"].items())
      cfg.segment_schema[attribute] =
          categories.get<std::vector<std::string>>();
  return cfg;
}

std::vector<Mode> parse_modes(const json& j) {
  std::vector<Mode> modes;
  for (const auto& m : j) modes.push_back(parse_mode(m.get<std::string>()));
  return modes;
}

}  // namespace

BenchPlan parse_bench_plan(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kParse, "invalid bench plan JSON");

  BenchPlan plan;
  if (!j.contains("algorithms") || !j.contains("datasets"))
    fail(ErrorCode::kInvalidConfig,
         "bench plan needs 'algorithms' and 'datasets'");
  for (const auto& a : j["algorithms"])
    plan.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  if (j.contains("base_k")) plan.base_k = j["base_k"].get<double>();
  plan.protect_modes = j.contains("protect_modes")
                           ? parse_modes(j["protect_modes"])
                           : std::vector<Mode>{Mode::kParticipant};
  plan.eval_modes = j.contains("eval_modes")
                        ? parse_modes(j["eval_modes"])
                        : std::vector<Mode>{Mode::kParticipant};
  if (j.contains("time_limit_s"))
    plan.time_limit_s = j["time_limit_s"].get<double>();
  if (plan.time_limit_s <= 0.0)
    fail(ErrorCode::kInvalidConfig, "time_limit_s must be > 0");
  if (j.contains("suppression_budget"))
    plan.suppression_budget = j["suppression_budget"].get<double>();
  if (j.contains("max_gen_levels"))
    plan.max_gen_levels = j["max_gen_levels"].get<int>();
  if (j.contains("threads")) plan.threads = j["threads"].get<int>();
  if (j.contains("output_dir"))
    plan.output_dir = j["output_dir"].get<std::string>();

  for (const auto& d : j["datasets"]) {
    BenchDatasetSpec spec;
    if (!d.contains("name"))
      fail(ErrorCode::kInvalidConfig, "bench dataset needs a name");
    spec.name = d["name"].get<std::string>();
    if (d.contains("synth")) {
      spec.synth = synth_config_from_json(d["synth"]);
    } else if (d.contains("trips_csv")) {
      spec.trips_csv = d["trips_csv"].get<std::string>();
      if (!d.contains("hierarchy"))
        fail(ErrorCode::kInvalidConfig,
             "dataset '" + spec.name + "' needs a hierarchy spec");
      spec.hierarchy_spec = d["hierarchy"].get<std::string>();
      if (d.contains("centroids"))
        spec.centroid_csv = d["centroids"].get<std::string>();
    } else {
      fail(ErrorCode::kInvalidConfig,
           "dataset '" + spec.name + "' needs 'synth' or 'trips_csv'");
    }
    if (d.contains("segment_by") && !d["segment_by"].is_null())
      spec.segment_by = d["segment_by"].get<std::string>();
    plan.datasets.push_back(std::move(spec));
  }
  return plan;
}

BenchPlan load_bench_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open plan: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bench_plan(buf.str());
}

namespace {

struct BenchCell {
  Algorithm algorithm;
  std::string segment;
  Mode protect_mode;
  DatasetPtr dataset;
  std::size_t first_row = 0;  // rows are laid out per eval mode
};

int worker_count(const BenchPlan& plan, std::size_t cells) {
  int n = plan.threads > 0 ? plan.threads
                           : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("ODKANON_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::min<int>(n, static_cast<int>(cells ? cells : 1));
}

}  // namespace

std::string BenchReport::to_csv() const {
  std::string out = metrics_csv_header();
  for (const BenchRow& row : rows) {
    if (row.metrics) {
      out += metrics_csv_row(row.algorithm, row.segment, row.protect_mode,
                             *row.metrics);
      continue;
    }
    out += row.algorithm + "," + row.segment + "," + row.protect_mode + "," +
           row.eval_mode + ",N/A,N/A,N/A,N/A," + csv::format_double(row.time_s) +
           "\n";
  }
  return out;
}

std::string BenchReport::to_json() const {
  json out = json::array();
  for (const BenchRow& row : rows) {
    json r{{"algorithm", row.algorithm},
           {"segment", row.segment},
           {"protect_mode", row.protect_mode},
           {"eval_mode", row.eval_mode},
           {"time_s", row.time_s}};
    if (row.metrics) {
      r["status"] = "ok";
      r["metrics"] = json::parse(metrics_report_json(*row.metrics));
    } else {
      r["status"] = "N/A";
      r["reason"] = row.timed_out ? "timeout" : row.error;
    }
    out.push_back(std::move(r));
  }
  return out.dump(2);
}

BenchReport run_benchmark(const BenchPlan& plan) {
  namespace fs = std::filesystem;

  // Materialize each dataset once and expand segments up front; a broken
  // dataset marks its own cells N/A instead of aborting the sweep. Cell
  // order (and so report order) is fixed by the plan, not by scheduling.
  struct LoadedDataset {
    std::vector<std::pair<std::string, DatasetPtr>> segments;
    std::string error;
  };
  std::vector<LoadedDataset> loaded;
  for (const BenchDatasetSpec& spec : plan.datasets) {
    LoadedDataset entry;
    try {
      DatasetPtr ds =
          spec.synth ? gen_synthetic(*spec.synth)
                     : load_trips(spec.trips_csv,
                                  parse_hierarchy_spec(spec.hierarchy_spec,
                                                       spec.centroid_csv));
      if (spec.segment_by) {
        for (auto& [category, segment_ds] : segment(ds, *spec.segment_by))
          entry.segments.emplace_back(spec.name + ":" + category, segment_ds);
      } else {
        entry.segments.emplace_back(spec.name, ds);
      }
    } catch (const Error& e) {
      entry.error = e.what();
      entry.segments.emplace_back(spec.name, nullptr);
    }
    loaded.push_back(std::move(entry));
  }

  std::vector<BenchCell> cells;
  BenchReport report;
  for (Algorithm algorithm : plan.algorithms) {
    for (const LoadedDataset& entry : loaded) {
      for (const auto& [segment_name, segment_ds] : entry.segments) {
        for (Mode protect : plan.protect_modes) {
          BenchCell cell{algorithm, segment_name, protect, segment_ds,
                         report.rows.size()};
          for (Mode eval : plan.eval_modes) {
            BenchRow row;
            row.algorithm = algorithm_name(algorithm);
            row.segment = segment_name;
            row.protect_mode = mode_name(protect);
            row.eval_mode = mode_name(eval);
            row.error = entry.error;  // pre-marked N/A when loading failed
            report.rows.push_back(std::move(row));
          }
          if (segment_ds) cells.push_back(std::move(cell));
        }
      }
    }
  }

  auto run_cell = [&](const BenchCell& cell) {
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           started)
          .count();
    };
    try {
      RunConfig cfg;
      cfg.algorithm = cell.algorithm;
      cfg.base_k = plan.base_k;
      cfg.protect_mode = cell.protect_mode;
      cfg.suppression_budget = plan.suppression_budget;
      cfg.max_gen_levels = plan.max_gen_levels;
      cfg.time_limit_s = plan.time_limit_s;
      RunOutput run = run_anonymization(cell.dataset, cfg);

      fs::path dir = fs::path(plan.output_dir) /
                     algorithm_name(cell.algorithm) / cell.segment /
                     mode_name(cell.protect_mode);
      write_run_outputs(run, dir.string(), "bench",
                        json{{"segment", cell.segment}}.dump());

      for (std::size_t i = 0; i < plan.eval_modes.size(); ++i) {
        BenchRow& row = report.rows[cell.first_row + i];
        try {
          row.metrics = compute_metrics(run, plan.eval_modes[i]);
        } catch (const Error& e) {
          row.error = e.what();
        }
        row.time_s = run.wall_time_s;
      }
    } catch (const Error& e) {
      for (std::size_t i = 0; i < plan.eval_modes.size(); ++i) {
        BenchRow& row = report.rows[cell.first_row + i];
        row.timed_out = e.code() == ErrorCode::kTimeout;
        row.error = e.what();
        row.time_s = elapsed();
      }
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      run_cell(cells[i]);
    }
  };
  const int n_workers = worker_count(plan, cells.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  fs::create_directories(plan.output_dir);
  csv::write_file((fs::path(plan.output_dir) / "report.csv").string(),
                  report.to_csv());
  csv::write_file((fs::path(plan.output_dir) / "report.json").string(),
                  report.to_json() + "\n");
  return report;
}

}  // namespace odk
