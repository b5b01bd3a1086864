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

#include "odkanon/pipeline.hpp"

#include <chrono>
#include <filesystem>

#include "csv.hpp"
#include "json.hpp"
#include "odkanon/error.hpp"

namespace odk {

using nlohmann::json;

namespace {

// Zone map exports enumerate full coverage; absurdly deep synthetic roots
// would not fit on disk, so exports past this many leaves list only the
// data-bearing ones (flagged in the manifest).
constexpr std::uint64_t kZoneMapExportCap = 5'000'000;

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kOdkAnon: return "odkanon";
    case Algorithm::kOigh: return "oigh";
    case Algorithm::kMondrian: return "mondrian";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "odkanon") return Algorithm::kOdkAnon;
  if (name == "oigh") return Algorithm::kOigh;
  if (name == "mondrian") return Algorithm::kMondrian;
  fail(ErrorCode::kInvalidArgument,
       "algorithm must be odkanon, oigh or mondrian, got '" + name + "'");
}

const SparseOD& RunOutput::released_matrix() const {
  if (generalization) return generalization->matrix;
  if (oigh_result) return oigh_result->matrix;
  fail(ErrorCode::kNotApplicable, "mondrian releases regions, not a matrix");
}

const ZonePartition& RunOutput::origins() const {
  if (generalization) return generalization->origins;
  if (oigh_result) return oigh_result->origins;
  fail(ErrorCode::kNotApplicable, "no zone partition for mondrian");
}

const ZonePartition& RunOutput::destinations() const {
  if (generalization) return generalization->destinations;
  if (oigh_result) return oigh_result->destinations;
  fail(ErrorCode::kNotApplicable, "no zone partition for mondrian");
}

RunOutput run_anonymization(DatasetPtr ds, const RunConfig& cfg) {
  if (!ds) fail(ErrorCode::kInvalidArgument, "null dataset");
  if (ds->records().empty())
    fail(ErrorCode::kEmptyDataset, "cannot anonymize an empty dataset");
  const auto started = std::chrono::steady_clock::now();
  Deadline deadline = cfg.time_limit_s > 0.0
                          ? Deadline::after_seconds(cfg.time_limit_s)
                          : Deadline::none();

  RunOutput run{cfg,
                ds,
                effective_k(cfg.base_k, *ds, cfg.protect_mode),
                build_od(*ds, cfg.protect_mode),
                {},
                std::nullopt,
                std::nullopt,
                std::nullopt,
                Termination::kReachedK,
                0.0};

  switch (cfg.algorithm) {
    case Algorithm::kOdkAnon: {
      SuppressionConfig scfg{run.effective_k, cfg.max_gen_levels,
                             cfg.suppression_budget};
      auto [filtered, report] =
          prefilter(run.original_od, *ds->hierarchy(), scfg);
      run.suppression = std::move(report);
      if (filtered.empty())
        fail(ErrorCode::kEmptyMatrix, "suppression removed every OD pair");
      deadline.check();
      auto tree_o = CountTree::build(filtered, ds->hierarchy(),
                                     Endpoint::kOrigin);
      auto tree_d = CountTree::build(filtered, ds->hierarchy(),
                                     Endpoint::kDestination);
      deadline.check();
      run.generalization =
          anonymize(filtered, tree_o, tree_d, run.effective_k, deadline);
      run.termination = run.generalization->terminated;
      break;
    }
    case Algorithm::kOigh: {
      auto tree_o = CountTree::build(run.original_od, ds->hierarchy(),
                                     Endpoint::kOrigin);
      auto tree_d = CountTree::build(run.original_od, ds->hierarchy(),
                                     Endpoint::kDestination);
      run.oigh_result = oigh(run.original_od, tree_o, tree_d,
                             run.effective_k, deadline);
      run.termination = run.oigh_result->feasible ? Termination::kReachedK
                                                  : Termination::kExhausted;
      break;
    }
    case Algorithm::kMondrian: {
      run.mondrian_result = mondrian(*ds, *ds->hierarchy(), run.effective_k,
                                     cfg.protect_mode, deadline);
      run.termination = Termination::kReachedK;
      break;
    }
  }

  run.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  return run;
}

MetricsReport compute_metrics(const RunOutput& run, Mode eval_mode) {
  MetricsReport report;
  report.evaluation_mode = eval_mode;
  report.eval_k = effective_k(run.config.base_k, *run.dataset, eval_mode);
  report.wall_time_s = run.wall_time_s;

  EquivalenceClasses eq =
      run.hierarchy_based()
          ? classes_from_partitions(run.original_od, &run.suppression,
                                    run.origins(), run.destinations(),
                                    eval_mode, report.eval_k)
          : classes_from_regions(*run.mondrian_result, eval_mode,
                                 report.eval_k);
  report.c_dm = c_dm(eq);
  try {
    report.c_avg = c_avg(eq);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoValidClasses) throw;
  }
  if (run.hierarchy_based()) {
    try {
      report.g_bar = g_bar(eq, run.config.gbar_leaves);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoValidClasses) throw;
    }
    report.recon_loss = reconstruction_loss(eq);
    report.min_k_cross =
        min_k_audit(*run.dataset, &run.suppression, run.origins(),
                    run.destinations(), eval_mode, report.eval_k);
  } else {
    report.min_k_cross =
        min_k_audit(*run.mondrian_result, eval_mode, report.eval_k);
  }
  return report;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace {

json config_json(const RunConfig& cfg) {
  return json{{"algorithm", algorithm_name(cfg.algorithm)},
              {"base_k", cfg.base_k},
              {"protect_mode", mode_name(cfg.protect_mode)},
              {"suppression_budget", cfg.suppression_budget},
              {"max_gen_levels", cfg.max_gen_levels},
              {"time_limit_s", cfg.time_limit_s},
              {"seed", cfg.seed},
              {"gbar_leaves",
               cfg.gbar_leaves == LeafCountPolicy::kCoverage ? "coverage"
                                                             : "data"}};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  return config_json(cfg).dump(2);
}

RunConfig run_config_from_json(const std::string& json_text) {
  json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded())
    fail(ErrorCode::kParse, "invalid run config JSON");
  RunConfig cfg;
  if (j.contains("algorithm"))
    cfg.algorithm = parse_algorithm(j["algorithm"].get<std::string>());
  if (j.contains("base_k")) cfg.base_k = j["base_k"].get<double>();
  if (j.contains("protect_mode"))
    cfg.protect_mode = parse_mode(j["protect_mode"].get<std::string>());
  if (j.contains("suppression_budget"))
    cfg.suppression_budget = j["suppression_budget"].get<double>();
  if (j.contains("max_gen_levels"))
    cfg.max_gen_levels = j["max_gen_levels"].get<int>();
  if (j.contains("time_limit_s"))
    cfg.time_limit_s = j["time_limit_s"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("gbar_leaves")) {
    const std::string policy = j["gbar_leaves"].get<std::string>();
    if (policy == "coverage") {
      cfg.gbar_leaves = LeafCountPolicy::kCoverage;
    } else if (policy == "data") {
      cfg.gbar_leaves = LeafCountPolicy::kDataBearing;
    } else {
      fail(ErrorCode::kInvalidArgument,
           "gbar_leaves must be 'coverage' or 'data'");
    }
  }
  return cfg;
}

namespace {

json suppression_json(const SuppressionReport& report) {
  json pairs = json::array();
  for (const SuppressedPair& p : report.suppressed_pairs)
    pairs.push_back(json{{"origin", p.origin.token()},
                         {"destination", p.destination.token()},
                         {"count", p.count},
                         {"weight", p.weight},
                         {"volume", p.volume}});
  return json{{"suppressed_pairs", std::move(pairs)},
              {"suppressed_volume", report.suppressed_volume},
              {"suppressed_count", report.suppressed_count},
              {"suppressed_weight", report.suppressed_weight},
              {"suppressed_row_count", report.suppressed_row_count},
              {"budget_rows", report.budget_rows}};
}

}  // namespace

std::string run_summary_json(const RunOutput& run) {
  json j{{"algorithm", algorithm_name(run.config.algorithm)},
         {"protect_mode", mode_name(run.config.protect_mode)},
         {"effective_k", run.effective_k},
         {"termination", termination_name(run.termination)},
         {"trips", run.dataset->size()},
         {"od_pairs", run.original_od.size()},
         {"suppressed_rows", run.suppression.suppressed_row_count},
         {"wall_time_s", run.wall_time_s}};
  if (run.generalization) {
    j["steps"] = run.generalization->steps;
    j["min_volume"] = run.generalization->min_volume;
    j["origin_zones"] = run.generalization->origins.zones().size();
    j["destination_zones"] = run.generalization->destinations.zones().size();
    std::int64_t below = 0;  // leftover sub-k cells of exhausted runs
    for (const auto& [key, volume] : run.generalization->matrix.entries())
      if (run.generalization->matrix.volume(volume) < run.effective_k)
        ++below;
    j["cells_below_k"] = below;
  } else if (run.oigh_result) {
    j["origin_level"] = run.oigh_result->origin_level;
    j["destination_level"] = run.oigh_result->destination_level;
    j["feasible"] = run.oigh_result->feasible;
  } else if (run.mondrian_result) {
    j["regions"] = run.mondrian_result->regions.size();
  }
  return j.dump(2);
}

std::string metrics_report_json(const MetricsReport& report) {
  json j{{"eval_mode", mode_name(report.evaluation_mode)},
         {"eval_k", report.eval_k},
         {"c_dm", report.c_dm},
         {"min_k", json{{"min_volume", report.min_k_cross.min_volume},
                        {"cells_below", report.min_k_cross.cells_below},
                        {"required_k", report.min_k_cross.required_k}}},
         {"wall_time_s", report.wall_time_s}};
  j["c_avg"] = report.c_avg ? json(*report.c_avg) : json(nullptr);
  j["g_bar"] = report.g_bar ? json(*report.g_bar) : json(nullptr);
  j["e"] = report.recon_loss ? json(*report.recon_loss) : json(nullptr);
  return j.dump(2);
}

std::string metrics_csv_header() {
  return "algorithm,segment,protect_mode,eval_mode,c_dm,c_avg,g_bar,e,time_s\n";
}

std::string metrics_csv_row(const std::string& algorithm,
                            const std::string& segment,
                            const std::string& protect_mode,
                            const MetricsReport& report) {
  std::string row = algorithm + "," + segment + "," + protect_mode + "," +
                    mode_name(report.evaluation_mode) + ",";
  row += csv::format_double(report.c_dm);
  row += ',';
  if (report.c_avg) row += csv::format_double(*report.c_avg);
  row += ',';
  if (report.g_bar) row += csv::format_double(*report.g_bar);
  row += ',';
  if (report.recon_loss) row += csv::format_double(*report.recon_loss);
  row += ',';
  row += csv::format_double(report.wall_time_s);
  row += '\n';
  return row;
}

namespace {

std::string matrix_csv(const SparseOD& od) {
  std::string out = "origin_zone,destination_zone,count,weight_sum\n";
  for (const auto& [key, volume] : od.entries()) {
    out += key.first.token();
    out += ',';
    out += key.second.token();
    out += ',';
    out += csv::format_int(volume.count);
    out += ',';
    out += csv::format_double(volume.weight);
    out += '\n';
  }
  return out;
}

// leaf -> zone rows over the tree's full coverage (capped for gigantic
// synthetic coverage, in which case only data leaves are listed).
std::string zone_map_csv(const ZonePartition& partition, bool* complete) {
  std::string out = "leaf_cell,zone_cell\n";
  const CountTree& tree = *partition.tree();
  *complete = tree.covered_leaf_count() <= kZoneMapExportCap;
  if (*complete) {
    tree.for_each_covered_leaf([&](const CellId& leaf) {
      out += leaf.token();
      out += ',';
      out += partition.zone_of(leaf).token();
      out += '\n';
    });
  } else {
    for (const CellId& leaf : tree.data_leaves()) {
      out += leaf.token();
      out += ',';
      out += partition.zone_of(leaf).token();
      out += '\n';
    }
  }
  return out;
}

std::string regions_csv(const MondrianResult& result) {
  std::string out =
      "dim0_lo,dim0_hi,dim1_lo,dim1_hi,dim2_lo,dim2_hi,dim3_lo,dim3_hi,"
      "count,weight_sum\n";
  for (const MondrianRegion& r : result.regions) {
    for (int d = 0; d < 4; ++d) {
      out += csv::format_double(r.lo[d]);
      out += ',';
      out += csv::format_double(r.hi[d]);
      out += ',';
    }
    out += csv::format_int(r.count);
    out += ',';
    out += csv::format_double(r.weight);
    out += '\n';
  }
  return out;
}

}  // namespace

void write_run_outputs(const RunOutput& run, const std::string& out_dir,
                       const std::string& command_line,
                       const std::string& input_desc_json) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  json manifest{{"command_line", command_line},
                {"library_version", "0.1.0"},
                {"seed", run.config.seed},
                {"config", config_json(run.config)},
                {"effective_k", run.effective_k},
                {"termination", termination_name(run.termination)},
                {"suppression", suppression_json(run.suppression)},
                {"timings", json{{"wall_time_s", run.wall_time_s}}}};
  manifest["config_hash"] = hex64(fnv1a(config_json(run.config).dump()));
  // Digest of the parsed trip content, independent of source formatting.
  manifest["input_digest"] = hex64(fnv1a(trips_to_csv(*run.dataset)));
  if (!input_desc_json.empty()) {
    json input = json::parse(input_desc_json, nullptr, false);
    manifest["input"] = input.is_discarded() ? json(input_desc_json) : input;
  }

  if (run.hierarchy_based()) {
    csv::write_file((dir / "matrix.csv").string(),
                    matrix_csv(run.released_matrix()));
    bool complete_o = true, complete_d = true;
    csv::write_file((dir / "origin_zones.csv").string(),
                    zone_map_csv(run.origins(), &complete_o));
    csv::write_file((dir / "destination_zones.csv").string(),
                    zone_map_csv(run.destinations(), &complete_d));
    manifest["zone_map_complete"] = complete_o && complete_d;
  } else {
    csv::write_file((dir / "regions.csv").string(),
                    regions_csv(*run.mondrian_result));
  }
  manifest["summary"] = json::parse(run_summary_json(run));
  csv::write_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

HierarchyPtr parse_hierarchy_spec(
    const std::string& spec, const std::optional<std::string>& centroid_csv) {
  if (spec.rfind("synthetic:", 0) == 0) {
    const std::string res = spec.substr(10);
    if (res.empty() || res.find_first_not_of("0123456789") != std::string::npos)
      fail(ErrorCode::kInvalidArgument,
           "bad synthetic hierarchy spec: " + spec);
    return Hierarchy::make_synthetic(std::stoi(res));
  }
  if (spec.rfind("parents:", 0) == 0)
    return Hierarchy::load_external(spec.substr(8), centroid_csv);
  fail(ErrorCode::kInvalidArgument,
       "hierarchy spec must be synthetic:<resolution> or parents:<file>, "
       "got '" + spec + "'");
}

}  // namespace odk
