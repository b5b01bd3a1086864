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

#include "odkanon.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "odkanon/bench.hpp"
#include "odkanon/error.hpp"
#include "odkanon/pipeline.hpp"
#include "odkanon/synth.hpp"

using nlohmann::json;

struct odk_hierarchy {
  odk::HierarchyPtr h;
};

struct odk_dataset {
  odk::DatasetPtr ds;
};

struct odk_result {
  std::shared_ptr<const odk::RunOutput> run;
};

namespace {

thread_local std::string t_last_error;

odk_status status_of(odk::ErrorCode code) {
  using odk::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return ODK_E_INVALID_ARGUMENT;
    case ErrorCode::kIo: return ODK_E_IO;
    case ErrorCode::kParse: return ODK_E_PARSE;
    case ErrorCode::kUnknownCell: return ODK_E_UNKNOWN_CELL;
    case ErrorCode::kAboveRoot: return ODK_E_ABOVE_ROOT;
    case ErrorCode::kLeafCell: return ODK_E_LEAF_CELL;
    case ErrorCode::kMissingCentroid: return ODK_E_MISSING_CENTROID;
    case ErrorCode::kNonPositiveWeight: return ODK_E_NON_POSITIVE_WEIGHT;
    case ErrorCode::kMissingAttribute: return ODK_E_MISSING_ATTRIBUTE;
    case ErrorCode::kEmptyDataset: return ODK_E_EMPTY_DATASET;
    case ErrorCode::kEmptyMatrix: return ODK_E_EMPTY_MATRIX;
    case ErrorCode::kDisjointRoots: return ODK_E_DISJOINT_ROOTS;
    case ErrorCode::kInconsistentInputs: return ODK_E_INCONSISTENT_INPUTS;
    case ErrorCode::kInsufficientVolume: return ODK_E_INSUFFICIENT_VOLUME;
    case ErrorCode::kNoValidClasses: return ODK_E_NO_VALID_CLASSES;
    case ErrorCode::kNotApplicable: return ODK_E_NOT_APPLICABLE;
    case ErrorCode::kInvalidConfig: return ODK_E_INVALID_CONFIG;
    case ErrorCode::kTimeout: return ODK_E_TIMEOUT;
    case ErrorCode::kInternal: return ODK_E_INTERNAL;
  }
  return ODK_E_INTERNAL;
}

// Runs `fn` translating exceptions into status codes + thread-local message.
template <typename Fn>
odk_status guarded(Fn&& fn) {
  try {
    fn();
    return ODK_OK;
  } catch (const odk::Error& e) {
    t_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return ODK_E_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return ODK_E_INTERNAL;
  }
}

odk_status invalid(const char* message) {
  t_last_error = message;
  return ODK_E_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

odk::SynthConfig synth_config_from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    odk::fail(odk::ErrorCode::kParse, "invalid synth config JSON");
  odk::SynthConfig cfg;
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

}  // namespace

extern "C" {

const char* odk_version(void) { return "0.1.0"; }

const char* odk_last_error(void) { return t_last_error.c_str(); }

void odk_string_free(char* s) { std::free(s); }

odk_status odk_hierarchy_synthetic(int max_resolution, odk_hierarchy** out) {
  if (!out) return invalid("null output pointer");
  return guarded([&] {
    *out = new odk_hierarchy{odk::Hierarchy::make_synthetic(max_resolution)};
  });
}

odk_status odk_hierarchy_load(const char* parent_csv,
                              const char* centroid_csv_or_null,
                              odk_hierarchy** out) {
  if (!out || !parent_csv) return invalid("null argument");
  return guarded([&] {
    std::optional<std::string> centroids;
    if (centroid_csv_or_null) centroids = centroid_csv_or_null;
    *out = new odk_hierarchy{odk::Hierarchy::load_external(parent_csv,
                                                           centroids)};
  });
}

odk_status odk_hierarchy_from_spec(const char* spec,
                                   const char* centroid_csv_or_null,
                                   odk_hierarchy** out) {
  if (!out || !spec) return invalid("null argument");
  return guarded([&] {
    std::optional<std::string> centroids;
    if (centroid_csv_or_null) centroids = centroid_csv_or_null;
    *out = new odk_hierarchy{odk::parse_hierarchy_spec(spec, centroids)};
  });
}

void odk_hierarchy_free(odk_hierarchy* h) { delete h; }

odk_status odk_dataset_load(const odk_hierarchy* h, const char* trips_csv,
                            odk_dataset** out) {
  if (!out || !h || !trips_csv) return invalid("null argument");
  return guarded(
      [&] { *out = new odk_dataset{odk::load_trips(trips_csv, h->h)}; });
}

odk_status odk_dataset_synthesize(const char* config_json, odk_dataset** out) {
  if (!out || !config_json) return invalid("null argument");
  return guarded([&] {
    *out = new odk_dataset{
        odk::gen_synthetic(synth_config_from_json_text(config_json))};
  });
}

odk_status odk_dataset_write(const odk_dataset* ds, const char* trips_csv) {
  if (!ds || !trips_csv) return invalid("null argument");
  return guarded([&] { odk::save_trips(*ds->ds, trips_csv); });
}

long long odk_dataset_trip_count(const odk_dataset* ds) {
  return ds ? static_cast<long long>(ds->ds->size()) : 0;
}

odk_status odk_dataset_categories(const odk_dataset* ds,
                                  const char* attribute, char** json_out) {
  if (!ds || !attribute || !json_out) return invalid("null argument");
  return guarded([&] {
    json categories = json::array();
    for (const auto& [category, segment_ds] : odk::segment(ds->ds, attribute))
      categories.push_back(category);
    *json_out = dup_string(categories.dump());
  });
}

odk_status odk_dataset_filter(const odk_dataset* ds, const char* attribute,
                              const char* category, odk_dataset** out) {
  if (!ds || !attribute || !category || !out) return invalid("null argument");
  return guarded([&] {
    auto segments = odk::segment(ds->ds, attribute);
    auto it = segments.find(category);
    if (it == segments.end())
      odk::fail(odk::ErrorCode::kInvalidArgument,
                std::string("no records with ") + attribute + " = " + category);
    *out = new odk_dataset{it->second};
  });
}

odk_status odk_effective_k(const odk_dataset* ds, double base_k,
                           const char* mode, double* out) {
  if (!ds || !mode || !out) return invalid("null argument");
  return guarded(
      [&] { *out = odk::effective_k(base_k, *ds->ds, odk::parse_mode(mode)); });
}

void odk_dataset_free(odk_dataset* ds) { delete ds; }

odk_status odk_anonymize(const odk_dataset* ds, const char* options_json,
                         odk_result** out) {
  if (!ds || !out) return invalid("null argument");
  return guarded([&] {
    odk::RunConfig cfg = odk::run_config_from_json(
        options_json && *options_json ? options_json : "{}");
    *out = new odk_result{std::make_shared<const odk::RunOutput>(
        odk::run_anonymization(ds->ds, cfg))};
  });
}

odk_status odk_result_termination(const odk_result* r, int* out) {
  if (!r || !out) return invalid("null argument");
  *out = r->run->termination == odk::Termination::kReachedK ? 0 : 1;
  return ODK_OK;
}

odk_status odk_result_summary(const odk_result* r, char** json_out) {
  if (!r || !json_out) return invalid("null argument");
  return guarded(
      [&] { *json_out = dup_string(odk::run_summary_json(*r->run)); });
}

odk_status odk_result_write(const odk_result* r, const char* out_dir,
                            const char* command_line,
                            const char* input_desc_json) {
  if (!r || !out_dir) return invalid("null argument");
  return guarded([&] {
    odk::write_run_outputs(*r->run, out_dir,
                           command_line ? command_line : "",
                           input_desc_json ? input_desc_json : "");
  });
}

odk_status odk_result_metrics(const odk_result* r, const char* eval_mode,
                              char** json_out) {
  if (!r || !eval_mode || !json_out) return invalid("null argument");
  return guarded([&] {
    odk::MetricsReport report =
        odk::compute_metrics(*r->run, odk::parse_mode(eval_mode));
    *json_out = dup_string(odk::metrics_report_json(report));
  });
}

odk_status odk_result_audit(const odk_result* r, const char* eval_mode,
                            double required_k, double* min_volume,
                            long long* cells_below) {
  if (!r || !eval_mode || !min_volume || !cells_below)
    return invalid("null argument");
  return guarded([&] {
    odk::Mode mode = odk::parse_mode(eval_mode);
    double k = required_k > 0.0
                   ? required_k
                   : odk::effective_k(r->run->config.base_k, *r->run->dataset,
                                      mode);
    odk::AuditOutcome outcome =
        r->run->hierarchy_based()
            ? odk::min_k_audit(*r->run->dataset, &r->run->suppression,
                               r->run->origins(), r->run->destinations(), mode,
                               k)
            : odk::min_k_audit(*r->run->mondrian_result, mode, k);
    *min_volume = outcome.min_volume;
    *cells_below = outcome.cells_below;
  });
}

void odk_result_free(odk_result* r) { delete r; }

odk_status odk_result_rerun(const odk_dataset* ds, const char* run_dir,
                            odk_result** out) {
  if (!ds || !run_dir || !out) return invalid("null argument");
  return guarded([&] {
    std::ifstream in(std::filesystem::path(run_dir) / "manifest.json",
                     std::ios::binary);
    if (!in)
      odk::fail(odk::ErrorCode::kIo,
                std::string("no manifest.json under ") + run_dir);
    std::ostringstream buf;
    buf << in.rdbuf();
    json manifest = json::parse(buf.str(), nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("config"))
      odk::fail(odk::ErrorCode::kParse, "malformed manifest");
    odk::RunConfig cfg =
        odk::run_config_from_json(manifest["config"].dump());
    *out = new odk_result{std::make_shared<const odk::RunOutput>(
        odk::run_anonymization(ds->ds, cfg))};
  });
}

odk_status odk_bench_run(const char* plan_path,
                         const char* output_dir_or_null, char** report_json) {
  if (!plan_path) return invalid("null plan path");
  return guarded([&] {
    odk::BenchPlan plan = odk::load_bench_plan(plan_path);
    if (output_dir_or_null && *output_dir_or_null)
      plan.output_dir = output_dir_or_null;
    odk::BenchReport report = odk::run_benchmark(plan);
    if (report_json) *report_json = dup_string(report.to_json());
  });
}

}  // extern "C"
