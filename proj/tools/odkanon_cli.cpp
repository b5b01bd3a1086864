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

// Command-line front end. All algorithmic work happens behind the C API in
// libodkanon; this file only parses flags, assembles option JSON, and lays
// out output files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "odkanon.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitExhausted = 2;
constexpr int kExitUsage = 64;

constexpr std::uint64_t kDefaultSeed = 1729;

struct HierarchyDeleter {
  void operator()(odk_hierarchy* h) const { odk_hierarchy_free(h); }
};
struct DatasetDeleter {
  void operator()(odk_dataset* d) const { odk_dataset_free(d); }
};
struct ResultDeleter {
  void operator()(odk_result* r) const { odk_result_free(r); }
};
using HierarchyPtr = std::unique_ptr<odk_hierarchy, HierarchyDeleter>;
using DatasetPtr = std::unique_ptr<odk_dataset, DatasetDeleter>;
using ResultPtr = std::unique_ptr<odk_result, ResultDeleter>;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "odkanon: " << context << ": " << odk_last_error() << "\n";
  std::exit(kExitError);
}

void check(odk_status status, const std::string& context) {
  if (status != ODK_OK) die(context);
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  odk_string_free(s);
  return out;
}

std::string quote_args(int argc, char** argv) {
  std::string line;
  for (int i = 0; i < argc; ++i) {
    if (i) line += ' ';
    line += argv[i];
  }
  return line;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "odkanon: cannot write " << path << "\n";
    std::exit(kExitError);
  }
  out << contents;
}

// Shared input flags: --input + --hierarchy (+ optional --centroids).
struct InputFlags {
  std::string input;
  std::string hierarchy;
  std::string centroids;

  void attach(CLI::App* cmd, bool input_required = true) {
    auto* in = cmd->add_option("--input", input, "trip CSV file");
    if (input_required) in->required();
    cmd->add_option("--hierarchy", hierarchy,
                    "synthetic:<resolution> or parents:<file>")
        ->required();
    cmd->add_option("--centroids", centroids,
                    "centroid CSV for external hierarchies (cell,x,y)");
  }

  DatasetPtr load(HierarchyPtr* hierarchy_out = nullptr) const {
    odk_hierarchy* h = nullptr;
    check(odk_hierarchy_from_spec(hierarchy.c_str(),
                                  centroids.empty() ? nullptr
                                                    : centroids.c_str(),
                                  &h),
          "loading hierarchy");
    HierarchyPtr hp(h);
    odk_dataset* ds = nullptr;
    check(odk_dataset_load(hp.get(), input.c_str(), &ds), "loading trips");
    if (hierarchy_out) *hierarchy_out = std::move(hp);
    return DatasetPtr(ds);
  }
};

// Shared anonymization flags, defaults matching the survey protocol.
struct RunFlags {
  std::string algorithm = "odkanon";
  double k = 10.0;
  std::string mode = "participant";
  double suppression_budget = 0.1;
  int max_gen_levels = 5;
  double time_limit = 7200.0;
  std::uint64_t seed = kDefaultSeed;
  std::string gbar_leaves = "coverage";

  void attach(CLI::App* cmd) {
    cmd->add_option("--algorithm", algorithm, "odkanon | oigh | mondrian")
        ->check(CLI::IsMember({"odkanon", "oigh", "mondrian"}));
    cmd->add_option("--k", k, "base anonymity threshold");
    cmd->add_option("--mode", mode, "protection target")
        ->check(CLI::IsMember({"participant", "population"}));
    cmd->add_option("--suppression-budget", suppression_budget,
                    "max fraction of OD pairs to suppress");
    cmd->add_option("--max-gen-levels", max_gen_levels,
                    "generalization levels explored by suppression");
    cmd->add_option("--time-limit", time_limit, "wall-clock budget, seconds");
    cmd->add_option("--seed", seed, "run seed recorded in the manifest");
    cmd->add_option("--gbar-leaves", gbar_leaves,
                    "zone size counting for the mean generalization error")
        ->check(CLI::IsMember({"coverage", "data"}));
  }

  std::string options_json() const {
    return json{{"algorithm", algorithm},
                {"base_k", k},
                {"protect_mode", mode},
                {"suppression_budget", suppression_budget},
                {"max_gen_levels", max_gen_levels},
                {"time_limit_s", time_limit},
                {"seed", seed},
                {"gbar_leaves", gbar_leaves}}
        .dump();
  }
};

json input_desc(const InputFlags& input) {
  json desc{{"trips_csv", input.input}, {"hierarchy", input.hierarchy}};
  if (!input.centroids.empty()) desc["centroids"] = input.centroids;
  return desc;
}

ResultPtr run_anonymize(const DatasetPtr& ds, const RunFlags& flags) {
  odk_result* r = nullptr;
  check(odk_anonymize(ds.get(), flags.options_json().c_str(), &r),
        "anonymizing");
  return ResultPtr(r);
}

std::vector<std::string> eval_modes_of(const std::string& eval_mode) {
  if (eval_mode == "both") return {"participant", "population"};
  return {eval_mode};
}

// metrics CSV row assembled from the C API's metrics JSON.
std::string metrics_row(const std::string& algorithm,
                        const std::string& segment,
                        const std::string& protect_mode,
                        const std::string& metrics_json) {
  json m = json::parse(metrics_json);
  auto field = [&](const char* name) -> std::string {
    if (!m.contains(name) || m[name].is_null()) return "";
    std::ostringstream out;
    out.precision(17);
    out << m[name].get<double>();
    return out.str();
  };
  std::ostringstream time_s;
  time_s.precision(17);
  time_s << m["wall_time_s"].get<double>();
  return algorithm + "," + segment + "," + protect_mode + "," +
         m["eval_mode"].get<std::string>() + "," + field("c_dm") + "," +
         field("c_avg") + "," + field("g_bar") + "," + field("e") + "," +
         time_s.str() + "\n";
}

constexpr const char* kMetricsHeader =
    "algorithm,segment,protect_mode,eval_mode,c_dm,c_avg,g_bar,e,time_s\n";

int cmd_synth(const std::string& command_line, const std::string& output,
              const json& synth_config) {
  odk_dataset* ds = nullptr;
  check(odk_dataset_synthesize(synth_config.dump().c_str(), &ds),
        "generating synthetic data");
  DatasetPtr dsp(ds);
  fs::create_directories(fs::path(output).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(output).parent_path());
  check(odk_dataset_write(dsp.get(), output.c_str()), "writing trips");
  json manifest{{"command_line", command_line},
                {"library_version", odk_version()},
                {"synth_config", synth_config},
                {"trips", odk_dataset_trip_count(dsp.get())},
                {"output", output}};
  write_file(fs::path(output).string() + ".manifest.json",
             manifest.dump(2) + "\n");
  return kExitOk;
}

int cmd_anonymize(const std::string& command_line, const InputFlags& input,
                  const RunFlags& flags, const std::string& output,
                  const std::string& eval_mode,
                  const std::vector<std::string>& metrics) {
  DatasetPtr ds = input.load();
  ResultPtr result = run_anonymize(ds, flags);
  check(odk_result_write(result.get(), output.c_str(), command_line.c_str(),
                         input_desc(input).dump().c_str()),
        "writing outputs");

  if (!metrics.empty()) {
    std::string table = kMetricsHeader;
    for (const std::string& mode : eval_modes_of(eval_mode)) {
      char* metrics_json = nullptr;
      check(odk_result_metrics(result.get(), mode.c_str(), &metrics_json),
            "computing metrics");
      std::string text = take_string(metrics_json);
      write_file(fs::path(output) / ("metrics_" + mode + ".json"),
                 text + "\n");
      table += metrics_row(flags.algorithm, "all", flags.mode, text);
    }
    write_file(fs::path(output) / "metrics.csv", table);
  }

  int termination = 0;
  check(odk_result_termination(result.get(), &termination), "termination");
  std::cout << take_string([&] {
    char* s = nullptr;
    check(odk_result_summary(result.get(), &s), "summary");
    return s;
  }()) << "\n";
  return termination == 0 ? kExitOk : kExitExhausted;
}

int cmd_metrics(const std::string& command_line, const InputFlags& input,
                const RunFlags& flags, const std::string& from,
                const std::string& eval_mode, const std::string& output) {
  DatasetPtr ds = input.load();
  ResultPtr result;
  if (!from.empty()) {
    odk_result* r = nullptr;
    check(odk_result_rerun(ds.get(), from.c_str(), &r),
          "re-running from manifest");
    result.reset(r);
  } else {
    result = run_anonymize(ds, flags);
  }
  // Row labels come from the run itself: with --from, the manifest's
  // algorithm and protection target win over the flag defaults.
  char* summary_json = nullptr;
  check(odk_result_summary(result.get(), &summary_json), "summary");
  json summary = json::parse(take_string(summary_json));
  const std::string algorithm = summary["algorithm"].get<std::string>();
  const std::string protect_mode = summary["protect_mode"].get<std::string>();

  fs::create_directories(output);
  std::string table = kMetricsHeader;
  for (const std::string& mode : eval_modes_of(eval_mode)) {
    char* metrics_json = nullptr;
    check(odk_result_metrics(result.get(), mode.c_str(), &metrics_json),
          "computing metrics");
    std::string text = take_string(metrics_json);
    write_file(fs::path(output) / ("metrics_" + mode + ".json"), text + "\n");
    table += metrics_row(algorithm, "all", protect_mode, text);
  }
  write_file(fs::path(output) / "metrics.csv", table);
  json manifest{{"command_line", command_line},
                {"library_version", odk_version()},
                {"input", input_desc(input)},
                {"from", from}};
  write_file(fs::path(output) / "metrics_manifest.json",
             manifest.dump(2) + "\n");
  std::cout << table;
  return kExitOk;
}

int cmd_audit(const std::string& command_line, const InputFlags& input,
              RunFlags flags, const std::string& protect,
              const std::string& output) {
  DatasetPtr ds = input.load();
  std::string table = "protect_mode,eval_mode,required_k,min_volume,"
                      "cells_below\n";
  for (const std::string& protect_mode : eval_modes_of(protect)) {
    flags.mode = protect_mode;
    ResultPtr result = run_anonymize(ds, flags);
    for (const std::string& eval_mode :
         {std::string("participant"), std::string("population")}) {
      double required_k = 0.0;
      check(odk_effective_k(ds.get(), flags.k, eval_mode.c_str(), &required_k),
            "effective k");
      double min_volume = 0.0;
      long long cells_below = 0;
      check(odk_result_audit(result.get(), eval_mode.c_str(), required_k,
                             &min_volume, &cells_below),
            "auditing");
      std::ostringstream row;
      row.precision(17);
      row << protect_mode << ',' << eval_mode << ',' << required_k << ','
          << min_volume << ',' << cells_below << '\n';
      table += row.str();
    }
  }
  fs::create_directories(output);
  write_file(fs::path(output) / "audit.csv", table);
  json manifest{{"command_line", command_line},
                {"library_version", odk_version()},
                {"input", input_desc(input)},
                {"algorithm", flags.algorithm},
                {"base_k", flags.k}};
  write_file(fs::path(output) / "audit_manifest.json",
             manifest.dump(2) + "\n");
  std::cout << table;
  return kExitOk;
}

int cmd_segment(const std::string& command_line, const InputFlags& input,
                const RunFlags& flags, const std::string& by,
                const std::string& eval_mode, const std::string& output) {
  DatasetPtr ds = input.load();
  char* categories_json = nullptr;
  check(odk_dataset_categories(ds.get(), by.c_str(), &categories_json),
        "listing categories");
  json categories = json::parse(take_string(categories_json));

  fs::create_directories(output);
  std::string table = kMetricsHeader;
  for (const auto& category : categories) {
    const std::string name = category.get<std::string>();
    odk_dataset* seg = nullptr;
    check(odk_dataset_filter(ds.get(), by.c_str(), name.c_str(), &seg),
          "filtering segment");
    DatasetPtr segp(seg);
    ResultPtr result = run_anonymize(segp, flags);
    fs::path dir = fs::path(output) / name;
    json desc = input_desc(input);
    desc["segment"] = json{{"attribute", by}, {"category", name}};
    check(odk_result_write(result.get(), dir.string().c_str(),
                           command_line.c_str(), desc.dump().c_str()),
          "writing outputs");
    for (const std::string& mode : eval_modes_of(eval_mode)) {
      char* metrics_json = nullptr;
      check(odk_result_metrics(result.get(), mode.c_str(), &metrics_json),
            "computing metrics");
      table += metrics_row(flags.algorithm, name, flags.mode,
                           take_string(metrics_json));
    }
  }
  write_file(fs::path(output) / "segment_report.csv", table);
  std::cout << table;
  return kExitOk;
}

int cmd_bench(const std::string& plan, const std::string& output) {
  char* report_json = nullptr;
  check(odk_bench_run(plan.c_str(), output.empty() ? nullptr : output.c_str(),
                      &report_json),
        "running benchmark");
  std::cout << take_string(report_json) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-anonymous origin-destination matrices over hexagonal "
               "hierarchies"};
  app.require_subcommand(1);
  const std::string command_line = quote_args(argc, argv);

  // synth
  auto* synth = app.add_subcommand("synth", "generate seeded synthetic trips");
  std::string synth_output = "trips.csv";
  std::int64_t n_trips = 1000;
  int resolution = 5;
  int hotspots = 10;
  double concentration = 0.8;
  double weight_mu = 0.0, weight_sigma = 0.0;
  double trips_per_participant = 4.0;
  std::uint64_t synth_seed = kDefaultSeed;
  std::vector<std::string> segments;
  synth->add_option("--output", synth_output, "trip CSV to write");
  synth->add_option("--n-trips", n_trips, "number of trips");
  synth->add_option("--resolution", resolution, "synthetic grid depth");
  synth->add_option("--hotspots", hotspots, "number of hotspot leaves");
  synth->add_option("--concentration", concentration,
                    "share of endpoints drawn from hotspots");
  synth->add_option("--weight-mu", weight_mu, "log-normal weight mu");
  synth->add_option("--weight-sigma", weight_sigma, "log-normal weight sigma");
  synth->add_option("--trips-per-participant", trips_per_participant,
                    "mean trips per participant");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--segments", segments,
                    "attribute=cat1|cat2 (repeatable)");

  // anonymize
  auto* anonymize = app.add_subcommand("anonymize",
                                       "produce a k-anonymous OD matrix");
  InputFlags anon_input;
  RunFlags anon_flags;
  std::string anon_output = "run_out";
  std::string anon_eval_mode = "participant";
  std::vector<std::string> anon_metrics;
  anon_input.attach(anonymize);
  anon_flags.attach(anonymize);
  anonymize->add_option("--output", anon_output, "output directory");
  anonymize->add_option("--eval-mode", anon_eval_mode,
                        "participant | population | both")
      ->check(CLI::IsMember({"participant", "population", "both"}));
  anonymize->add_option("--metrics", anon_metrics,
                        "metrics to compute after the run "
                        "(all | c_dm | c_avg | g_bar | e)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "evaluate a run");
  InputFlags metrics_input;
  RunFlags metrics_flags;
  std::string metrics_from;
  std::string metrics_eval_mode = "both";
  std::string metrics_output = "metrics_out";
  metrics_input.attach(metrics);
  metrics_flags.attach(metrics);
  metrics->add_option("--from", metrics_from,
                      "run directory to re-run from its manifest");
  metrics->add_option("--eval-mode", metrics_eval_mode,
                      "participant | population | both")
      ->check(CLI::IsMember({"participant", "population", "both"}));
  metrics->add_option("--output", metrics_output, "output directory");

  // audit
  auto* audit = app.add_subcommand(
      "audit", "cross-protection audit (protect one target, evaluate both)");
  InputFlags audit_input;
  RunFlags audit_flags;
  std::string audit_protect = "both";
  std::string audit_output = "audit_out";
  audit_input.attach(audit);
  audit_flags.attach(audit);
  audit->add_option("--protect", audit_protect,
                    "protection targets to audit: participant | population | "
                    "both")
      ->check(CLI::IsMember({"participant", "population", "both"}));
  audit->add_option("--output", audit_output, "output directory");

  // segment
  auto* seg = app.add_subcommand("segment",
                                 "run one anonymization per category");
  InputFlags seg_input;
  RunFlags seg_flags;
  std::string seg_by;
  std::string seg_eval_mode = "both";
  std::string seg_output = "segment_out";
  seg_input.attach(seg);
  seg_flags.attach(seg);
  seg->add_option("--by", seg_by, "segmentation attribute")->required();
  seg->add_option("--eval-mode", seg_eval_mode,
                  "participant | population | both")
      ->check(CLI::IsMember({"participant", "population", "both"}));
  seg->add_option("--output", seg_output, "output directory");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark plan");
  std::string bench_plan;
  std::string bench_output;
  std::uint64_t bench_seed = kDefaultSeed;
  bench->add_option("--plan", bench_plan, "plan JSON file")->required();
  bench->add_option("--output", bench_output, "override plan output dir");
  bench->add_option("--seed", bench_seed, "recorded seed (plans pin their own)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      json schema = json::object();
      for (const std::string& spec : segments) {
        auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) {
          std::cerr << "odkanon: bad --segments spec '" << spec
                    << "' (want attribute=cat1|cat2)\n";
          return kExitUsage;
        }
        json categories = json::array();
        std::string rest = spec.substr(eq + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
          auto bar = rest.find('|', start);
          categories.push_back(rest.substr(
              start, bar == std::string::npos ? bar : bar - start));
          if (bar == std::string::npos) break;
          start = bar + 1;
        }
        schema[spec.substr(0, eq)] = categories;
      }
      json config{{"n_trips", n_trips},
                  {"target_resolution", resolution},
                  {"n_hotspots", hotspots},
                  {"hotspot_concentration", concentration},
                  {"weight_mu", weight_mu},
                  {"weight_sigma", weight_sigma},
                  {"trips_per_participant", trips_per_participant},
                  {"seed", synth_seed}};
      if (!schema.empty()) config["segments"] = schema;
      return cmd_synth(command_line, synth_output, config);
    }
    if (anonymize->parsed()) {
      for (const std::string& m : anon_metrics) {
        const bool known = m == "all" || m == "c_dm" || m == "c_avg" ||
                           m == "g_bar" || m == "e";
        if (!known) {
          std::cerr << "odkanon: unknown metric '" << m << "'\n";
          return kExitUsage;
        }
        if (anon_flags.algorithm == "mondrian" && (m == "g_bar" || m == "e")) {
          std::cerr << "odkanon: " << m
                    << " is not defined for mondrian (no hierarchy)\n";
          return kExitUsage;
        }
      }
      return cmd_anonymize(command_line, anon_input, anon_flags, anon_output,
                           anon_eval_mode, anon_metrics);
    }
    if (metrics->parsed())
      return cmd_metrics(command_line, metrics_input, metrics_flags,
                         metrics_from, metrics_eval_mode, metrics_output);
    if (audit->parsed())
      return cmd_audit(command_line, audit_input, audit_flags, audit_protect,
                       audit_output);
    if (seg->parsed())
      return cmd_segment(command_line, seg_input, seg_flags, seg_by,
                         seg_eval_mode, seg_output);
    if (bench->parsed()) return cmd_bench(bench_plan, bench_output);
  } catch (const std::exception& e) {
    std::cerr << "odkanon: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
