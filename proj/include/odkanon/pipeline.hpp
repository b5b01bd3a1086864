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

#ifndef ODKANON_PIPELINE_HPP_
#define ODKANON_PIPELINE_HPP_

#include <optional>
#include <string>

#include "odkanon/baselines.hpp"
#include "odkanon/generalize.hpp"
#include "odkanon/metrics.hpp"
#include "odkanon/suppress.hpp"

namespace odk {

enum class Algorithm { kOdkAnon, kOigh, kMondrian };

const char* algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// Seed recorded in manifests when the caller does not pass one; runs are
// deterministic either way, the pin just keeps reruns byte-identical.
inline constexpr std::uint64_t kDefaultSeed = 1729;

struct RunConfig {
  Algorithm algorithm = Algorithm::kOdkAnon;
  double base_k = 10.0;
  Mode protect_mode = Mode::kParticipant;
  double suppression_budget = 0.1;
  int max_gen_levels = 5;
  double time_limit_s = 7200.0;
  std::uint64_t seed = kDefaultSeed;
  // Sensitivity switch for the mean generalization error's zone sizes.
  LeafCountPolicy gbar_leaves = LeafCountPolicy::kCoverage;
};

// One anonymization run: the protected matrix plus everything needed to
// evaluate it afterwards (original matrix, suppression record, partitions).
struct RunOutput {
  RunConfig config;
  DatasetPtr dataset;
  double effective_k = 0.0;
  SparseOD original_od;  // pre-suppression, protect-mode volumes
  SuppressionReport suppression;
  std::optional<GeneralizationResult> generalization;
  std::optional<OighResult> oigh_result;
  std::optional<MondrianResult> mondrian_result;
  Termination termination = Termination::kReachedK;
  double wall_time_s = 0.0;

  bool hierarchy_based() const { return !mondrian_result.has_value(); }
  const SparseOD& released_matrix() const;
  const ZonePartition& origins() const;       // NotApplicable for Mondrian
  const ZonePartition& destinations() const;
};

// model -> suppress -> trees -> generalize (or baseline), under the
// config's wall-clock budget.
RunOutput run_anonymization(DatasetPtr ds, const RunConfig& cfg);

// Metrics of a finished run in the chosen evaluation mode, including the
// cross-protection audit at that mode's effective k.
MetricsReport compute_metrics(const RunOutput& run, Mode eval_mode);

// Serialization helpers shared by the C API, the CLI and the benchmark
// harness. Everything is deterministic except wall-clock timings, which
// live only under the manifest's "timings" key and in wall_time fields.
std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& json_text);
std::string run_summary_json(const RunOutput& run);
std::string metrics_report_json(const MetricsReport& report);
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& algorithm,
                            const std::string& segment,
                            const std::string& protect_mode,
                            const MetricsReport& report);

// Writes matrix.csv, zone map CSVs (or regions.csv), and manifest.json
// under `out_dir` (created if absent). `command_line` and `input_desc`
// (JSON) are recorded verbatim so the manifest suffices to re-run the job.
void write_run_outputs(const RunOutput& run, const std::string& out_dir,
                       const std::string& command_line,
                       const std::string& input_desc_json);

// `synthetic:<resolution>` or `parents:<file>`; optional centroid CSV for
// external hierarchies.
HierarchyPtr parse_hierarchy_spec(
    const std::string& spec,
    const std::optional<std::string>& centroid_csv = std::nullopt);

std::uint64_t fnv1a(const std::string& bytes);

}  // namespace odk

#endif  // ODKANON_PIPELINE_HPP_
