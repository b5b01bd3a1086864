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

#ifndef ODKANON_METRICS_HPP_
#define ODKANON_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "odkanon/baselines.hpp"
#include "odkanon/suppress.hpp"
#include "odkanon/zone_partition.hpp"

namespace odk {

// Every metric can be evaluated on participants (records count 1) or on the
// population (records count their weight), independently of which target the
// anonymization protected. The evaluation mode fixes both the volumes and
// the k the classes are judged against.

struct EquivalenceClass {
  CellId origin_zone;  // empty for region-based (hierarchy-free) classes
  CellId destination_zone;
  std::int64_t count = 0;
  double weight = 0.0;
  double volume = 0.0;  // evaluation-mode volume, released flows only
  std::uint64_t origin_leaves = 0;       // coverage leaves under the zone
  std::uint64_t destination_leaves = 0;
  std::uint64_t origin_data_leaves = 0;  // distinct data-bearing leaves
  std::uint64_t destination_data_leaves = 0;
  std::vector<double> member_volumes;  // released leaf-pair volumes inside
  // Original volumes of suppressed pairs whose leaves fall inside this
  // class's footprint; they compare against the reconstructed density, not
  // against zero.
  std::vector<double> suppressed_member_volumes;
};

struct EquivalenceClasses {
  std::vector<EquivalenceClass> classes;
  double suppressed_volume = 0.0;
  double total_volume = 0.0;  // |D|, suppressed flows included
  double k = 0.0;             // evaluation-mode threshold
  Mode evaluation_mode = Mode::kParticipant;
  bool hierarchy_based = true;
};

// Classes induced by a homogeneous zone pair partition over the original
// (pre-suppression) matrix. `suppression` may be null when nothing was
// suppressed.
EquivalenceClasses classes_from_partitions(const SparseOD& original_od,
                                           const SuppressionReport* suppression,
                                           const ZonePartition& origins,
                                           const ZonePartition& destinations,
                                           Mode eval_mode, double eval_k);

EquivalenceClasses classes_from_regions(const MondrianResult& result,
                                        Mode eval_mode, double eval_k);

// Discernibility: valid classes charge their volume squared; everything
// below k (suppressed or not) is indistinguishable from the whole dataset
// and charges |D| per unit. Not normalized; population values at survey
// scale reach ~1e14, well within double's exact-integer range.
double c_dm(const EquivalenceClasses& eq);

// Normalized average class size over the k-respecting classes.
double c_avg(const EquivalenceClasses& eq);  // NoValidClasses when none

// How a class's zone size |o| is measured in the mean generalization
// error: all covered leaves under the zone (the default, consistent with
// the reconstruction loss denominator), or only the distinct data-bearing
// leaves (a sensitivity-analysis variant).
enum class LeafCountPolicy { kCoverage, kDataBearing };

// Mean generalization error: average of (|o| + |d|) over released volume.
double g_bar(const EquivalenceClasses& eq,  // NotApplicable without zones
             LeafCountPolicy policy = LeafCountPolicy::kCoverage);

// Reconstruction loss: L1 gap between the original leaf-level matrix and
// the uniform re-distribution of each valid class over its leaf pairs,
// normalized by |D|. Bounded by 2 when generalization never creates trips.
double reconstruction_loss(const EquivalenceClasses& eq);

struct AuditOutcome {
  double min_volume = 0.0;       // smallest nonzero released cell
  std::int64_t cells_below = 0;  // nonzero cells strictly under required_k
  double required_k = 0.0;
};

// Re-aggregates the unsuppressed trips through the released zones with
// evaluation-mode volumes; the cross-protection audit runs this with the
// opposite mode's threshold.
AuditOutcome min_k_audit(const TripDataset& ds,
                         const SuppressionReport* suppression,
                         const ZonePartition& origins,
                         const ZonePartition& destinations, Mode eval_mode,
                         double required_k);

AuditOutcome min_k_audit(const MondrianResult& result, Mode eval_mode,
                         double required_k);

struct MetricsReport {
  Mode evaluation_mode = Mode::kParticipant;
  double eval_k = 0.0;
  double c_dm = 0.0;
  std::optional<double> c_avg;  // absent when no class reaches k
  std::optional<double> g_bar;  // absent for hierarchy-free algorithms
  std::optional<double> recon_loss;
  AuditOutcome min_k_cross;
  double wall_time_s = 0.0;
};

}  // namespace odk

#endif  // ODKANON_METRICS_HPP_
