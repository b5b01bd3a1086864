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

#ifndef ODKANON_GENERALIZE_HPP_
#define ODKANON_GENERALIZE_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "odkanon/count_tree.hpp"
#include "odkanon/deadline.hpp"
#include "odkanon/zone_partition.hpp"

namespace odk {

enum class Axis { kOrigin, kDestination };
enum class Termination { kReachedK, kExhausted };

const char* axis_name(Axis axis);
const char* termination_name(Termination t);

struct MergeCandidate {
  Axis axis = Axis::kOrigin;
  CellId parent;
  std::vector<CellId> members;  // canonical order
  double cost = 0.0;            // sum of member axis-marginal volumes
};

struct GeneralizationResult {
  SparseOD matrix;  // zone-space matrix, volume-conserving
  ZonePartition origins;
  ZonePartition destinations;
  std::size_t steps = 0;
  Termination terminated = Termination::kReachedK;
  double min_volume = 0.0;  // min nonzero entry at termination
  double k = 0.0;
};

// Greedy homogeneous generalization: repeatedly merges the cheapest
// consistent sibling group (origin columns / destination rows chosen by a
// ratio-balancing rule) until every nonzero entry reaches k or no merge is
// left. One instance drives one run; select_axis / best_group / apply_merge
// are exposed so the steps can be driven and inspected individually.
class Generalizer {
 public:
  Generalizer(const SparseOD& od, CountTreePtr tree_origin,
              CountTreePtr tree_destination, double k,
              Deadline deadline = Deadline::none());
  ~Generalizer();

  Generalizer(const Generalizer&) = delete;
  Generalizer& operator=(const Generalizer&) = delete;

  double min_volume() const;  // current min nonzero entry
  std::size_t live_count(Axis axis) const;
  std::size_t steps() const { return steps_; }
  double k() const { return k_; }

  // Ratio-balancing axis choice: forced toward the dominant axis when the
  // origin/destination count ratio drifts more than 3% from its initial
  // value, alternating otherwise (first call picks the origin axis).
  Axis select_axis() const;

  // Cheapest consistent sibling group on `axis`, if any. A group is
  // consistent when its members are exactly the live labels under its
  // parent, so promoting the parent keeps the zone set an antichain.
  std::optional<MergeCandidate> best_group(Axis axis) const;

  // Sums the member rows/columns into the parent label and updates the
  // sibling-group index. Total matrix volume is unchanged.
  void apply_merge(const MergeCandidate& candidate);

  // Runs the loop to termination and assembles the result.
  GeneralizationResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double k_ = 0.0;
  std::size_t steps_ = 0;
};

GeneralizationResult anonymize(const SparseOD& od, CountTreePtr tree_origin,
                               CountTreePtr tree_destination, double k,
                               Deadline deadline = Deadline::none());

}  // namespace odk

#endif  // ODKANON_GENERALIZE_HPP_
