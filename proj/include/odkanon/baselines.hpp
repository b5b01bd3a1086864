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

#ifndef ODKANON_BASELINES_HPP_
#define ODKANON_BASELINES_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "odkanon/count_tree.hpp"
#include "odkanon/dataset.hpp"
#include "odkanon/deadline.hpp"
#include "odkanon/zone_partition.hpp"

namespace odk {

struct OighResult {
  int origin_level = 0;
  int destination_level = 0;
  SparseOD matrix;  // uniformly generalized
  bool feasible = false;
  ZonePartition origins;
  ZonePartition destinations;
};

// Uniform hierarchy cuts: every origin generalized to one resolution, every
// destination to another. Returns the finest feasible level pair (max
// lo + ld, ties by max min(lo, ld), then larger lo); when no pair is
// feasible the root pair is returned with feasible = false. Never
// suppresses.
OighResult oigh(const SparseOD& od, CountTreePtr tree_origin,
                CountTreePtr tree_destination, double k,
                Deadline deadline = Deadline::none());

struct MondrianRegion {
  std::array<double, 4> lo{};  // origin x, origin y, destination x, destination y
  std::array<double, 4> hi{};
  std::vector<std::size_t> members;  // record indices into the dataset
  std::int64_t count = 0;
  double weight = 0.0;
};

struct MondrianResult {
  std::vector<MondrianRegion> regions;
  Mode mode = Mode::kParticipant;

  double volume(const MondrianRegion& r) const {
    return mode == Mode::kParticipant ? static_cast<double>(r.count)
                                      : r.weight;
  }
};

// Relaxed multidimensional partitioning over the 4-D endpoint centroid
// space: recursively split at the volume median of the widest normalized
// dimension while both sides keep volume >= k. Hierarchy-free; only the
// centroids are used.
MondrianResult mondrian(const TripDataset& ds, const Hierarchy& hierarchy,
                        double k, Mode mode,
                        Deadline deadline = Deadline::none());

}  // namespace odk

#endif  // ODKANON_BASELINES_HPP_
