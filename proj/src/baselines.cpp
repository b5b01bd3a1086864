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

#include "odkanon/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "odkanon/error.hpp"

namespace odk {

namespace {

// Ancestor labels of every entry endpoint at each candidate level, interned
// to dense ids so the level-pair search stays off strings.
struct LevelIndex {
  int min_level = 0;
  int max_level = 0;
  // ids[entry][level - min_level]
  std::vector<std::vector<std::uint32_t>> ids;

  LevelIndex(const SparseOD& od, const Hierarchy& h, const CountTree& tree,
             bool origin_side) {
    min_level = tree.root_resolution();
    max_level = tree.target_resolution();
    std::unordered_map<std::string, std::uint32_t> intern;
    ids.reserve(od.size());
    for (const auto& [key, volume] : od.entries()) {
      const CellId& cell = origin_side ? key.first : key.second;
      int res = h.resolution(cell);
      std::vector<std::uint32_t> chain(max_level - min_level + 1);
      for (int level = min_level; level <= max_level; ++level) {
        CellId ancestor = h.parent_clamped(cell, std::max(0, res - level));
        auto [it, inserted] =
            intern.try_emplace(ancestor.token(),
                               static_cast<std::uint32_t>(intern.size()));
        chain[level - min_level] = it->second;
      }
      ids.push_back(std::move(chain));
    }
  }

  std::uint32_t at(std::size_t entry, int level) const {
    return ids[entry][level - min_level];
  }
};

bool level_pair_feasible(const SparseOD& od, const LevelIndex& origin_index,
                         const LevelIndex& destination_index, int lo, int ld,
                         double k, std::vector<double>& volumes) {
  std::unordered_map<std::uint64_t, double> groups;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    std::uint64_t g =
        (static_cast<std::uint64_t>(origin_index.at(i, lo)) << 32) |
        destination_index.at(i, ld);
    groups[g] += volumes[i];
  }
  (void)od;
  for (const auto& [group, volume] : groups)
    if (volume < k) return false;
  return true;
}

}  // namespace

OighResult oigh(const SparseOD& od, CountTreePtr tree_origin,
                CountTreePtr tree_destination, double k, Deadline deadline) {
  if (od.empty()) fail(ErrorCode::kEmptyMatrix, "empty OD matrix");
  const Hierarchy& h = *tree_origin->hierarchy();

  const int o_min = tree_origin->root_resolution();
  const int o_max = tree_origin->target_resolution();
  const int d_min = tree_destination->root_resolution();
  const int d_max = tree_destination->target_resolution();

  LevelIndex origin_index(od, h, *tree_origin, true);
  LevelIndex destination_index(od, *tree_destination->hierarchy(),
                               *tree_destination, false);
  std::vector<double> volumes;
  volumes.reserve(od.size());
  for (const auto& [key, volume] : od.entries())
    volumes.push_back(od.volume(volume));

  int best_lo = o_min;
  int best_ld = d_min;
  bool found = false;
  for (int lo = o_min; lo <= o_max; ++lo) {
    for (int ld = d_min; ld <= d_max; ++ld) {
      deadline.check();
      if (!level_pair_feasible(od, origin_index, destination_index, lo, ld, k,
                               volumes))
        continue;
      bool better = false;
      if (!found) {
        better = true;
      } else {
        int sum = lo + ld, best_sum = best_lo + best_ld;
        if (sum != best_sum) {
          better = sum > best_sum;
        } else if (std::min(lo, ld) != std::min(best_lo, best_ld)) {
          better = std::min(lo, ld) > std::min(best_lo, best_ld);
        } else {
          better = lo > best_lo;
        }
      }
      if (better) {
        best_lo = lo;
        best_ld = ld;
        found = true;
      }
    }
  }

  SparseOD matrix(od.mode());
  for (const auto& [key, volume] : od.entries()) {
    int ro = h.resolution(key.first);
    int rd = h.resolution(key.second);
    matrix.add(h.parent_clamped(key.first, std::max(0, ro - best_lo)),
               h.parent_clamped(key.second, std::max(0, rd - best_ld)),
               volume.count, volume.weight);
  }
  return OighResult{best_lo,
                    best_ld,
                    std::move(matrix),
                    found,
                    ZonePartition::uniform(tree_origin, best_lo),
                    ZonePartition::uniform(tree_destination, best_ld)};
}

namespace {

struct MondrianPoint {
  std::array<double, 4> coords{};
  std::size_t record_index = 0;
  double volume = 0.0;
  std::int64_t count = 0;
  double weight = 0.0;
};

struct MondrianSplitter {
  std::array<double, 4> domain_range{};
  double k = 0.0;
  Deadline deadline;
  std::vector<MondrianRegion>* out = nullptr;

  void emit(const std::vector<MondrianPoint>& points) {
    MondrianRegion region;
    for (int d = 0; d < 4; ++d) {
      region.lo[d] = points.front().coords[d];
      region.hi[d] = points.front().coords[d];
    }
    for (const MondrianPoint& p : points) {
      for (int d = 0; d < 4; ++d) {
        region.lo[d] = std::min(region.lo[d], p.coords[d]);
        region.hi[d] = std::max(region.hi[d], p.coords[d]);
      }
      region.members.push_back(p.record_index);
      region.count += p.count;
      region.weight += p.weight;
    }
    std::sort(region.members.begin(), region.members.end());
    out->push_back(std::move(region));
  }

  void split(std::vector<MondrianPoint> points, double total_volume) {
    deadline.check();
    // Widest normalized dimension; ties go to the lowest index.
    int dim = 0;
    double widest = -1.0;
    for (int d = 0; d < 4; ++d) {
      double lo = points.front().coords[d], hi = lo;
      for (const MondrianPoint& p : points) {
        lo = std::min(lo, p.coords[d]);
        hi = std::max(hi, p.coords[d]);
      }
      double width = domain_range[d] > 0.0 ? (hi - lo) / domain_range[d] : 0.0;
      if (width > widest) {
        widest = width;
        dim = d;
      }
    }
    if (widest <= 0.0) {  // all points identical in every dimension
      emit(points);
      return;
    }

    // Volume-weighted median along dim, then relaxed partitioning: points
    // strictly below/above go to their side, ties fill the lighter side.
    std::stable_sort(points.begin(), points.end(),
                     [dim](const MondrianPoint& a, const MondrianPoint& b) {
                       return a.coords[dim] < b.coords[dim];
                     });
    double half = total_volume / 2.0;
    double acc = 0.0;
    double median = points.back().coords[dim];
    for (const MondrianPoint& p : points) {
      acc += p.volume;
      if (acc >= half) {
        median = p.coords[dim];
        break;
      }
    }

    std::vector<MondrianPoint> left, right, equal;
    double left_volume = 0.0, right_volume = 0.0;
    for (MondrianPoint& p : points) {
      if (p.coords[dim] < median) {
        left_volume += p.volume;
        left.push_back(std::move(p));
      } else if (p.coords[dim] > median) {
        right_volume += p.volume;
        right.push_back(std::move(p));
      } else {
        equal.push_back(std::move(p));
      }
    }
    for (MondrianPoint& p : equal) {
      if (left_volume <= right_volume) {
        left_volume += p.volume;
        left.push_back(std::move(p));
      } else {
        right_volume += p.volume;
        right.push_back(std::move(p));
      }
    }

    if (left.empty() || right.empty() || left_volume < k || right_volume < k) {
      // Re-joining keeps the original record order irrelevant: emit sorts.
      for (MondrianPoint& p : right) left.push_back(std::move(p));
      emit(left);
      return;
    }
    split(std::move(left), left_volume);
    split(std::move(right), right_volume);
  }
};

}  // namespace

MondrianResult mondrian(const TripDataset& ds, const Hierarchy& hierarchy,
                        double k, Mode mode, Deadline deadline) {
  if (k < 2.0) fail(ErrorCode::kInvalidArgument, "k must be >= 2");
  if (mode == Mode::kPopulation && !ds.has_weight_column())
    fail(ErrorCode::kInvalidArgument,
         "population mode requires a weight column in the source dataset");
  if (ds.records().empty())
    fail(ErrorCode::kEmptyDataset, "mondrian needs a nonempty dataset");

  std::vector<MondrianPoint> points;
  points.reserve(ds.size());
  double total_volume = 0.0;
  for (std::size_t i = 0; i < ds.records().size(); ++i) {
    const TripRecord& r = ds.records()[i];
    Point o = hierarchy.centroid(r.origin);
    Point d = hierarchy.centroid(r.destination);
    MondrianPoint p;
    p.coords = {o.x, o.y, d.x, d.y};
    p.record_index = i;
    p.count = 1;
    p.weight = r.weight;
    p.volume = mode == Mode::kParticipant ? 1.0 : r.weight;
    total_volume += p.volume;
    points.push_back(p);
  }
  if (total_volume < k)
    fail(ErrorCode::kInsufficientVolume,
         "total volume below k; nothing can be released");

  MondrianSplitter splitter;
  for (int d = 0; d < 4; ++d) {
    double lo = points.front().coords[d], hi = lo;
    for (const MondrianPoint& p : points) {
      lo = std::min(lo, p.coords[d]);
      hi = std::max(hi, p.coords[d]);
    }
    splitter.domain_range[d] = hi - lo;
  }
  splitter.k = k;
  splitter.deadline = deadline;

  MondrianResult result;
  result.mode = mode;
  splitter.out = &result.regions;
  splitter.split(std::move(points), total_volume);
  return result;
}

}  // namespace odk
