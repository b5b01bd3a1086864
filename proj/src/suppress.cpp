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

#include "odkanon/suppress.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "odkanon/error.hpp"

namespace odk {

bool SuppressionReport::contains(const CellId& origin,
                                 const CellId& destination) const {
  for (const SuppressedPair& p : suppressed_pairs)
    if (p.origin == origin && p.destination == destination) return true;
  return false;
}

std::pair<SparseOD, SuppressionReport> prefilter(const SparseOD& od,
                                                 const Hierarchy& hierarchy,
                                                 const SuppressionConfig& cfg) {
  if (od.empty()) fail(ErrorCode::kEmptyMatrix, "prefilter on empty OD matrix");
  if (cfg.budget_fraction < 0.0 || cfg.budget_fraction > 1.0)
    fail(ErrorCode::kInvalidConfig, "budget fraction must be in [0, 1]");
  if (cfg.max_levels < 0)
    fail(ErrorCode::kInvalidConfig, "max generalization levels must be >= 0");

  const std::size_t n = od.size();
  const std::size_t budget =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) *
                                          cfg.budget_fraction));

  std::vector<const std::pair<const OdKey, OdVolume>*> pairs;
  pairs.reserve(n);
  for (const auto& entry : od.entries()) pairs.push_back(&entry);

  // A pair is valid once its level-l group's aggregated volume reaches k for
  // any l in 0..L; validity per level is independent.
  std::vector<bool> valid(n, false);
  for (int level = 0; level <= cfg.max_levels; ++level) {
    std::unordered_map<std::string, double> group_volume;
    std::vector<std::string> group_of(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (valid[i]) continue;
      const OdKey& key = pairs[i]->first;
      std::string group = hierarchy.parent_clamped(key.first, level).token();
      group.push_back('|');
      group += hierarchy.parent_clamped(key.second, level).token();
      group_volume[group] += od.volume(pairs[i]->second);
      group_of[i] = std::move(group);
    }
    // Valid pairs still count toward their group's aggregate.
    for (std::size_t i = 0; i < n; ++i) {
      if (!valid[i]) continue;
      const OdKey& key = pairs[i]->first;
      std::string group = hierarchy.parent_clamped(key.first, level).token();
      group.push_back('|');
      group += hierarchy.parent_clamped(key.second, level).token();
      auto it = group_volume.find(group);
      if (it != group_volume.end()) it->second += od.volume(pairs[i]->second);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (valid[i]) continue;
      if (group_volume.at(group_of[i]) >= cfg.k) valid[i] = true;
    }
  }

  std::vector<std::size_t> problematic;
  for (std::size_t i = 0; i < n; ++i)
    if (!valid[i]) problematic.push_back(i);

  if (problematic.size() > budget) {
    std::sort(problematic.begin(), problematic.end(),
              [&](std::size_t a, std::size_t b) {
                double va = od.volume(pairs[a]->second);
                double vb = od.volume(pairs[b]->second);
                if (va != vb) return va < vb;
                return pairs[a]->first < pairs[b]->first;
              });
    problematic.resize(budget);
  }

  std::vector<bool> drop(n, false);
  for (std::size_t i : problematic) drop[i] = true;

  SparseOD filtered(od.mode());
  SuppressionReport report;
  report.budget_rows = budget;
  for (std::size_t i = 0; i < n; ++i) {
    const OdKey& key = pairs[i]->first;
    const OdVolume& v = pairs[i]->second;
    if (!drop[i]) {
      filtered.add(key.first, key.second, v.count, v.weight);
      continue;
    }
    report.suppressed_pairs.push_back(SuppressedPair{
        key.first, key.second, v.count, v.weight, od.volume(v)});
    report.suppressed_volume += od.volume(v);
    report.suppressed_count += v.count;
    report.suppressed_weight += v.weight;
  }
  report.suppressed_row_count = report.suppressed_pairs.size();
  return {std::move(filtered), std::move(report)};
}

}  // namespace odk
