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

#include "odkanon/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include "odkanon/error.hpp"

namespace odk {

namespace {

double eval_volume(const OdVolume& v, Mode mode) { return v.in(mode); }

std::unordered_set<std::string> suppressed_keys(
    const SuppressionReport* suppression) {
  std::unordered_set<std::string> keys;
  if (!suppression) return keys;
  for (const SuppressedPair& p : suppression->suppressed_pairs)
    keys.insert(p.origin.token() + "|" + p.destination.token());
  return keys;
}

}  // namespace

EquivalenceClasses classes_from_partitions(const SparseOD& original_od,
                                           const SuppressionReport* suppression,
                                           const ZonePartition& origins,
                                           const ZonePartition& destinations,
                                           Mode eval_mode, double eval_k) {
  EquivalenceClasses eq;
  eq.evaluation_mode = eval_mode;
  eq.k = eval_k;
  eq.hierarchy_based = true;

  const auto suppressed = suppressed_keys(suppression);
  std::map<OdKey, EquivalenceClass> classes;
  std::vector<std::pair<OdKey, double>> suppressed_entries;
  for (const auto& [key, volume] : original_od.entries()) {
    double v = eval_volume(volume, eval_mode);
    eq.total_volume += v;
    if (!suppressed.empty() &&
        suppressed.count(key.first.token() + "|" + key.second.token())) {
      eq.suppressed_volume += v;
      suppressed_entries.emplace_back(key, v);
      continue;
    }
    OdKey zone_key{origins.zone_of(key.first),
                   destinations.zone_of(key.second)};
    EquivalenceClass& c = classes[zone_key];
    c.count += volume.count;
    c.weight += volume.weight;
    c.volume += v;
    c.member_volumes.push_back(v);
  }
  // Suppressed pairs landing inside a released class's footprint are
  // remembered there; the rest reconstruct to zero.
  for (const auto& [key, v] : suppressed_entries) {
    OdKey zone_key{origins.zone_of(key.first),
                   destinations.zone_of(key.second)};
    auto it = classes.find(zone_key);
    if (it != classes.end()) it->second.suppressed_member_volumes.push_back(v);
  }
  // Distinct data-bearing leaves per zone, for the data-leaf g_bar variant.
  std::map<CellId, std::uint64_t> origin_data, destination_data;
  {
    std::set<CellId> seen_origins, seen_destinations;
    for (const auto& [key, volume] : original_od.entries()) {
      if (!suppressed.empty() &&
          suppressed.count(key.first.token() + "|" + key.second.token()))
        continue;
      if (seen_origins.insert(key.first).second)
        ++origin_data[origins.zone_of(key.first)];
      if (seen_destinations.insert(key.second).second)
        ++destination_data[destinations.zone_of(key.second)];
    }
  }
  eq.classes.reserve(classes.size());
  for (auto& [zone_key, c] : classes) {
    c.origin_zone = zone_key.first;
    c.destination_zone = zone_key.second;
    c.origin_leaves = origins.leaf_count(c.origin_zone);
    c.destination_leaves = destinations.leaf_count(c.destination_zone);
    c.origin_data_leaves = origin_data[c.origin_zone];
    c.destination_data_leaves = destination_data[c.destination_zone];
    eq.classes.push_back(std::move(c));
  }
  return eq;
}

EquivalenceClasses classes_from_regions(const MondrianResult& result,
                                        Mode eval_mode, double eval_k) {
  EquivalenceClasses eq;
  eq.evaluation_mode = eval_mode;
  eq.k = eval_k;
  eq.hierarchy_based = false;
  for (const MondrianRegion& r : result.regions) {
    EquivalenceClass c;
    c.count = r.count;
    c.weight = r.weight;
    c.volume = eval_mode == Mode::kParticipant ? static_cast<double>(r.count)
                                               : r.weight;
    eq.total_volume += c.volume;
    eq.classes.push_back(std::move(c));
  }
  return eq;
}

double c_dm(const EquivalenceClasses& eq) {
  double valid_term = 0.0;
  double below_k_volume = eq.suppressed_volume;
  for (const EquivalenceClass& c : eq.classes) {
    if (c.volume >= eq.k)
      valid_term += c.volume * c.volume;
    else
      below_k_volume += c.volume;
  }
  return valid_term + eq.total_volume * below_k_volume;
}

double c_avg(const EquivalenceClasses& eq) {
  double released = 0.0;
  std::int64_t valid = 0;
  for (const EquivalenceClass& c : eq.classes) {
    if (c.volume < eq.k) continue;
    released += c.volume;
    ++valid;
  }
  if (valid == 0)
    fail(ErrorCode::kNoValidClasses, "no equivalence class reaches k");
  return released / static_cast<double>(valid) / eq.k;
}

double g_bar(const EquivalenceClasses& eq, LeafCountPolicy policy) {
  if (!eq.hierarchy_based)
    fail(ErrorCode::kNotApplicable,
         "mean generalization error needs a hierarchy-based result");
  double released = 0.0;
  double loss = 0.0;
  for (const EquivalenceClass& c : eq.classes) {
    if (c.volume < eq.k) continue;
    released += c.volume;
    const std::uint64_t footprint =
        policy == LeafCountPolicy::kCoverage
            ? c.origin_leaves + c.destination_leaves
            : c.origin_data_leaves + c.destination_data_leaves;
    loss += static_cast<double>(footprint) * c.volume;
  }
  if (released <= 0.0)
    fail(ErrorCode::kNoValidClasses, "no equivalence class reaches k");
  return loss / released;
}

double reconstruction_loss(const EquivalenceClasses& eq) {
  if (!eq.hierarchy_based)
    fail(ErrorCode::kNotApplicable,
         "reconstruction loss needs a hierarchy-based result");
  if (eq.total_volume <= 0.0) return 0.0;
  // Start from "everything reconstructs to zero", then correct the leaf
  // pairs that do sit under a released (>= k) class.
  double sum = eq.suppressed_volume;
  for (const EquivalenceClass& c : eq.classes) {
    if (c.volume < eq.k) {
      sum += c.volume;  // below k: nothing released, reconstructed as zero
      continue;
    }
    const double pairs = static_cast<double>(c.origin_leaves) *
                         static_cast<double>(c.destination_leaves);
    const double reconstructed = c.volume / pairs;
    for (double v : c.member_volumes) sum += std::abs(reconstructed - v);
    for (double v : c.suppressed_member_volumes)
      sum += std::abs(reconstructed - v) - v;  // replaces the zero-density term
    sum +=
        (pairs - static_cast<double>(c.member_volumes.size() +
                                     c.suppressed_member_volumes.size())) *
        reconstructed;
  }
  return sum / eq.total_volume;
}

AuditOutcome min_k_audit(const TripDataset& ds,
                         const SuppressionReport* suppression,
                         const ZonePartition& origins,
                         const ZonePartition& destinations, Mode eval_mode,
                         double required_k) {
  const auto suppressed = suppressed_keys(suppression);
  std::map<OdKey, double> cells;
  // Zone lookups are cached per leaf pair; trips reuse few distinct pairs.
  std::map<OdKey, OdKey> zone_cache;
  for (const TripRecord& r : ds.records()) {
    OdKey leaf_key{r.origin, r.destination};
    if (!suppressed.empty() &&
        suppressed.count(r.origin.token() + "|" + r.destination.token()))
      continue;
    auto it = zone_cache.find(leaf_key);
    if (it == zone_cache.end())
      it = zone_cache
               .emplace(leaf_key, OdKey{origins.zone_of(r.origin),
                                        destinations.zone_of(r.destination)})
               .first;
    cells[it->second] += eval_mode == Mode::kParticipant ? 1.0 : r.weight;
  }
  AuditOutcome out;
  out.required_k = required_k;
  out.min_volume = std::numeric_limits<double>::infinity();
  for (const auto& [zone_key, volume] : cells) {
    out.min_volume = std::min(out.min_volume, volume);
    if (volume < required_k) ++out.cells_below;
  }
  if (cells.empty()) out.min_volume = 0.0;
  return out;
}

AuditOutcome min_k_audit(const MondrianResult& result, Mode eval_mode,
                         double required_k) {
  AuditOutcome out;
  out.required_k = required_k;
  out.min_volume = std::numeric_limits<double>::infinity();
  for (const MondrianRegion& r : result.regions) {
    double volume = eval_mode == Mode::kParticipant
                        ? static_cast<double>(r.count)
                        : r.weight;
    out.min_volume = std::min(out.min_volume, volume);
    if (volume < required_k) ++out.cells_below;
  }
  if (result.regions.empty()) out.min_volume = 0.0;
  return out;
}

}  // namespace odk
