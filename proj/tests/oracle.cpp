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

#include "oracle.hpp"

#include <cmath>
#include <map>

namespace odk::test {

namespace {

double trip_volume(const TripRecord& r, Mode mode) {
  return mode == Mode::kParticipant ? 1.0 : r.weight;
}

bool pair_suppressed(const SuppressionReport* suppression,
                     const TripRecord& r) {
  if (!suppression) return false;
  for (const SuppressedPair& p : suppression->suppressed_pairs)
    if (p.origin == r.origin && p.destination == r.destination) return true;
  return false;
}

// Zone lookup by walking ancestors and linearly scanning the released zone
// list at each step; identity if nothing matches up to the tree root.
CellId lookup_zone(const std::vector<CellId>& zones, const ZonePartition& p,
                   const CellId& leaf) {
  const Hierarchy& h = *p.tree()->hierarchy();
  CellId cur = leaf;
  while (true) {
    for (const CellId& z : zones)
      if (z == cur) return cur;
    if (cur == p.tree()->root() || h.resolution(cur) == 0) break;
    cur = h.parent(cur, 1);
  }
  return leaf;
}

void collect_leaves(const Hierarchy& h, const CellId& cell, int target,
                    std::vector<CellId>* out) {
  if (h.kind() == Hierarchy::Kind::kSynthetic
          ? h.resolution(cell) == target
          : h.is_leaf(cell)) {
    out->push_back(cell);
    return;
  }
  for (const CellId& c : h.children(cell)) collect_leaves(h, c, target, out);
}

bool is_under(const Hierarchy& h, const CellId& leaf, const CellId& root) {
  CellId cur = leaf;
  while (true) {
    if (cur == root) return true;
    if (h.resolution(cur) == 0) return false;
    cur = h.parent(cur, 1);
  }
}

// Per-axis view assembled the slow way: every covered leaf enumerated from
// the hierarchy, assigned to its zone by linear scan, and zone sizes taken
// as the number of assigned leaves.
struct AxisView {
  std::vector<CellId> leaves;
  std::map<CellId, CellId> zone_of;
  std::map<CellId, double> zone_size;

  AxisView(const Hierarchy& h, const ZonePartition& partition) {
    const std::vector<CellId> zones = partition.zones();
    collect_leaves(h, partition.tree()->root(),
                   partition.tree()->target_resolution(), &leaves);
    for (const CellId& leaf : leaves) {
      CellId zone = lookup_zone(zones, partition, leaf);
      zone_of.emplace(leaf, zone);
      zone_size[zone] += 1.0;
    }
  }
};

}  // namespace

OracleMetrics oracle_metrics(const TripDataset& ds,
                             const SuppressionReport* suppression,
                             const ZonePartition& origins,
                             const ZonePartition& destinations, Mode eval_mode,
                             double eval_k) {
  const Hierarchy& h = *ds.hierarchy();
  AxisView origin_view(h, origins);
  AxisView destination_view(h, destinations);
  const std::vector<CellId> origin_zone_list = origins.zones();
  const std::vector<CellId> destination_zone_list = destinations.zones();

  // Per-trip aggregation: original leaf-level matrix (everything), released
  // class volumes (unsuppressed only), total and suppressed volume.
  std::map<OdKey, double> original;
  std::map<OdKey, double> class_volume;
  double total = 0.0;
  double suppressed_volume = 0.0;
  for (const TripRecord& r : ds.records()) {
    const double v = trip_volume(r, eval_mode);
    total += v;
    original[{r.origin, r.destination}] += v;
    if (pair_suppressed(suppression, r)) {
      suppressed_volume += v;
      continue;
    }
    class_volume[{lookup_zone(origin_zone_list, origins, r.origin),
                  lookup_zone(destination_zone_list, destinations,
                              r.destination)}] += v;
  }

  OracleMetrics out;

  double below_k_volume = suppressed_volume;
  double released = 0.0;
  std::int64_t valid = 0;
  double gbar_sum = 0.0;
  for (const auto& [zone_key, volume] : class_volume) {
    if (volume < eval_k) {
      below_k_volume += volume;
      continue;
    }
    released += volume;
    ++valid;
    gbar_sum += (origin_view.zone_size.at(zone_key.first) +
                 destination_view.zone_size.at(zone_key.second)) *
                volume;
    out.c_dm += volume * volume;
  }
  out.c_dm += total * below_k_volume;
  if (valid > 0) {
    out.c_avg = released / static_cast<double>(valid) / eval_k;
    out.g_bar = gbar_sum / released;
  }

  // Reconstruction loss: exhaustive double loop over the coverage product.
  double e_sum = 0.0;
  for (const CellId& lo : origin_view.leaves) {
    const CellId& zo = origin_view.zone_of.at(lo);
    for (const CellId& ld : destination_view.leaves) {
      const CellId& zd = destination_view.zone_of.at(ld);
      double reconstructed = 0.0;
      auto it = class_volume.find({zo, zd});
      if (it != class_volume.end() && it->second >= eval_k)
        reconstructed = it->second / (origin_view.zone_size.at(zo) *
                                      destination_view.zone_size.at(zd));
      double original_volume = 0.0;
      auto orig = original.find({lo, ld});
      if (orig != original.end()) original_volume = orig->second;
      e_sum += std::abs(reconstructed - original_volume);
    }
  }
  // Original pairs outside the coverage product (suppressed flows whose
  // endpoints fall outside a tree root) reconstruct to zero.
  for (const auto& [key, volume] : original) {
    if (is_under(h, key.first, origins.tree()->root()) &&
        is_under(h, key.second, destinations.tree()->root()))
      continue;
    e_sum += volume;
  }
  out.recon_loss = total > 0.0 ? e_sum / total : 0.0;
  return out;
}

}  // namespace odk::test
