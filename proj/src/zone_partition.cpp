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

#include "odkanon/zone_partition.hpp"

#include <algorithm>
#include <functional>

#include "odkanon/error.hpp"

namespace odk {

ZonePartition::ZonePartition(CountTreePtr tree, std::vector<CellId> zones)
    : tree_(std::move(tree)), zones_(std::move(zones)) {
  if (!tree_) fail(ErrorCode::kInvalidArgument, "null tree");
  std::sort(zones_.begin(), zones_.end());
  for (const CellId& z : zones_) zone_set_.insert(z.token());
}

ZonePartition ZonePartition::uniform(CountTreePtr tree, int level) {
  if (!tree) fail(ErrorCode::kInvalidArgument, "null tree");
  if (level < tree->root_resolution() || level > tree->target_resolution())
    fail(ErrorCode::kInvalidArgument, "uniform level outside tree range");
  ZonePartition p(std::move(tree));
  p.uniform_level_ = level;
  return p;
}

CellId ZonePartition::zone_of(const CellId& leaf) const {
  const Hierarchy& h = *tree_->hierarchy();
  if (uniform_level_) {
    int res = h.resolution(leaf);
    return res <= *uniform_level_ ? leaf : h.parent(leaf, res - *uniform_level_);
  }
  CellId cur = leaf;
  while (true) {
    if (zone_set_.count(cur.token())) return cur;
    // Stop at the tree root (zero branch never merged) or, for leaves
    // outside coverage, at the hierarchy root: identity either way.
    if (cur == tree_->root() || h.resolution(cur) == 0) return leaf;
    cur = h.parent(cur, 1);
  }
}

std::uint64_t ZonePartition::leaf_count(const CellId& zone) const {
  return tree_->leaf_count_under(zone);
}

std::vector<CellId> ZonePartition::zones() const {
  if (!uniform_level_) return zones_;
  // Descendants of the root at the cut level; shallower external leaves
  // stand for themselves so the cut still covers every leaf.
  const Hierarchy& h = *tree_->hierarchy();
  std::vector<CellId> out;
  std::function<void(const CellId&, int)> walk = [&](const CellId& cell,
                                                     int depth) {
    if (depth == *uniform_level_ || h.is_leaf(cell)) {
      out.push_back(cell);
      return;
    }
    for (const CellId& c : h.children(cell)) walk(c, depth + 1);
  };
  walk(tree_->root(), tree_->root_resolution());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace odk
