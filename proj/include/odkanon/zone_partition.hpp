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

#ifndef ODKANON_ZONE_PARTITION_HPP_
#define ODKANON_ZONE_PARTITION_HPP_

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "odkanon/count_tree.hpp"

namespace odk {

// One axis of a homogeneous generalization: an antichain of zones that
// jointly covers the tree's leaves. Leaves under no zone map to themselves
// (untouched zero-volume branches).
class ZonePartition {
 public:
  // Explicit zone set, e.g. the live labels left by the generalizer.
  ZonePartition(CountTreePtr tree, std::vector<CellId> zones);

  // Uniform horizontal cut: every leaf maps to its ancestor at `level`.
  static ZonePartition uniform(CountTreePtr tree, int level);

  CellId zone_of(const CellId& leaf) const;
  std::uint64_t leaf_count(const CellId& zone) const;

  // Explicit zone list in canonical order. For uniform partitions this
  // enumerates all resolution-`level` descendants of the tree root.
  std::vector<CellId> zones() const;

  bool is_uniform() const { return uniform_level_.has_value(); }
  int uniform_level() const { return *uniform_level_; }
  const CountTreePtr& tree() const { return tree_; }

 private:
  explicit ZonePartition(CountTreePtr tree) : tree_(std::move(tree)) {}

  CountTreePtr tree_;
  std::vector<CellId> zones_;
  std::unordered_set<std::string> zone_set_;
  std::optional<int> uniform_level_;
};

}  // namespace odk

#endif  // ODKANON_ZONE_PARTITION_HPP_
