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

#ifndef ODKANON_COUNT_TREE_HPP_
#define ODKANON_COUNT_TREE_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "odkanon/hierarchy.hpp"
#include "odkanon/od_matrix.hpp"

namespace odk {

enum class Endpoint { kOrigin, kDestination };

// Per-endpoint hierarchical tree over the cells used by an OD matrix.
//
// The root is the deepest cell that is an ancestor of every used endpoint
// cell; counts are aggregated bottom-up so each node carries the total
// volume of its subtree. Coverage at the target resolution is the full set
// of the root's descendants (all parent-map cells for external
// hierarchies); zero-volume branches are tracked implicitly instead of
// being materialized — volume_of() answers 0 for them and
// leaf_count_under() counts them in closed form, which is what every
// consumer of coverage actually needs.
class CountTree {
 public:
  static std::shared_ptr<const CountTree> build(const SparseOD& od,
                                                HierarchyPtr hierarchy,
                                                Endpoint endpoint);

  const CellId& root() const { return root_; }
  int root_resolution() const { return root_resolution_; }
  int target_resolution() const { return target_resolution_; }
  Endpoint endpoint() const { return endpoint_; }
  const HierarchyPtr& hierarchy() const { return hierarchy_; }

  bool materialized(const CellId& cell) const;
  // Aggregated volume of the subtree at `cell`; zero for covered cells
  // without data. UnknownCell for cells outside the root's subtree.
  OdVolume volume_of(const CellId& cell) const;
  OdVolume root_volume() const { return volume_of(root_); }

  // Materialized (data-bearing) children, canonical order.
  const std::vector<CellId>& children_of(const CellId& cell) const;
  std::optional<CellId> parent_of(const CellId& cell) const;

  std::uint64_t covered_leaf_count() const;
  std::uint64_t leaf_count_under(const CellId& cell) const;
  void for_each_covered_leaf(
      const std::function<void(const CellId&)>& fn) const;

  std::size_t node_count() const { return nodes_.size(); }
  // Data-bearing leaves (cells that appear in the matrix), canonical order.
  const std::vector<CellId>& data_leaves() const { return data_leaves_; }

  // Debugging dump (node id, volume, child count per materialized node);
  // not a stability-guaranteed format.
  std::string to_debug_json() const;

 private:
  struct Node {
    OdVolume volume;
    std::vector<CellId> children;
    std::optional<CellId> parent;
  };

  const Node& node(const CellId& cell) const;

  CellId root_;
  int root_resolution_ = 0;
  int target_resolution_ = 0;
  Endpoint endpoint_ = Endpoint::kOrigin;
  HierarchyPtr hierarchy_;
  std::unordered_map<std::string, Node> nodes_;
  std::vector<CellId> data_leaves_;
};

using CountTreePtr = std::shared_ptr<const CountTree>;

}  // namespace odk

#endif  // ODKANON_COUNT_TREE_HPP_
