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

#ifndef ODKANON_HIERARCHY_HPP_
#define ODKANON_HIERARCHY_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "odkanon/cell.hpp"

namespace odk {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Hierarchical hexagonal grid with parent/child navigation.
//
// Two kinds:
//  - synthetic: one root, exact aperture 7, cells addressed by digit paths.
//    Self-contained stand-in for H3: the anonymization algorithms only use
//    the tree structure, never the geometry.
//  - external: a forest loaded from `child,parent` edges (e.g. precomputed
//    real H3 parent relations). Variable fan-out is allowed; pentagon-style
//    cells with fewer children work like any other node.
//
// Immutable after construction; safe for concurrent reads.
class Hierarchy {
 public:
  enum class Kind { kSynthetic, kExternal };

  static std::shared_ptr<const Hierarchy> make_synthetic(
      int max_resolution, std::string root = "R");

  // `edges` are (child, parent) pairs; `centroids` maps cell token -> point.
  static std::shared_ptr<const Hierarchy> make_external(
      std::vector<std::pair<std::string, std::string>> edges,
      std::map<std::string, Point> centroids = {});

  // CSV loaders per the documented file formats (header required).
  static std::shared_ptr<const Hierarchy> load_external(
      const std::string& parent_csv_path,
      const std::optional<std::string>& centroid_csv_path = std::nullopt);

  Kind kind() const { return kind_; }
  int max_resolution() const { return max_resolution_; }

  bool contains(const CellId& cell) const;
  int resolution(const CellId& cell) const;  // UnknownCell on foreign cells
  bool is_leaf(const CellId& cell) const;

  // Ancestor `levels_up` levels above `cell`. AboveRoot if the walk would
  // pass the root, UnknownCell for unregistered external cells.
  CellId parent(const CellId& cell, int levels_up = 1) const;

  // Ancestor at resolution `resolution(cell) - min(levels_up, resolution)`.
  // Same as parent() but saturates at the root instead of erroring.
  CellId parent_clamped(const CellId& cell, int levels_up) const;

  // Synthetic: the 7 path extensions in digit order. External: registered
  // children sorted by token. LeafCell when there are none.
  std::vector<CellId> children(const CellId& cell) const;

  // Planar embedding. Synthetic cells get a deterministic position: the root
  // sits at (0,0) and child d of a depth-r cell is offset by the axial unit
  // direction d scaled by 7^(-r/2); digit 6 is the center child (zero
  // offset). External cells need supplied coordinates (MissingCentroid).
  Point centroid(const CellId& cell) const;

  // Number of covered leaves in the subtree of `cell`. Synthetic: the
  // resolution-`target_resolution` descendants, 7^(target - res). External:
  // childless descendants including `cell` itself (target ignored).
  std::uint64_t leaf_count_under(const CellId& cell,
                                 int target_resolution) const;

  // Invokes `fn` once per covered leaf under `cell`, in canonical order.
  void for_each_leaf_under(const CellId& cell, int target_resolution,
                           const std::function<void(const CellId&)>& fn) const;

  // Resolution-0 ancestor of `cell`.
  CellId root_of(const CellId& cell) const;

  const std::vector<CellId>& roots() const { return roots_; }

 private:
  Hierarchy() = default;

  void validate_synthetic(const CellId& cell) const;
  struct ExternalNode {
    std::string parent;  // empty for roots
    std::vector<CellId> children;
    int depth = 0;
    std::uint64_t leaf_count = 0;
  };
  const ExternalNode& external_node(const CellId& cell) const;

  Kind kind_ = Kind::kSynthetic;
  int max_resolution_ = 0;
  std::string synthetic_root_;
  std::vector<CellId> roots_;
  std::unordered_map<std::string, ExternalNode> nodes_;
  std::unordered_map<std::string, Point> centroids_;
};

using HierarchyPtr = std::shared_ptr<const Hierarchy>;

}  // namespace odk

#endif  // ODKANON_HIERARCHY_HPP_
