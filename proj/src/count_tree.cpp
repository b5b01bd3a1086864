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

#include "odkanon/count_tree.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "odkanon/error.hpp"

namespace odk {

std::shared_ptr<const CountTree> CountTree::build(const SparseOD& od,
                                                  HierarchyPtr hierarchy,
                                                  Endpoint endpoint) {
  if (od.empty())
    fail(ErrorCode::kEmptyMatrix, "cannot build a tree from an empty matrix");
  if (!hierarchy) fail(ErrorCode::kInvalidArgument, "null hierarchy");

  // Aggregate volumes per endpoint cell, canonical order.
  std::map<CellId, OdVolume> used;
  for (const auto& [key, volume] : od.entries()) {
    const CellId& cell =
        endpoint == Endpoint::kOrigin ? key.first : key.second;
    OdVolume& v = used[cell];
    v.count += volume.count;
    v.weight += volume.weight;
  }

  auto tree = std::shared_ptr<CountTree>(new CountTree());
  tree->hierarchy_ = hierarchy;
  tree->endpoint_ = endpoint;

  int target = 0;
  for (const auto& [cell, volume] : used)
    target = std::max(target, hierarchy->resolution(cell));
  tree->target_resolution_ = target;

  // Root detection: the deepest resolution at which all used cells share a
  // single ancestor. Cells shallower than a probed resolution stand for
  // themselves.
  int root_resolution = -1;
  CellId root;
  for (int r = target; r >= 0; --r) {
    std::set<CellId> ancestors;
    for (const auto& [cell, volume] : used) {
      int res = hierarchy->resolution(cell);
      ancestors.insert(res <= r ? cell : hierarchy->parent(cell, res - r));
      if (ancestors.size() > 1) break;
    }
    if (ancestors.size() == 1) {
      root_resolution = r;
      root = *ancestors.begin();
      break;
    }
  }
  if (root_resolution < 0)
    fail(ErrorCode::kDisjointRoots,
         "endpoint cells span multiple top-level roots");
  tree->root_ = root;
  tree->root_resolution_ = root_resolution;

  // Materialize the path from every data-bearing leaf up to the root and
  // propagate volumes.
  for (const auto& [cell, volume] : used) {
    tree->data_leaves_.push_back(cell);
    CellId cur = cell;
    Node* node = &tree->nodes_[cur.token()];
    node->volume.count += volume.count;
    node->volume.weight += volume.weight;
    while (cur != root) {
      CellId up = hierarchy->parent(cur, 1);
      Node& parent_node = tree->nodes_[up.token()];
      parent_node.volume.count += volume.count;
      parent_node.volume.weight += volume.weight;
      tree->nodes_[cur.token()].parent = up;
      parent_node.children.push_back(cur);
      cur = up;
    }
  }
  // Children accumulated once per contributing leaf; dedupe and order.
  for (auto& [token, node] : tree->nodes_) {
    std::sort(node.children.begin(), node.children.end());
    node.children.erase(
        std::unique(node.children.begin(), node.children.end()),
        node.children.end());
  }
  return tree;
}

const CountTree::Node& CountTree::node(const CellId& cell) const {
  auto it = nodes_.find(cell.token());
  if (it == nodes_.end())
    fail(ErrorCode::kUnknownCell, "cell not in tree: " + cell.token());
  return it->second;
}

bool CountTree::materialized(const CellId& cell) const {
  return nodes_.count(cell.token()) > 0;
}

OdVolume CountTree::volume_of(const CellId& cell) const {
  auto it = nodes_.find(cell.token());
  if (it != nodes_.end()) return it->second.volume;
  // Covered but data-free: must sit under the root.
  int res = hierarchy_->resolution(cell);
  if (res < root_resolution_ ||
      (res > root_resolution_ &&
       hierarchy_->parent(cell, res - root_resolution_) != root_) ||
      (res == root_resolution_ && cell != root_))
    fail(ErrorCode::kUnknownCell,
         "cell outside tree coverage: " + cell.token());
  return OdVolume{};
}

const std::vector<CellId>& CountTree::children_of(const CellId& cell) const {
  return node(cell).children;
}

std::optional<CellId> CountTree::parent_of(const CellId& cell) const {
  return node(cell).parent;
}

std::uint64_t CountTree::covered_leaf_count() const {
  return hierarchy_->leaf_count_under(root_, target_resolution_);
}

std::uint64_t CountTree::leaf_count_under(const CellId& cell) const {
  return hierarchy_->leaf_count_under(cell, target_resolution_);
}

void CountTree::for_each_covered_leaf(
    const std::function<void(const CellId&)>& fn) const {
  hierarchy_->for_each_leaf_under(root_, target_resolution_, fn);
}

std::string CountTree::to_debug_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  std::vector<const std::string*> tokens;
  tokens.reserve(nodes_.size());
  for (const auto& [token, node] : nodes_) tokens.push_back(&token);
  std::sort(tokens.begin(), tokens.end(),
            [](const std::string* a, const std::string* b) { return *a < *b; });
  for (const std::string* token : tokens) {
    const Node& node = nodes_.at(*token);
    nodes.push_back(nlohmann::json{{"cell", *token},
                                   {"count", node.volume.count},
                                   {"weight", node.volume.weight},
                                   {"children", node.children.size()}});
  }
  nlohmann::json out{{"root", root_.token()},
                     {"target_resolution", target_resolution_},
                     {"nodes", std::move(nodes)}};
  return out.dump(2);
}

}  // namespace odk
