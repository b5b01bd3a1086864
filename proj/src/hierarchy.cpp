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

#include "odkanon/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "odkanon/error.hpp"

namespace odk {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t pow7(int e) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) v *= 7;
  return v;
}

}  // namespace

std::shared_ptr<const Hierarchy> Hierarchy::make_synthetic(int max_resolution,
                                                           std::string root) {
  if (max_resolution < 0)
    fail(ErrorCode::kInvalidArgument, "max_resolution must be >= 0");
  if (root.empty() || root.find('/') != std::string::npos)
    fail(ErrorCode::kInvalidArgument, "synthetic root must be a bare token");
  auto h = std::shared_ptr<Hierarchy>(new Hierarchy());
  h->kind_ = Kind::kSynthetic;
  h->max_resolution_ = max_resolution;
  h->synthetic_root_ = root;
  h->roots_.push_back(CellId(std::move(root)));
  return h;
}

std::shared_ptr<const Hierarchy> Hierarchy::make_external(
    std::vector<std::pair<std::string, std::string>> edges,
    std::map<std::string, Point> centroids) {
  if (edges.empty())
    fail(ErrorCode::kInvalidConfig, "external hierarchy needs >= 1 edge");
  auto h = std::shared_ptr<Hierarchy>(new Hierarchy());
  h->kind_ = Kind::kExternal;

  for (auto& [child, parent] : edges) {
    if (child.empty() || parent.empty())
      fail(ErrorCode::kParse, "empty cell token in parent map");
    if (child == parent)
      fail(ErrorCode::kParse, "self-parenting cell: " + child);
    auto [it, inserted] = h->nodes_.try_emplace(child);
    if (!inserted && !it->second.parent.empty() && it->second.parent != parent)
      fail(ErrorCode::kParse, "cell has two parents: " + child);
    it->second.parent = parent;
    h->nodes_[parent].children.push_back(CellId(child));
  }
  for (auto& [token, node] : h->nodes_)
    std::sort(node.children.begin(), node.children.end());

  // Depths via memoized upward walks; a walk longer than the node count
  // means the parent map has a cycle.
  const std::size_t n = h->nodes_.size();
  for (auto& [token, node] : h->nodes_) {
    std::vector<std::string> chain;
    const std::string* cur = &token;
    while (true) {
      const ExternalNode& cn = h->nodes_.at(*cur);
      if (cn.parent.empty() || cn.depth > 0) break;
      chain.push_back(*cur);
      if (chain.size() > n)
        fail(ErrorCode::kParse, "cycle in parent map near: " + token);
      cur = &cn.parent;
    }
    int base = h->nodes_.at(*cur).depth;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
      h->nodes_.at(*it).depth = ++base;
  }

  int max_depth = 0;
  for (auto& [token, node] : h->nodes_) {
    max_depth = std::max(max_depth, node.depth);
    if (node.parent.empty()) h->roots_.push_back(CellId(token));
  }
  std::sort(h->roots_.begin(), h->roots_.end());
  h->max_resolution_ = max_depth;

  // Subtree leaf counts, deepest levels first.
  std::vector<std::pair<int, std::string>> by_depth;
  by_depth.reserve(h->nodes_.size());
  for (auto& [token, node] : h->nodes_) by_depth.emplace_back(node.depth, token);
  std::sort(by_depth.begin(), by_depth.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (auto& [depth, token] : by_depth) {
    ExternalNode& node = h->nodes_.at(token);
    if (node.children.empty()) {
      node.leaf_count = 1;
    } else {
      node.leaf_count = 0;
      for (const CellId& c : node.children)
        node.leaf_count += h->nodes_.at(c.token()).leaf_count;
    }
  }

  for (auto& [token, point] : centroids) h->centroids_[token] = point;
  return h;
}

std::shared_ptr<const Hierarchy> Hierarchy::load_external(
    const std::string& parent_csv_path,
    const std::optional<std::string>& centroid_csv_path) {
  csv::Table parents = csv::read_file(parent_csv_path);
  int child_col = parents.column("child");
  int parent_col = parents.column("parent");
  if (child_col < 0 || parent_col < 0)
    fail(ErrorCode::kParse,
         parent_csv_path + ": header must contain 'child' and 'parent'");
  std::vector<std::pair<std::string, std::string>> edges;
  edges.reserve(parents.rows.size());
  for (const auto& row : parents.rows)
    edges.emplace_back(row[child_col], row[parent_col]);

  std::map<std::string, Point> centroids;
  if (centroid_csv_path) {
    csv::Table pts = csv::read_file(*centroid_csv_path);
    int cell_col = pts.column("cell");
    int x_col = pts.column("x");
    int y_col = pts.column("y");
    if (cell_col < 0 || x_col < 0 || y_col < 0)
      fail(ErrorCode::kParse,
           *centroid_csv_path + ": header must contain 'cell', 'x', 'y'");
    for (std::size_t i = 0; i < pts.rows.size(); ++i) {
      const auto& row = pts.rows[i];
      centroids[row[cell_col]] =
          Point{csv::parse_double(row[x_col], i + 2, x_col, "x"),
                csv::parse_double(row[y_col], i + 2, y_col, "y")};
    }
  }
  return make_external(std::move(edges), std::move(centroids));
}

void Hierarchy::validate_synthetic(const CellId& cell) const {
  if (cell.root_token() != synthetic_root_)
    fail(ErrorCode::kUnknownCell, "unknown root in cell: " + cell.token());
  auto digits = cell.path();  // digit validation happens here
  if (static_cast<int>(digits.size()) > max_resolution_)
    fail(ErrorCode::kUnknownCell,
         "cell deeper than max resolution: " + cell.token());
}

const Hierarchy::ExternalNode& Hierarchy::external_node(
    const CellId& cell) const {
  auto it = nodes_.find(cell.token());
  if (it == nodes_.end())
    fail(ErrorCode::kUnknownCell, "unknown cell: " + cell.token());
  return it->second;
}

bool Hierarchy::contains(const CellId& cell) const {
  if (kind_ == Kind::kSynthetic) {
    if (cell.root_token() != synthetic_root_) return false;
    int depth = 0;
    const std::string& t = cell.token();
    for (std::size_t i = synthetic_root_.size(); i < t.size(); i += 2) {
      if (t[i] != '/' || i + 1 >= t.size()) return false;
      char c = t[i + 1];
      if (c < '0' || c > '6') return false;
      ++depth;
    }
    return depth <= max_resolution_;
  }
  return nodes_.count(cell.token()) > 0;
}

int Hierarchy::resolution(const CellId& cell) const {
  if (kind_ == Kind::kSynthetic) {
    validate_synthetic(cell);
    return cell.path_length();
  }
  return external_node(cell).depth;
}

bool Hierarchy::is_leaf(const CellId& cell) const {
  if (kind_ == Kind::kSynthetic)
    return resolution(cell) == max_resolution_;
  return external_node(cell).children.empty();
}

CellId Hierarchy::parent(const CellId& cell, int levels_up) const {
  if (levels_up < 1) fail(ErrorCode::kInvalidArgument, "levels_up must be >= 1");
  if (kind_ == Kind::kSynthetic) {
    validate_synthetic(cell);
    if (levels_up > cell.path_length())
      fail(ErrorCode::kAboveRoot, "no ancestor " + std::to_string(levels_up) +
                                      " levels above " + cell.token());
    return cell.truncated(levels_up);
  }
  const ExternalNode* node = &external_node(cell);
  const std::string* token = nullptr;
  for (int i = 0; i < levels_up; ++i) {
    if (node->parent.empty())
      fail(ErrorCode::kAboveRoot, "no ancestor " + std::to_string(levels_up) +
                                      " levels above " + cell.token());
    token = &node->parent;
    node = &nodes_.at(*token);
  }
  return CellId(*token);
}

CellId Hierarchy::parent_clamped(const CellId& cell, int levels_up) const {
  int res = resolution(cell);
  int up = std::min(levels_up, res);
  return up == 0 ? cell : parent(cell, up);
}

std::vector<CellId> Hierarchy::children(const CellId& cell) const {
  if (kind_ == Kind::kSynthetic) {
    validate_synthetic(cell);
    if (cell.path_length() >= max_resolution_)
      fail(ErrorCode::kLeafCell, "cell at max resolution: " + cell.token());
    std::vector<CellId> out;
    out.reserve(7);
    for (std::uint8_t d = 0; d < 7; ++d) out.push_back(cell.child(d));
    return out;
  }
  const ExternalNode& node = external_node(cell);
  if (node.children.empty())
    fail(ErrorCode::kLeafCell, "cell has no children: " + cell.token());
  return node.children;
}

Point Hierarchy::centroid(const CellId& cell) const {
  if (kind_ == Kind::kExternal) {
    external_node(cell);  // UnknownCell check
    auto it = centroids_.find(cell.token());
    if (it == centroids_.end())
      fail(ErrorCode::kMissingCentroid,
           "no centroid supplied for cell: " + cell.token());
    return it->second;
  }
  validate_synthetic(cell);
  Point p{0.0, 0.0};
  auto digits = cell.path();
  double scale = 1.0;  // 7^(-depth_of_parent / 2)
  const double shrink = 1.0 / std::sqrt(7.0);
  for (std::uint8_t d : digits) {
    if (d < 6) {
      double angle = kPi / 3.0 * d;
      p.x += std::cos(angle) * scale;
      p.y += std::sin(angle) * scale;
    }
    scale *= shrink;
  }
  return p;
}

std::uint64_t Hierarchy::leaf_count_under(const CellId& cell,
                                          int target_resolution) const {
  if (kind_ == Kind::kSynthetic) {
    int res = resolution(cell);
    if (target_resolution < res)
      fail(ErrorCode::kInvalidArgument,
           "target resolution above cell resolution");
    return pow7(target_resolution - res);
  }
  return external_node(cell).leaf_count;
}

void Hierarchy::for_each_leaf_under(
    const CellId& cell, int target_resolution,
    const std::function<void(const CellId&)>& fn) const {
  if (kind_ == Kind::kSynthetic) {
    int res = resolution(cell);
    if (res == target_resolution) {
      fn(cell);
      return;
    }
    for (std::uint8_t d = 0; d < 7; ++d)
      for_each_leaf_under(cell.child(d), target_resolution, fn);
    return;
  }
  const ExternalNode& node = external_node(cell);
  if (node.children.empty()) {
    fn(cell);
    return;
  }
  for (const CellId& c : node.children)
    for_each_leaf_under(c, target_resolution, fn);
}

CellId Hierarchy::root_of(const CellId& cell) const {
  int res = resolution(cell);
  return res == 0 ? cell : parent(cell, res);
}

}  // namespace odk
