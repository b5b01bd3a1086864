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

#include "odkanon/generalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include "odkanon/error.hpp"

namespace odk {

const char* axis_name(Axis axis) {
  return axis == Axis::kOrigin ? "origin" : "destination";
}

const char* termination_name(Termination t) {
  return t == Termination::kReachedK ? "reached_k" : "exhausted";
}

namespace {

Axis other(Axis axis) {
  return axis == Axis::kOrigin ? Axis::kDestination : Axis::kOrigin;
}

constexpr int kNoParent = -1;

}  // namespace

struct Generalizer::Impl {
  // Labels are interned per axis: every initial matrix label and all of its
  // ancestors up to the tree root get a dense id, so the hot loop never
  // touches strings.
  struct AxisState {
    CountTreePtr tree;
    std::vector<std::string> token;  // id -> canonical token
    std::vector<int> parent;         // id -> parent id, kNoParent at tree root
    std::unordered_map<std::string, int> id_of;
    std::vector<char> live;
    std::vector<OdVolume> marginal;   // meaningful while live
    std::vector<int> live_under;      // live labels strictly below the cell
    std::size_t live_count = 0;

    // Sibling groups: live labels sharing a parent, keyed by the parent id.
    // A group is eligible when its members are exactly the live labels under
    // the parent (live_under[parent] == size), which is the consistency
    // check that keeps the final zone set an antichain.
    struct Group {
      std::vector<int> members;  // sorted by token
      double cost = 0.0;
      bool in_eligible = false;
      double eligible_key = 0.0;
    };
    std::unordered_map<int, Group> groups;

    struct EligibleLess {
      const AxisState* ax;
      bool operator()(const std::pair<double, int>& a,
                      const std::pair<double, int>& b) const {
        if (a.first != b.first) return a.first < b.first;
        return ax->token[a.second] < ax->token[b.second];
      }
    };
    std::set<std::pair<double, int>, EligibleLess> eligible{EligibleLess{this}};

    int intern(const Hierarchy& h, const CellId& cell) {
      auto it = id_of.find(cell.token());
      if (it != id_of.end()) return it->second;
      int parent_id = kNoParent;
      if (cell != tree->root()) parent_id = intern(h, h.parent(cell, 1));
      int id = static_cast<int>(token.size());
      token.push_back(cell.token());
      parent.push_back(parent_id);
      live.push_back(0);
      marginal.push_back(OdVolume{});
      live_under.push_back(0);
      id_of.emplace(token.back(), id);
      return id;
    }

    void add_member(int pid, int member, double member_volume) {
      Group& g = groups[pid];
      g.members.insert(
          std::upper_bound(g.members.begin(), g.members.end(), member,
                           [&](int a, int b) { return token[a] < token[b]; }),
          member);
      g.cost += member_volume;
    }

    void refresh_eligibility(int pid) {
      auto it = groups.find(pid);
      if (it == groups.end()) return;
      Group& g = it->second;
      if (g.in_eligible) {
        eligible.erase({g.eligible_key, pid});
        g.in_eligible = false;
      }
      if (!g.members.empty() &&
          live_under[pid] == static_cast<int>(g.members.size())) {
        g.eligible_key = g.cost;
        eligible.insert({g.cost, pid});
        g.in_eligible = true;
      }
    }

    void drop_group(int pid) {
      auto it = groups.find(pid);
      if (it == groups.end()) return;
      if (it->second.in_eligible)
        eligible.erase({it->second.eligible_key, pid});
      groups.erase(it);
    }

    void bump_live_under(int id, int delta) {
      for (int a = parent[id]; a != kNoParent; a = parent[a])
        live_under[a] += delta;
    }
  };

  AxisState axes[2];  // indexed by Axis
  Mode mode = Mode::kParticipant;
  Deadline deadline;

  // Matrix entries keyed by (origin id, destination id), with adjacency sets
  // per live label so merges touch only the affected slice.
  std::unordered_map<std::uint64_t, OdVolume> entries;
  std::vector<std::set<int>> adj_origin;  // origin id -> destination ids
  std::vector<std::set<int>> adj_destination;

  // Lazy min-heap over entry volumes; merged-away keys are skipped on pop.
  using HeapItem = std::pair<double, std::uint64_t>;
  mutable std::priority_queue<HeapItem, std::vector<HeapItem>,
                              std::greater<HeapItem>>
      min_heap;

  double initial_ratio = 1.0;
  mutable Axis last_axis = Axis::kDestination;  // first alternation -> origin

  static std::uint64_t key(int o, int d) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(o)) << 32) |
           static_cast<std::uint32_t>(d);
  }

  AxisState& axis(Axis a) { return axes[static_cast<int>(a)]; }
  const AxisState& axis(Axis a) const { return axes[static_cast<int>(a)]; }

  double vol(const OdVolume& v) const { return v.in(mode); }

  void grow_adjacency() {
    adj_origin.resize(axes[0].token.size());
    adj_destination.resize(axes[1].token.size());
  }

  double current_min() const {
    while (!min_heap.empty()) {
      auto [volume, k] = min_heap.top();
      auto it = entries.find(k);
      if (it != entries.end() && vol(it->second) == volume) return volume;
      min_heap.pop();
    }
    return std::numeric_limits<double>::infinity();
  }

  void merge(Axis a, int pid, const std::vector<int>& members) {
    AxisState& ax = axis(a);
    const bool on_origin = a == Axis::kOrigin;
    auto& adj = on_origin ? adj_origin : adj_destination;
    auto& oadj = on_origin ? adj_destination : adj_origin;

    OdVolume promoted_marginal;
    std::vector<std::uint64_t> touched;
    for (int m : members) {
      promoted_marginal.count += ax.marginal[m].count;
      promoted_marginal.weight += ax.marginal[m].weight;
      for (int o : adj[m]) {
        std::uint64_t from = on_origin ? key(m, o) : key(o, m);
        std::uint64_t to = on_origin ? key(pid, o) : key(o, pid);
        auto node = entries.extract(from);
        OdVolume& target = entries[to];
        target.count += node.mapped().count;
        target.weight += node.mapped().weight;
        oadj[o].erase(m);
        oadj[o].insert(pid);
        adj[pid].insert(o);
        touched.push_back(to);
      }
      adj[m].clear();
      ax.live[m] = 0;
      ax.bump_live_under(m, -1);
    }
    for (std::uint64_t k : touched)
      min_heap.push({vol(entries.at(k)), k});

    ax.live[pid] = 1;
    ax.marginal[pid] = promoted_marginal;
    ax.bump_live_under(pid, +1);
    ax.live_count -= members.size();
    ax.live_count += 1;

    // Group index: the merged group disappears; the parent joins its own
    // sibling group; eligibility may flip anywhere on the ancestor chain
    // because live_under changed there.
    ax.drop_group(pid);
    if (ax.parent[pid] != kNoParent) {
      ax.add_member(ax.parent[pid], pid, vol(promoted_marginal));
      ax.refresh_eligibility(ax.parent[pid]);
    }
    for (int anc = ax.parent[pid]; anc != kNoParent; anc = ax.parent[anc])
      ax.refresh_eligibility(anc);
  }
};

Generalizer::Generalizer(const SparseOD& od, CountTreePtr tree_origin,
                         CountTreePtr tree_destination, double k,
                         Deadline deadline)
    : impl_(std::make_unique<Impl>()), k_(k) {
  if (od.empty()) fail(ErrorCode::kEmptyMatrix, "empty OD matrix");
  if (!tree_origin || !tree_destination)
    fail(ErrorCode::kInvalidArgument, "null tree");
  impl_->mode = od.mode();
  impl_->deadline = deadline;
  impl_->axes[0].tree = tree_origin;
  impl_->axes[1].tree = tree_destination;

  for (int side = 0; side < 2; ++side) {
    const CountTree& tree = *impl_->axes[side].tree;
    OdVolume root = tree.root_volume();
    if (root.count != od.total_count() ||
        std::abs(root.weight - od.total_weight()) >
            1e-9 * std::max(1.0, std::abs(od.total_weight())))
      fail(ErrorCode::kInconsistentInputs,
           "tree totals disagree with the matrix");
  }

  const Hierarchy& h_o = *tree_origin->hierarchy();
  const Hierarchy& h_d = *tree_destination->hierarchy();
  auto& ax_o = impl_->axes[0];
  auto& ax_d = impl_->axes[1];

  for (const auto& [key, volume] : od.entries()) {
    int o = ax_o.intern(h_o, key.first);
    int d = ax_d.intern(h_d, key.second);
    impl_->grow_adjacency();
    impl_->entries[Impl::key(o, d)] = volume;
    impl_->adj_origin[o].insert(d);
    impl_->adj_destination[d].insert(o);
    for (auto [ax, id] : {std::pair{&ax_o, o}, std::pair{&ax_d, d}}) {
      ax->marginal[id].count += volume.count;
      ax->marginal[id].weight += volume.weight;
      if (!ax->live[id]) {
        ax->live[id] = 1;
        ax->live_count += 1;
        ax->bump_live_under(id, +1);
      }
    }
    impl_->min_heap.push({impl_->vol(volume), Impl::key(o, d)});
  }

  for (auto* ax : {&ax_o, &ax_d}) {
    for (int id = 0; id < static_cast<int>(ax->token.size()); ++id) {
      if (!ax->live[id] || ax->parent[id] == kNoParent) continue;
      ax->add_member(ax->parent[id], id, impl_->vol(ax->marginal[id]));
    }
    for (auto& [pid, group] : ax->groups) ax->refresh_eligibility(pid);
  }

  impl_->initial_ratio = static_cast<double>(ax_o.live_count) /
                         static_cast<double>(ax_d.live_count);
}

Generalizer::~Generalizer() = default;

double Generalizer::min_volume() const { return impl_->current_min(); }

std::size_t Generalizer::live_count(Axis axis) const {
  return impl_->axis(axis).live_count;
}

Axis Generalizer::select_axis() const {
  double ratio = static_cast<double>(impl_->axes[0].live_count) /
                 static_cast<double>(impl_->axes[1].live_count);
  if (ratio > impl_->initial_ratio * 1.03) return Axis::kOrigin;
  if (ratio < impl_->initial_ratio * 0.97) return Axis::kDestination;
  return other(impl_->last_axis);
}

std::optional<MergeCandidate> Generalizer::best_group(Axis axis) const {
  const auto& ax = impl_->axis(axis);
  if (ax.eligible.empty()) return std::nullopt;
  auto [cost, pid] = *ax.eligible.begin();
  const auto& group = ax.groups.at(pid);
  MergeCandidate c;
  c.axis = axis;
  c.parent = CellId(ax.token[pid]);
  c.members.reserve(group.members.size());
  for (int m : group.members) c.members.emplace_back(ax.token[m]);
  c.cost = group.cost;
  return c;
}

void Generalizer::apply_merge(const MergeCandidate& candidate) {
  auto& ax = impl_->axis(candidate.axis);
  auto it = ax.id_of.find(candidate.parent.token());
  if (it == ax.id_of.end())
    fail(ErrorCode::kInvalidArgument,
         "unknown merge parent: " + candidate.parent.token());
  int pid = it->second;
  auto git = ax.groups.find(pid);
  if (git == ax.groups.end())
    fail(ErrorCode::kInvalidArgument,
         "no live sibling group under " + candidate.parent.token());
  if (ax.live_under[pid] != static_cast<int>(git->second.members.size()))
    fail(ErrorCode::kInvalidArgument,
         "inconsistent merge group under " + candidate.parent.token());
  std::vector<int> members = git->second.members;
  impl_->merge(candidate.axis, pid, members);
  impl_->last_axis = candidate.axis;
  ++steps_;
}

GeneralizationResult Generalizer::run() {
  while (true) {
    impl_->deadline.check();
    if (min_volume() >= k_) break;
    Axis axis = select_axis();
    auto candidate = best_group(axis);
    if (!candidate) candidate = best_group(other(axis));
    if (!candidate) break;
    apply_merge(*candidate);
  }

  const bool reached = min_volume() >= k_;
  SparseOD matrix(impl_->mode);
  for (const auto& [key, volume] : impl_->entries) {
    int o = static_cast<int>(key >> 32);
    int d = static_cast<int>(key & 0xffffffffu);
    matrix.add(CellId(impl_->axes[0].token[o]),
               CellId(impl_->axes[1].token[d]), volume.count, volume.weight);
  }
  std::vector<CellId> zones[2];
  for (int side = 0; side < 2; ++side) {
    const auto& ax = impl_->axes[side];
    for (int id = 0; id < static_cast<int>(ax.token.size()); ++id)
      if (ax.live[id]) zones[side].emplace_back(ax.token[id]);
  }
  GeneralizationResult result{
      std::move(matrix),
      ZonePartition(impl_->axes[0].tree, std::move(zones[0])),
      ZonePartition(impl_->axes[1].tree, std::move(zones[1])),
      steps_,
      reached ? Termination::kReachedK : Termination::kExhausted,
      min_volume(),
      k_};
  return result;
}

GeneralizationResult anonymize(const SparseOD& od, CountTreePtr tree_origin,
                               CountTreePtr tree_destination, double k,
                               Deadline deadline) {
  Generalizer g(od, std::move(tree_origin), std::move(tree_destination), k,
                deadline);
  return g.run();
}

}  // namespace odk
