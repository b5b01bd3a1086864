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

#include <functional>

#include "doctest.h"
#include "odkanon/count_tree.hpp"
#include "odkanon/error.hpp"
#include "odkanon/synth.hpp"
#include "test_util.hpp"

using namespace odk;

TEST_CASE("root detection finds the deepest common ancestor") {
  auto h = Hierarchy::make_synthetic(2);
  // endpoint cells R/0/0 (3 trips) and R/0/1 (2 trips), both under R/0
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/0", "R/1/0", 3},
                                                   {"R/0/1", "R/1/0", 2}});
  auto tree = CountTree::build(od, h, Endpoint::kOrigin);
  CHECK(tree->root() == CellId("R/0"));
  CHECK(tree->root_resolution() == 1);
  CHECK(tree->target_resolution() == 2);
  CHECK(tree->root_volume().count == 5);
  CHECK(tree->volume_of(CellId("R/0/0")).count == 3);
  CHECK(tree->volume_of(CellId("R/0/1")).count == 2);
  // covered but data-free sibling
  CHECK(tree->volume_of(CellId("R/0/5")).count == 0);
  CHECK(tree->covered_leaf_count() == 7);
}

TEST_CASE("single endpoint cell degenerates to a one-node tree") {
  auto h = Hierarchy::make_synthetic(3);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/1/2/3", "R/0/0/0", 4}});
  auto tree = CountTree::build(od, h, Endpoint::kOrigin);
  CHECK(tree->root() == CellId("R/1/2/3"));
  CHECK(tree->root_resolution() == 3);
  CHECK(tree->node_count() == 1);
  CHECK(tree->root_volume().count == 4);
  CHECK(tree->covered_leaf_count() == 1);
}

TEST_CASE("cells under two top-level roots cannot share a tree") {
  auto h = Hierarchy::make_external(
      {{"a1", "A"}, {"b1", "B"}});  // two disjoint roots A and B
  SparseOD od = test::make_od(Mode::kParticipant, {{"a1", "a1", 1},
                                                   {"b1", "a1", 1}});
  CHECK_THROWS_AS((void)CountTree::build(od, h, Endpoint::kOrigin), Error);
  try {
    (void)CountTree::build(od, h, Endpoint::kOrigin);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDisjointRoots);
  }
  // destinations all under A: fine
  auto tree = CountTree::build(od, h, Endpoint::kDestination);
  CHECK(tree->root() == CellId("a1"));
}

TEST_CASE("destination endpoint aggregates the other column") {
  auto h = Hierarchy::make_synthetic(2);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/0", "R/1/0", 3},
                                                   {"R/0/1", "R/1/1", 2}});
  auto tree = CountTree::build(od, h, Endpoint::kDestination);
  CHECK(tree->root() == CellId("R/1"));
  CHECK(tree->volume_of(CellId("R/1/0")).count == 3);
}

TEST_CASE("parent sums hold at every internal node") {
  SynthConfig cfg;
  cfg.n_trips = 1500;
  cfg.target_resolution = 4;
  cfg.n_hotspots = 5;
  cfg.weight_distribution = {0.0, 1.2};
  cfg.seed = 17;
  auto ds = gen_synthetic(cfg);
  SparseOD od = build_od(*ds, Mode::kPopulation);
  for (Endpoint endpoint : {Endpoint::kOrigin, Endpoint::kDestination}) {
    auto tree = CountTree::build(od, ds->hierarchy(), endpoint);
    // root totals match the matrix exactly / within fp tolerance
    CHECK(tree->root_volume().count == od.total_count());
    CHECK(tree->root_volume().weight ==
          doctest::Approx(od.total_weight()).epsilon(1e-9));
    // every materialized internal node equals the sum of its children
    std::function<void(const CellId&)> walk = [&](const CellId& cell) {
      const auto& children = tree->children_of(cell);
      if (children.empty()) return;
      std::int64_t count = 0;
      double weight = 0.0;
      for (const CellId& c : children) {
        count += tree->volume_of(c).count;
        weight += tree->volume_of(c).weight;
        walk(c);
      }
      CHECK(tree->volume_of(cell).count == count);
      CHECK(tree->volume_of(cell).weight ==
            doctest::Approx(tree->volume_of(cell).weight).epsilon(1e-9));
      CHECK(weight == doctest::Approx(tree->volume_of(cell).weight)
                          .epsilon(1e-9));
    };
    walk(tree->root());
    // structural determinism
    auto tree2 = CountTree::build(od, ds->hierarchy(), endpoint);
    CHECK(tree2->node_count() == tree->node_count());
    CHECK(tree2->root() == tree->root());
    CHECK(tree2->data_leaves() == tree->data_leaves());
    // synthetic coverage is the closed-form leaf count
    CHECK(tree->covered_leaf_count() ==
          ds->hierarchy()->leaf_count_under(tree->root(), 4));
  }
}

TEST_CASE("empty matrix is rejected") {
  auto h = Hierarchy::make_synthetic(1);
  SparseOD od(Mode::kParticipant);
  CHECK_THROWS_AS((void)CountTree::build(od, h, Endpoint::kOrigin), Error);
}

TEST_CASE("materialized children stay in canonical order") {
  auto h = Hierarchy::make_synthetic(2);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/5", "R/1/0", 1},
                                                   {"R/0/1", "R/1/0", 1},
                                                   {"R/0/3", "R/1/0", 1}});
  auto tree = CountTree::build(od, h, Endpoint::kOrigin);
  const auto& children = tree->children_of(CellId("R/0"));
  REQUIRE(children.size() == 3);
  CHECK(children[0] == CellId("R/0/1"));
  CHECK(children[1] == CellId("R/0/3"));
  CHECK(children[2] == CellId("R/0/5"));
}
