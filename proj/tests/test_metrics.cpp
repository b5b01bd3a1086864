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

#include "doctest.h"
#include "odkanon/error.hpp"
#include "odkanon/pipeline.hpp"
#include "odkanon/synth.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace odk;

namespace {

EquivalenceClass make_class(double volume, std::uint64_t leaves_o = 1,
                            std::uint64_t leaves_d = 1) {
  EquivalenceClass c;
  c.volume = volume;
  c.origin_leaves = leaves_o;
  c.destination_leaves = leaves_d;
  c.member_volumes = {volume};
  return c;
}

}  // namespace

TEST_CASE("discernibility charges squares above k and |D| below") {
  EquivalenceClasses eq;
  eq.k = 3.0;
  eq.classes = {make_class(5.0), make_class(3.0)};
  eq.suppressed_volume = 2.0;
  eq.total_volume = 10.0;
  CHECK(c_dm(eq) == 25.0 + 9.0 + 10.0 * 2.0);

  EquivalenceClasses minimal;
  minimal.k = 2.0;
  minimal.classes = {make_class(2.0), make_class(2.0), make_class(2.0)};
  minimal.total_volume = 6.0;
  CHECK(c_dm(minimal) == 12.0);

  EquivalenceClasses empty;
  CHECK(c_dm(empty) == 0.0);
}

TEST_CASE("average class size is normalized by k") {
  EquivalenceClasses eq;
  eq.k = 2.0;
  eq.classes = {make_class(5.0), make_class(4.0), make_class(3.0)};
  eq.total_volume = 12.0;
  CHECK(c_avg(eq) == doctest::Approx(2.0));

  EquivalenceClasses minimal;
  minimal.k = 7.0;
  minimal.classes = {make_class(7.0), make_class(7.0)};
  minimal.total_volume = 14.0;
  CHECK(c_avg(minimal) == doctest::Approx(1.0));

  EquivalenceClasses none;
  none.k = 10.0;
  none.classes = {make_class(1.0)};
  none.total_volume = 1.0;
  try {
    (void)c_avg(none);
    FAIL("expected NoValidClasses");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoValidClasses);
  }
}

TEST_CASE("mean generalization error weighs leaf footprints") {
  EquivalenceClasses eq;
  eq.k = 2.0;
  eq.classes = {make_class(4.0, 3, 2)};
  eq.total_volume = 4.0;
  CHECK(g_bar(eq) == doctest::Approx(5.0));

  // identity generalization: |o| = |d| = 1 everywhere
  EquivalenceClasses identity;
  identity.k = 2.0;
  identity.classes = {make_class(2.0), make_class(5.0)};
  identity.total_volume = 7.0;
  CHECK(g_bar(identity) == doctest::Approx(2.0));

  EquivalenceClasses regions;
  regions.hierarchy_based = false;
  try {
    (void)g_bar(regions);
    FAIL("expected NotApplicable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotApplicable);
  }
}

TEST_CASE("reconstruction loss spreads classes over their footprint") {
  // one original pair of volume 4, generalized to a 2x2 footprint
  EquivalenceClasses eq;
  eq.k = 2.0;
  EquivalenceClass c = make_class(4.0, 2, 2);
  eq.classes = {c};
  eq.total_volume = 4.0;
  // density 1 per pair: |1-4| at the data pair, 3 empty pairs at 1 each
  CHECK(reconstruction_loss(eq) == doctest::Approx(1.5));

  // identity generalization with no suppression loses nothing
  EquivalenceClasses identity;
  identity.k = 1.0;
  identity.classes = {make_class(4.0), make_class(2.0)};
  identity.total_volume = 6.0;
  CHECK(reconstruction_loss(identity) == doctest::Approx(0.0));

  // full suppression costs exactly 1
  EquivalenceClasses suppressed;
  suppressed.k = 2.0;
  suppressed.suppressed_volume = 9.0;
  suppressed.total_volume = 9.0;
  CHECK(reconstruction_loss(suppressed) == doctest::Approx(1.0));
}

TEST_CASE("classes from partitions respect suppression and totals") {
  auto h = Hierarchy::make_synthetic(2);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/0", "R/1/0", 4},
                                                   {"R/0/1", "R/1/0", 3},
                                                   {"R/2/0", "R/3/0", 1}});
  SuppressionConfig scfg{5.0, 1, 0.5};
  auto [filtered, report] = prefilter(od, *h, scfg);
  REQUIRE(report.suppressed_row_count == 1);
  auto tree_o = CountTree::build(filtered, h, Endpoint::kOrigin);
  auto tree_d = CountTree::build(filtered, h, Endpoint::kDestination);
  GeneralizationResult result = anonymize(filtered, tree_o, tree_d, 5.0);
  REQUIRE(result.terminated == Termination::kReachedK);

  EquivalenceClasses eq =
      classes_from_partitions(od, &report, result.origins,
                              result.destinations, Mode::kParticipant, 5.0);
  CHECK(eq.total_volume == 8.0);
  CHECK(eq.suppressed_volume == 1.0);
  double class_sum = 0.0;
  for (const auto& c : eq.classes) class_sum += c.volume;
  CHECK(class_sum + eq.suppressed_volume ==
        doctest::Approx(eq.total_volume).epsilon(1e-9));
}

TEST_CASE("population audit exposes low-weight hot cells") {
  // Six participants: the two trips in the hot pair carry tiny weights, so
  // a count-protected release leaves the population below its threshold.
  auto h = Hierarchy::make_synthetic(1);
  auto ds = test::make_dataset(h, {{"p1", "R/0", "R/1", 1.0},
                                   {"p2", "R/0", "R/1", 1.0},
                                   {"p3", "R/2", "R/3", 100.0},
                                   {"p4", "R/2", "R/3", 100.0},
                                   {"p5", "R/4", "R/5", 100.0},
                                   {"p6", "R/4", "R/5", 100.0}});
  RunConfig cfg;
  cfg.algorithm = Algorithm::kOdkAnon;
  cfg.base_k = 2.0;
  cfg.protect_mode = Mode::kParticipant;
  cfg.suppression_budget = 0.0;
  RunOutput run = run_anonymization(ds, cfg);
  REQUIRE(run.termination == Termination::kReachedK);

  // self-consistent at its own threshold
  AuditOutcome self = min_k_audit(*ds, &run.suppression, run.origins(),
                                  run.destinations(), Mode::kParticipant, 2.0);
  CHECK(self.cells_below == 0);
  CHECK(self.min_volume >= 2.0);

  // population view: required k = 2 x mean weight = 2 x 67 = 134, but the
  // hot pair aggregates only weight 2
  double pop_k = effective_k(2.0, *ds, Mode::kPopulation);
  CHECK(pop_k == doctest::Approx(134.0));
  AuditOutcome cross = min_k_audit(*ds, &run.suppression, run.origins(),
                                   run.destinations(), Mode::kPopulation,
                                   pop_k);
  CHECK(cross.cells_below >= 1);
  CHECK(cross.min_volume == doctest::Approx(2.0));
}

TEST_CASE("metrics match the brute-force oracle") {
  SynthConfig cfg;
  cfg.target_resolution = 3;
  cfg.n_hotspots = 4;
  cfg.hotspot_concentration = 0.75;
  cfg.weight_distribution = {0.4, 1.1};
  for (std::uint64_t seed : {101ull, 102ull, 103ull, 104ull}) {
    cfg.seed = seed;
    cfg.n_trips = 400 + static_cast<std::int64_t>(seed % 3) * 200;
    auto ds = gen_synthetic(cfg);
    for (Algorithm algorithm : {Algorithm::kOdkAnon, Algorithm::kOigh}) {
      RunConfig rcfg;
      rcfg.algorithm = algorithm;
      rcfg.base_k = 6.0;
      rcfg.protect_mode = Mode::kParticipant;
      RunOutput run = run_anonymization(ds, rcfg);
      for (Mode eval : {Mode::kParticipant, Mode::kPopulation}) {
        double eval_k = effective_k(rcfg.base_k, *ds, eval);
        EquivalenceClasses eq = classes_from_partitions(
            run.original_od, &run.suppression, run.origins(),
            run.destinations(), eval, eval_k);
        test::OracleMetrics expected =
            test::oracle_metrics(*ds, &run.suppression, run.origins(),
                                 run.destinations(), eval, eval_k);
        CHECK(c_dm(eq) == doctest::Approx(expected.c_dm).epsilon(1e-9));
        if (expected.c_avg) {
          CHECK(c_avg(eq) == doctest::Approx(*expected.c_avg).epsilon(1e-9));
          CHECK(g_bar(eq) == doctest::Approx(*expected.g_bar).epsilon(1e-9));
        }
        CHECK(reconstruction_loss(eq) ==
              doctest::Approx(expected.recon_loss).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("end-to-end over an external parent map with variable fan-out") {
  // Three subtrees with fan-outs 7, 6 (pentagon-style) and 2.
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < 7; ++i)
    edges.emplace_back("a" + std::to_string(i), "A");
  for (int i = 0; i < 6; ++i)
    edges.emplace_back("b" + std::to_string(i), "B");
  edges.emplace_back("c0", "C");
  edges.emplace_back("c1", "C");
  for (const char* mid : {"A", "B", "C"}) edges.emplace_back(mid, "RT");
  auto h = Hierarchy::make_external(edges);

  std::vector<test::TripSpec> trips;
  int person = 0;
  auto add = [&](const std::string& o, const std::string& d, int n, double w) {
    for (int i = 0; i < n; ++i)
      trips.push_back({"q" + std::to_string(++person), o, d, w, {}});
  };
  add("a0", "b0", 5, 2.0);  // already at k
  add("a1", "b1", 2, 1.0);  // needs the sibling merge
  add("a2", "b1", 2, 1.0);
  add("c0", "b2", 1, 9.0);  // sparse corner of the small subtree
  add("c1", "b2", 3, 1.0);
  auto ds = test::make_dataset(h, trips);

  RunConfig cfg;
  cfg.base_k = 4.0;
  cfg.suppression_budget = 0.0;
  RunOutput run = run_anonymization(ds, cfg);
  CHECK(run.termination == Termination::kReachedK);
  for (const auto& [key, volume] : run.released_matrix().entries())
    CHECK(run.released_matrix().volume(volume) >= 4.0);
  CHECK(run.released_matrix().total_count() == 13);

  // leaf counts honor the registered fan-out, not a fixed aperture
  EquivalenceClasses eq = classes_from_partitions(
      run.original_od, &run.suppression, run.origins(), run.destinations(),
      Mode::kParticipant, 4.0);
  test::OracleMetrics expected =
      test::oracle_metrics(*ds, &run.suppression, run.origins(),
                           run.destinations(), Mode::kParticipant, 4.0);
  CHECK(c_dm(eq) == doctest::Approx(expected.c_dm).epsilon(1e-9));
  CHECK(reconstruction_loss(eq) ==
        doctest::Approx(expected.recon_loss).epsilon(1e-9));
  if (expected.g_bar)
    CHECK(g_bar(eq) == doctest::Approx(*expected.g_bar).epsilon(1e-9));

  // oigh on the same forest
  RunConfig ocfg;
  ocfg.algorithm = Algorithm::kOigh;
  ocfg.base_k = 4.0;
  RunOutput oigh_run = run_anonymization(ds, ocfg);
  CHECK(oigh_run.oigh_result->matrix.total_count() == 13);
  if (oigh_run.oigh_result->feasible)
    for (const auto& [key, volume] : oigh_run.oigh_result->matrix.entries())
      CHECK(oigh_run.oigh_result->matrix.volume(volume) >= 4.0);
}

TEST_CASE("metric bounds hold on real runs") {
  SynthConfig cfg;
  cfg.n_trips = 500;
  cfg.target_resolution = 3;
  cfg.seed = 77;
  auto ds = gen_synthetic(cfg);
  RunConfig rcfg;
  rcfg.base_k = 5.0;
  RunOutput run = run_anonymization(ds, rcfg);
  MetricsReport report = compute_metrics(run, Mode::kParticipant);
  REQUIRE(report.c_avg.has_value());
  CHECK(*report.c_avg >= 1.0);
  REQUIRE(report.g_bar.has_value());
  CHECK(*report.g_bar >= 2.0);
  REQUIRE(report.recon_loss.has_value());
  CHECK(*report.recon_loss >= 0.0);
  CHECK(*report.recon_loss <= 2.0);
}

TEST_CASE("identity generalization is lossless") {
  auto h = Hierarchy::make_synthetic(2);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/0", "R/1/0", 9},
                                                   {"R/0/1", "R/1/1", 12}});
  auto tree_o = CountTree::build(od, h, Endpoint::kOrigin);
  auto tree_d = CountTree::build(od, h, Endpoint::kDestination);
  GeneralizationResult result = anonymize(od, tree_o, tree_d, 5.0);
  REQUIRE(result.steps == 0);
  EquivalenceClasses eq = classes_from_partitions(
      od, nullptr, result.origins, result.destinations, Mode::kParticipant,
      5.0);
  CHECK(reconstruction_loss(eq) == 0.0);
  CHECK(g_bar(eq) == 2.0);
}

TEST_CASE("g_bar can count only data-bearing leaves") {
  // one released class over a 7-leaf zone on each axis, but only two data
  // origins and one data destination
  auto h = Hierarchy::make_synthetic(2);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/0", "R/1/0", 4},
                                                   {"R/0/1", "R/1/0", 5}});
  auto tree_o = CountTree::build(od, h, Endpoint::kOrigin);
  auto tree_d = CountTree::build(od, h, Endpoint::kDestination);
  GeneralizationResult result = anonymize(od, tree_o, tree_d, 9.0);
  REQUIRE(result.steps >= 1);
  EquivalenceClasses eq = classes_from_partitions(
      od, nullptr, result.origins, result.destinations, Mode::kParticipant,
      9.0);
  REQUIRE(eq.classes.size() == 1);
  CHECK(g_bar(eq) == doctest::Approx(7.0 + 1.0));  // zone R/0 + leaf dest
  CHECK(g_bar(eq, LeafCountPolicy::kDataBearing) ==
        doctest::Approx(2.0 + 1.0));
}

TEST_CASE("tree dump is valid json") {
  auto h = Hierarchy::make_synthetic(2);
  SparseOD od = test::make_od(Mode::kParticipant, {{"R/0/0", "R/1/0", 3}});
  auto tree = CountTree::build(od, h, Endpoint::kOrigin);
  std::string dump = tree->to_debug_json();
  CHECK(dump.find("\"root\"") != std::string::npos);
  CHECK(dump.find("R/0/0") != std::string::npos);
}

TEST_CASE("mondrian classes support c_dm and c_avg only") {
  auto h = Hierarchy::make_synthetic(2);
  auto ds = test::make_dataset(h, {{"p1", "R/0/0", "R/1/0", 1.0},
                                   {"p2", "R/0/1", "R/1/1", 1.0},
                                   {"p3", "R/2/0", "R/3/0", 1.0},
                                   {"p4", "R/2/1", "R/3/1", 1.0}});
  MondrianResult r = mondrian(*ds, *h, 2.0, Mode::kParticipant);
  EquivalenceClasses eq = classes_from_regions(r, Mode::kParticipant, 2.0);
  CHECK(c_dm(eq) > 0.0);
  CHECK(c_avg(eq) >= 1.0);
  CHECK_THROWS_AS((void)g_bar(eq), Error);
  CHECK_THROWS_AS((void)reconstruction_loss(eq), Error);
}
