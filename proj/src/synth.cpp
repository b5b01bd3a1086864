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

#include "odkanon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "odkanon/error.hpp"

namespace odk {

namespace {

// Thin sampling layer over mt19937_64. Only the raw engine output is
// standardized, so all transforms are written out here.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t below(std::uint64_t n) {  // uniform in [0, n)
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  }

  double normal() {  // Box-Muller
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double log_normal(const LogNormalSpec& spec) {
    return std::exp(spec.mu + spec.sigma * normal());
  }

  std::int64_t poisson(double mean) {  // Knuth; means here are small
    double limit = std::exp(-mean);
    double product = uniform();
    std::int64_t n = 0;
    while (product > limit) {
      product *= uniform();
      ++n;
    }
    return n;
  }

 private:
  std::mt19937_64 engine_;
};

void validate(const SynthConfig& cfg) {
  if (cfg.n_trips <= 0)
    fail(ErrorCode::kInvalidConfig, "n_trips must be positive");
  if (cfg.target_resolution < 0 || cfg.target_resolution > 12)
    fail(ErrorCode::kInvalidConfig, "target_resolution must be in 0..12");
  if (cfg.n_hotspots < 1)
    fail(ErrorCode::kInvalidConfig, "n_hotspots must be >= 1");
  if (cfg.hotspot_concentration <= 0.0 || cfg.hotspot_concentration > 1.0)
    fail(ErrorCode::kInvalidConfig, "hotspot_concentration must be in (0, 1]");
  if (cfg.weight_distribution.sigma < 0.0)
    fail(ErrorCode::kInvalidConfig, "weight sigma must be >= 0");
  if (cfg.trips_per_participant < 1.0)
    fail(ErrorCode::kInvalidConfig, "trips_per_participant must be >= 1");
  for (const auto& [attribute, categories] : cfg.segment_schema)
    if (categories.empty())
      fail(ErrorCode::kInvalidConfig,
           "segment attribute '" + attribute + "' has no categories");
}

CellId random_leaf(Sampler& rng, const Hierarchy& h) {
  CellId cell = h.roots().front();
  for (int r = 0; r < h.max_resolution(); ++r)
    cell = cell.child(static_cast<std::uint8_t>(rng.below(7)));
  return cell;
}

}  // namespace

DatasetPtr gen_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  return gen_synthetic(cfg, Hierarchy::make_synthetic(cfg.target_resolution));
}

DatasetPtr gen_synthetic(const SynthConfig& cfg, HierarchyPtr hierarchy) {
  validate(cfg);
  if (!hierarchy || hierarchy->kind() != Hierarchy::Kind::kSynthetic)
    fail(ErrorCode::kInvalidConfig, "generator needs a synthetic hierarchy");
  if (hierarchy->max_resolution() != cfg.target_resolution)
    fail(ErrorCode::kInvalidConfig,
         "hierarchy resolution does not match the config");

  Sampler rng(cfg.seed);

  std::vector<CellId> hotspots;
  hotspots.reserve(cfg.n_hotspots);
  for (int i = 0; i < cfg.n_hotspots; ++i)
    hotspots.push_back(random_leaf(rng, *hierarchy));

  auto draw_endpoint = [&]() -> CellId {
    if (rng.uniform() < cfg.hotspot_concentration)
      return hotspots[rng.below(hotspots.size())];
    return random_leaf(rng, *hierarchy);
  };

  std::vector<TripRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.n_trips));
  std::int64_t person = 0;
  while (static_cast<std::int64_t>(records.size()) < cfg.n_trips) {
    ++person;
    const std::string person_id = "p" + std::to_string(person);
    const double weight = rng.log_normal(cfg.weight_distribution);
    std::map<std::string, std::string> attributes;
    for (const auto& [attribute, categories] : cfg.segment_schema)
      attributes[attribute] = categories[rng.below(categories.size())];
    std::int64_t trips = 1 + rng.poisson(cfg.trips_per_participant - 1.0);
    for (std::int64_t t = 0; t < trips; ++t) {
      if (static_cast<std::int64_t>(records.size()) == cfg.n_trips) break;
      TripRecord r;
      r.person_id = person_id;
      r.origin = draw_endpoint();
      r.destination = draw_endpoint();
      r.weight = weight;
      r.attributes = attributes;
      records.push_back(std::move(r));
    }
  }
  return std::make_shared<const TripDataset>(std::move(records),
                                             std::move(hierarchy), true);
}

}  // namespace odk
