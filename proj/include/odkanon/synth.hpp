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

#ifndef ODKANON_SYNTH_HPP_
#define ODKANON_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "odkanon/dataset.hpp"

namespace odk {

struct LogNormalSpec {
  double mu = 0.0;
  double sigma = 0.0;  // 0 means every participant has weight exp(mu)
};

// Seeded generator of skewed, sparse mobility data: a few hotspot leaves
// attract most endpoints, participants carry log-normal weights and
// Poisson trip counts. Same config and seed reproduce the dataset
// byte-for-byte; sampling uses hand-rolled transforms so the output does
// not depend on the standard library's distribution internals.
struct SynthConfig {
  std::int64_t n_trips = 1000;
  int target_resolution = 5;
  int n_hotspots = 10;
  double hotspot_concentration = 0.8;  // share of endpoints from hotspots
  LogNormalSpec weight_distribution{0.0, 0.0};
  double trips_per_participant = 4.0;  // Poisson mean, min 1 trip
  std::map<std::string, std::vector<std::string>> segment_schema;
  std::uint64_t seed = 1;
};

DatasetPtr gen_synthetic(const SynthConfig& cfg);
DatasetPtr gen_synthetic(const SynthConfig& cfg, HierarchyPtr hierarchy);

}  // namespace odk

#endif  // ODKANON_SYNTH_HPP_
