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

#ifndef ODKANON_SUPPRESS_HPP_
#define ODKANON_SUPPRESS_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "odkanon/hierarchy.hpp"
#include "odkanon/od_matrix.hpp"

namespace odk {

struct SuppressionConfig {
  double k = 10.0;             // effective anonymity threshold
  int max_levels = 5;          // generalization levels explored (L)
  double budget_fraction = 0.1;  // max share of OD pairs removable (beta)
};

struct SuppressedPair {
  CellId origin;
  CellId destination;
  std::int64_t count = 0;
  double weight = 0.0;
  double volume = 0.0;  // count or weight, per the matrix mode
};

struct SuppressionReport {
  std::vector<SuppressedPair> suppressed_pairs;
  double suppressed_volume = 0.0;  // mode volume
  std::int64_t suppressed_count = 0;
  double suppressed_weight = 0.0;
  std::size_t suppressed_row_count = 0;
  std::size_t budget_rows = 0;  // floor(n * beta)

  bool contains(const CellId& origin, const CellId& destination) const;
};

// Removes OD pairs that cannot reach volume >= k at any generalization
// level 0..L, spending at most floor(n * beta) rows. When more pairs are
// problematic than the budget allows, the lowest-volume ones go first (ties
// by canonical pair order); the rest stay for the generalizer to absorb.
std::pair<SparseOD, SuppressionReport> prefilter(const SparseOD& od,
                                                 const Hierarchy& hierarchy,
                                                 const SuppressionConfig& cfg);

}  // namespace odk

#endif  // ODKANON_SUPPRESS_HPP_
