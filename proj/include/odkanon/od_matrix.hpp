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

#ifndef ODKANON_OD_MATRIX_HPP_
#define ODKANON_OD_MATRIX_HPP_

#include <cstdint>
#include <map>
#include <utility>

#include "odkanon/cell.hpp"
#include "odkanon/dataset.hpp"

namespace odk {

struct OdVolume {
  std::int64_t count = 0;
  double weight = 0.0;

  double in(Mode mode) const {
    return mode == Mode::kParticipant ? static_cast<double>(count) : weight;
  }
};

using OdKey = std::pair<CellId, CellId>;  // (origin, destination)

// Sparse OD matrix: distinct (origin, destination) pairs with trip counts
// and weight sums, canonically ordered. No zero-count entries are stored.
// The mode decides which of the two volumes downstream algorithms compare
// against k.
class SparseOD {
 public:
  explicit SparseOD(Mode mode) : mode_(mode) {}

  Mode mode() const { return mode_; }
  const std::map<OdKey, OdVolume>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void add(const CellId& origin, const CellId& destination,
           std::int64_t count, double weight);

  std::int64_t total_count() const { return total_count_; }
  double total_weight() const { return total_weight_; }
  double total_volume() const {
    return mode_ == Mode::kParticipant ? static_cast<double>(total_count_)
                                       : total_weight_;
  }
  double volume(const OdVolume& v) const { return v.in(mode_); }

 private:
  Mode mode_;
  std::map<OdKey, OdVolume> entries_;
  std::int64_t total_count_ = 0;
  double total_weight_ = 0.0;
};

// Aggregates the dataset's trips into a sparse OD matrix. The entries carry
// both counts and weight sums regardless of mode; the mode only selects the
// volume downstream consumers read.
SparseOD build_od(const TripDataset& ds, Mode mode);

}  // namespace odk

#endif  // ODKANON_OD_MATRIX_HPP_
