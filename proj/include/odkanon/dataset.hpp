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

#ifndef ODKANON_DATASET_HPP_
#define ODKANON_DATASET_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "odkanon/cell.hpp"
#include "odkanon/hierarchy.hpp"

namespace odk {

// Whose anonymity a run protects (and, for metrics, whose volumes a
// computation counts): survey participants (each record counts 1) or the
// represented population (each record counts its weight).
enum class Mode { kParticipant, kPopulation };

const char* mode_name(Mode mode);
Mode parse_mode(const std::string& name);

// One trip. Weight is the number of people the record stands for; it is a
// per-participant constant in real survey data.
struct TripRecord {
  std::string person_id;
  CellId origin;
  CellId destination;
  double weight = 1.0;
  std::map<std::string, std::string> attributes;  // sex/age/profession etc.
};

class TripDataset {
 public:
  TripDataset(std::vector<TripRecord> records, HierarchyPtr hierarchy,
              bool has_weight_column);

  const std::vector<TripRecord>& records() const { return records_; }
  const HierarchyPtr& hierarchy() const { return hierarchy_; }
  int target_resolution() const { return target_resolution_; }
  bool has_weight_column() const { return has_weight_column_; }
  std::size_t size() const { return records_.size(); }
  double total_weight() const;

 private:
  std::vector<TripRecord> records_;
  HierarchyPtr hierarchy_;
  int target_resolution_ = 0;
  bool has_weight_column_ = false;
};

using DatasetPtr = std::shared_ptr<const TripDataset>;

// Reads the trip CSV (header `person_id,start_cell,end_cell,weight,sex,age,
// profession`; weight and attribute columns optional). Row order preserved;
// unknown cells, non-leaf endpoints, and non-positive weights are rejected.
DatasetPtr load_trips(const std::string& path, HierarchyPtr hierarchy);
DatasetPtr parse_trips(const std::string& csv_text, const std::string& origin,
                       HierarchyPtr hierarchy);

void save_trips(const TripDataset& ds, const std::string& path);
std::string trips_to_csv(const TripDataset& ds);

// Partitions records by the value of `attribute`; every record must carry
// it. Category order is lexicographic; within-segment row order preserved.
std::map<std::string, DatasetPtr> segment(const DatasetPtr& ds,
                                          const std::string& attribute);

// Anonymity threshold actually enforced for a protection target. Population
// mode scales base_k by the mean weight over distinct participants, so one
// released flow must aggregate at least base_k average participants' worth
// of people. The result may be fractional and is used unrounded.
double effective_k(double base_k, const TripDataset& ds, Mode mode);

}  // namespace odk

#endif  // ODKANON_DATASET_HPP_
