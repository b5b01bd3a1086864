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

#include "odkanon/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"
#include "odkanon/error.hpp"
#include "odkanon/od_matrix.hpp"

namespace odk {

namespace {
const char* const kAttributeColumns[] = {"sex", "age", "profession"};
}

const char* mode_name(Mode mode) {
  return mode == Mode::kParticipant ? "participant" : "population";
}

Mode parse_mode(const std::string& name) {
  if (name == "participant") return Mode::kParticipant;
  if (name == "population") return Mode::kPopulation;
  fail(ErrorCode::kInvalidArgument,
       "mode must be 'participant' or 'population', got '" + name + "'");
}

TripDataset::TripDataset(std::vector<TripRecord> records,
                         HierarchyPtr hierarchy, bool has_weight_column)
    : records_(std::move(records)),
      hierarchy_(std::move(hierarchy)),
      has_weight_column_(has_weight_column) {
  if (!hierarchy_) fail(ErrorCode::kInvalidArgument, "null hierarchy");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const TripRecord& r = records_[i];
    if (r.weight <= 0.0)
      fail(ErrorCode::kNonPositiveWeight,
           "record " + std::to_string(i) + ": weight must be > 0");
    for (const CellId* cell : {&r.origin, &r.destination}) {
      if (!hierarchy_->contains(*cell))
        fail(ErrorCode::kUnknownCell,
             "record " + std::to_string(i) + ": unknown cell " + cell->token());
      if (!hierarchy_->is_leaf(*cell))
        fail(ErrorCode::kInvalidArgument,
             "record " + std::to_string(i) + ": endpoint " + cell->token() +
                 " is not a leaf cell");
      target_resolution_ =
          std::max(target_resolution_, hierarchy_->resolution(*cell));
    }
  }
}

double TripDataset::total_weight() const {
  double sum = 0.0;
  for (const TripRecord& r : records_) sum += r.weight;
  return sum;
}

DatasetPtr parse_trips(const std::string& csv_text, const std::string& origin,
                       HierarchyPtr hierarchy) {
  csv::Table table = csv::read_string(csv_text, origin);
  int person_col = table.column("person_id");
  int start_col = table.column("start_cell");
  int end_col = table.column("end_cell");
  if (person_col < 0 || start_col < 0 || end_col < 0)
    fail(ErrorCode::kParse,
         origin + ": header must contain person_id, start_cell, end_cell");
  int weight_col = table.column("weight");

  std::vector<std::pair<std::string, int>> attr_cols;
  for (const char* name : kAttributeColumns) {
    int col = table.column(name);
    if (col >= 0) attr_cols.emplace_back(name, col);
  }

  std::vector<TripRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t lineno = i + 2;  // header is line 1
    TripRecord r;
    r.person_id = row[person_col];
    r.origin = CellId(row[start_col]);
    r.destination = CellId(row[end_col]);
    if (weight_col >= 0) {
      r.weight = csv::parse_double(row[weight_col], lineno, weight_col, "weight");
      if (r.weight <= 0.0)
        fail(ErrorCode::kNonPositiveWeight,
             origin + ":" + std::to_string(lineno) + ": weight must be > 0");
    }
    for (const auto& [name, col] : attr_cols)
      if (!row[col].empty()) r.attributes[name] = row[col];
    records.push_back(std::move(r));
  }
  return std::make_shared<const TripDataset>(std::move(records),
                                             std::move(hierarchy),
                                             weight_col >= 0);
}

DatasetPtr load_trips(const std::string& path, HierarchyPtr hierarchy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trips(buf.str(), path, std::move(hierarchy));
}

std::string trips_to_csv(const TripDataset& ds) {
  std::string out = "person_id,start_cell,end_cell,weight,sex,age,profession\n";
  for (const TripRecord& r : ds.records()) {
    out += r.person_id;
    out += ',';
    out += r.origin.token();
    out += ',';
    out += r.destination.token();
    out += ',';
    out += csv::format_double(r.weight);
    for (const char* name : kAttributeColumns) {
      out += ',';
      auto it = r.attributes.find(name);
      if (it != r.attributes.end()) out += it->second;
    }
    out += '\n';
  }
  return out;
}

void save_trips(const TripDataset& ds, const std::string& path) {
  csv::write_file(path, trips_to_csv(ds));
}

std::map<std::string, DatasetPtr> segment(const DatasetPtr& ds,
                                          const std::string& attribute) {
  std::map<std::string, std::vector<TripRecord>> buckets;
  for (std::size_t i = 0; i < ds->records().size(); ++i) {
    const TripRecord& r = ds->records()[i];
    auto it = r.attributes.find(attribute);
    if (it == r.attributes.end())
      fail(ErrorCode::kMissingAttribute,
           "record " + std::to_string(i) + " lacks attribute '" + attribute +
               "'");
    buckets[it->second].push_back(r);
  }
  std::map<std::string, DatasetPtr> out;
  for (auto& [category, records] : buckets)
    out.emplace(category,
                std::make_shared<const TripDataset>(
                    std::move(records), ds->hierarchy(), ds->has_weight_column()));
  return out;
}

double effective_k(double base_k, const TripDataset& ds, Mode mode) {
  if (base_k < 2.0)
    fail(ErrorCode::kInvalidArgument, "base k must be >= 2");
  if (ds.records().empty())
    fail(ErrorCode::kEmptyDataset, "effective k needs a nonempty dataset");
  if (mode == Mode::kParticipant) return base_k;
  // Mean of per-participant weights (WEIGHT_INDIV is constant across one
  // participant's trips; the first occurrence is taken).
  std::unordered_map<std::string, double> participant_weight;
  for (const TripRecord& r : ds.records())
    participant_weight.try_emplace(r.person_id, r.weight);
  double sum = 0.0;
  for (const auto& [person, weight] : participant_weight) sum += weight;
  return base_k * (sum / static_cast<double>(participant_weight.size()));
}

void SparseOD::add(const CellId& origin, const CellId& destination,
                   std::int64_t count, double weight) {
  if (count <= 0)
    fail(ErrorCode::kInvalidArgument, "entry count must be positive");
  OdVolume& v = entries_[{origin, destination}];
  v.count += count;
  v.weight += weight;
  total_count_ += count;
  total_weight_ += weight;
}

SparseOD build_od(const TripDataset& ds, Mode mode) {
  if (mode == Mode::kPopulation && !ds.has_weight_column())
    fail(ErrorCode::kInvalidArgument,
         "population mode requires a weight column in the source dataset");
  SparseOD od(mode);
  for (const TripRecord& r : ds.records())
    od.add(r.origin, r.destination, 1, r.weight);
  return od;
}

}  // namespace odk
