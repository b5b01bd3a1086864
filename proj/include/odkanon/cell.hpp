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

#ifndef ODKANON_CELL_HPP_
#define ODKANON_CELL_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace odk {

// Identifier of one cell of a hexagonal hierarchy, stored in canonical text
// form. Synthetic cells read `<root>/<d1>/<d2>/...` with each digit in 0..6
// (aperture 7, one segment per level); external cells are opaque tokens whose
// ancestry lives in the hierarchy's parent map.
//
// Canonical ordering is plain token comparison: synthetic path segments are
// single base-7 digits, so lexicographic order on the text is already the
// zero-padded path order. All tie-breaking downstream relies on this.
class CellId {
 public:
  CellId() = default;
  explicit CellId(std::string token) : token_(std::move(token)) {}

  // Builds a synthetic cell from a root token and a digit path.
  static CellId synthetic(std::string_view root,
                          const std::vector<std::uint8_t>& path);

  const std::string& token() const { return token_; }
  bool empty() const { return token_.empty(); }

  // Synthetic accessors; callers must know the cell is synthetic-form.
  std::string_view root_token() const;
  std::vector<std::uint8_t> path() const;  // validates digits, throws on junk
  int path_length() const;                 // number of '/' separators
  CellId child(std::uint8_t digit) const;
  CellId truncated(int levels_up) const;   // drops trailing path digits

  bool operator==(const CellId& other) const { return token_ == other.token_; }
  bool operator!=(const CellId& other) const { return token_ != other.token_; }
  bool operator<(const CellId& other) const { return token_ < other.token_; }

 private:
  std::string token_;
};

struct CellIdHash {
  std::size_t operator()(const CellId& c) const {
    return std::hash<std::string>{}(c.token());
  }
};

}  // namespace odk

#endif  // ODKANON_CELL_HPP_
