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

#include "odkanon/cell.hpp"

#include "odkanon/error.hpp"

namespace odk {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kUnknownCell: return "UnknownCell";
    case ErrorCode::kAboveRoot: return "AboveRoot";
    case ErrorCode::kLeafCell: return "LeafCell";
    case ErrorCode::kMissingCentroid: return "MissingCentroid";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kMissingAttribute: return "MissingAttribute";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kDisjointRoots: return "DisjointRoots";
    case ErrorCode::kInconsistentInputs: return "InconsistentInputs";
    case ErrorCode::kInsufficientVolume: return "InsufficientVolume";
    case ErrorCode::kNoValidClasses: return "NoValidClasses";
    case ErrorCode::kNotApplicable: return "NotApplicable";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

CellId CellId::synthetic(std::string_view root,
                         const std::vector<std::uint8_t>& path) {
  std::string token(root);
  for (std::uint8_t d : path) {
    if (d > 6) fail(ErrorCode::kInvalidArgument, "path digit out of 0..6");
    token.push_back('/');
    token.push_back(static_cast<char>('0' + d));
  }
  return CellId(std::move(token));
}

std::string_view CellId::root_token() const {
  auto slash = token_.find('/');
  if (slash == std::string::npos) return token_;
  return std::string_view(token_).substr(0, slash);
}

std::vector<std::uint8_t> CellId::path() const {
  std::vector<std::uint8_t> digits;
  auto pos = token_.find('/');
  while (pos != std::string::npos) {
    if (pos + 1 >= token_.size())
      fail(ErrorCode::kParse, "trailing '/' in cell token: " + token_);
    char c = token_[pos + 1];
    if (c < '0' || c > '6')
      fail(ErrorCode::kParse, "cell token digit out of 0..6: " + token_);
    if (pos + 2 < token_.size() && token_[pos + 2] != '/')
      fail(ErrorCode::kParse, "multi-character path segment: " + token_);
    digits.push_back(static_cast<std::uint8_t>(c - '0'));
    pos = token_.find('/', pos + 1);
  }
  return digits;
}

int CellId::path_length() const {
  int n = 0;
  for (char c : token_)
    if (c == '/') ++n;
  return n;
}

CellId CellId::child(std::uint8_t digit) const {
  if (digit > 6) fail(ErrorCode::kInvalidArgument, "child digit out of 0..6");
  std::string t = token_;
  t.push_back('/');
  t.push_back(static_cast<char>('0' + digit));
  return CellId(std::move(t));
}

CellId CellId::truncated(int levels_up) const {
  std::string t = token_;
  for (int i = 0; i < levels_up; ++i) {
    auto slash = t.rfind('/');
    if (slash == std::string::npos)
      fail(ErrorCode::kAboveRoot,
           "cannot truncate above root: " + token_);
    t.resize(slash);
  }
  return CellId(std::move(t));
}

}  // namespace odk
