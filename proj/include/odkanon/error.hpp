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

#ifndef ODKANON_ERROR_HPP_
#define ODKANON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace odk {

// Error taxonomy shared by the C++ core and the C API. Each enumerator maps
// 1:1 onto an ODK_E_* code in include/odkanon.h.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParse,
  kUnknownCell,
  kAboveRoot,
  kLeafCell,
  kMissingCentroid,
  kNonPositiveWeight,
  kMissingAttribute,
  kEmptyDataset,
  kEmptyMatrix,
  kDisjointRoots,
  kInconsistentInputs,
  kInsufficientVolume,
  kNoValidClasses,
  kNotApplicable,
  kInvalidConfig,
  kTimeout,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

const char* error_code_name(ErrorCode code);

}  // namespace odk

#endif  // ODKANON_ERROR_HPP_
