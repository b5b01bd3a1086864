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

#ifndef ODKANON_DEADLINE_HPP_
#define ODKANON_DEADLINE_HPP_

#include <chrono>
#include <optional>

#include "odkanon/error.hpp"

namespace odk {

// Cooperative wall-clock budget. Long-running loops call check() every
// bounded number of iterations; expiry raises Timeout so a run can be
// cancelled deterministically without forceful interruption.
class Deadline {
 public:
  Deadline() = default;  // unlimited

  static Deadline none() { return Deadline(); }
  static Deadline after_seconds(double seconds) {
    Deadline d;
    d.expiry_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(seconds));
    return d;
  }

  bool expired() const {
    return expiry_ && std::chrono::steady_clock::now() >= *expiry_;
  }

  void check() const {
    if (expired()) fail(ErrorCode::kTimeout, "computation budget exceeded");
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> expiry_;
};

}  // namespace odk

#endif  // ODKANON_DEADLINE_HPP_
