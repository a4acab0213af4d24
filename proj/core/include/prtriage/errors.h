// Copyright 2026 The prtriage Authors.
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

#ifndef PRTRIAGE_ERRORS_H_
#define PRTRIAGE_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace prtriage {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kParse,
  kSchemaMismatch,
  kDegenerateData,
  kNotFound,
  kRateLimited,
  kMapping,
  kForge,
};

// Stable lower_snake identifier, used in CLI error lines.
std::string_view ErrorKindName(ErrorKind kind);

// Library-wide exception. Every throw site in prtriage uses this type so
// callers can dispatch on kind() without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void ThrowInvalidArgument(const std::string& message);

}  // namespace prtriage

#endif  // PRTRIAGE_ERRORS_H_
