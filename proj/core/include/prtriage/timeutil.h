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

#ifndef PRTRIAGE_TIMEUTIL_H_
#define PRTRIAGE_TIMEUTIL_H_

#include <chrono>
#include <string>
#include <string_view>

namespace prtriage {

// UTC instant with whole-second resolution.
using Timestamp = std::chrono::sys_seconds;

inline constexpr std::chrono::seconds kOneDay{86400};

// Accepts "YYYY-MM-DDTHH:MM:SS" followed by optional fractional seconds
// (truncated) and a zone designator "Z" or "+HH:MM"/"-HH:MM". A space is
// accepted in place of 'T'. Throws Error(kParse) on anything else.
Timestamp ParseIso8601(std::string_view text);

// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string FormatIso8601(Timestamp t);

inline Timestamp FromUnixSeconds(long long s) {
  return Timestamp{std::chrono::seconds{s}};
}
inline long long ToUnixSeconds(Timestamp t) {
  return t.time_since_epoch().count();
}

}  // namespace prtriage

#endif  // PRTRIAGE_TIMEUTIL_H_
