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

#include "prtriage/timeutil.h"

#include <cctype>
#include <cstdio>

#include "prtriage/errors.h"

namespace prtriage {

namespace {

[[noreturn]] void Fail(std::string_view text, const char* why) {
  throw Error(ErrorKind::kParse, "bad timestamp '" + std::string(text) +
                                     "': " + why);
}

int Digits(std::string_view text, size_t pos, size_t count) {
  if (pos + count > text.size()) Fail(text, "truncated");
  int value = 0;
  for (size_t i = pos; i < pos + count; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      Fail(text, "expected digit");
    }
    value = value * 10 + (text[i] - '0');
  }
  return value;
}

void Expect(std::string_view text, size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) Fail(text, "unexpected separator");
}

}  // namespace

Timestamp ParseIso8601(std::string_view text) {
  using namespace std::chrono;
  const int y = Digits(text, 0, 4);
  Expect(text, 4, '-');
  const int mo = Digits(text, 5, 2);
  Expect(text, 7, '-');
  const int d = Digits(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't' &&
                            text[10] != ' ')) {
    Fail(text, "missing time part");
  }
  const int h = Digits(text, 11, 2);
  Expect(text, 13, ':');
  const int mi = Digits(text, 14, 2);
  Expect(text, 16, ':');
  const int s = Digits(text, 17, 2);
  size_t pos = 19;
  if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
    ++pos;
    const size_t start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
    }
    if (pos == start) Fail(text, "empty fraction");
  }
  long long offset_seconds = 0;
  if (pos == text.size()) {
    Fail(text, "missing zone designator");
  } else if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    const int oh = Digits(text, pos + 1, 2);
    Expect(text, pos + 3, ':');
    const int om = Digits(text, pos + 4, 2);
    offset_seconds = sign * (oh * 3600LL + om * 60LL);
    pos += 6;
  } else {
    Fail(text, "bad zone designator");
  }
  if (pos != text.size()) Fail(text, "trailing characters");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) Fail(text, "invalid calendar date");
  if (h > 23 || mi > 59 || s > 60) Fail(text, "invalid time of day");
  const Timestamp local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
  return local - seconds{offset_seconds};
}

std::string FormatIso8601(Timestamp t) {
  using namespace std::chrono;
  const sys_days day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<seconds> tod{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

}  // namespace prtriage
