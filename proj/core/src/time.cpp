// Copyright 2026 the sbftsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sbft/time.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace sbft {

SimTime parse_duration(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty duration");
  size_t i = 0;
  while (i < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'))
    ++i;
  if (i == 0) throw std::invalid_argument("duration must start with a number: " + text);
  double value = std::stod(text.substr(0, i));
  std::string unit = text.substr(i);
  double scale;
  if (unit == "us") {
    scale = kUs;
  } else if (unit == "ms") {
    scale = kMs;
  } else if (unit == "s") {
    scale = kSec;
  } else {
    throw std::invalid_argument("unknown duration unit: " + text);
  }
  return static_cast<SimTime>(std::llround(value * scale));
}

std::string format_duration(SimTime t) {
  if (t % kSec == 0) return fmt::format("{}s", t / kSec);
  if (t % kMs == 0) return fmt::format("{}ms", t / kMs);
  return fmt::format("{}us", t);
}

}  // namespace sbft
