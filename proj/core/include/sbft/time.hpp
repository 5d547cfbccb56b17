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

#pragma once

#include <cstdint>
#include <string>

namespace sbft {

// Simulated time in integer microseconds. All protocol timeouts, network
// latencies and service times are expressed in this unit so that event
// ordering never depends on floating point rounding.
using SimTime = int64_t;

constexpr SimTime kUs = 1;
constexpr SimTime kMs = 1000;
constexpr SimTime kSec = 1000 * 1000;

// Parses "250us", "5ms", "2s", "1.5s" (fractions allowed for ms/s).
// Throws std::invalid_argument on malformed input.
SimTime parse_duration(const std::string& text);

std::string format_duration(SimTime t);

}  // namespace sbft
