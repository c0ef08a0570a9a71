/*
 * Copyright 2026 The chakit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace chakit {

/// Exact clock arithmetic. Clock values live on a bounded grid, so 64-bit
/// numerators and denominators are plenty.
using Rational = boost::rational<std::int64_t>;

/// Parses "p/q" or "p" (optionally signed). Throws ParseError on malformed
/// input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& value);

std::int64_t floor_of(const Rational& value);
std::int64_t ceil_of(const Rational& value);

inline double to_double(const Rational& value) { return boost::rational_cast<double>(value); }

std::int64_t lcm_of_denominators(const std::vector<Rational>& values);

} // namespace chakit
