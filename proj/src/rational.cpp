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

#include "chakit/rational.hpp"

#include "chakit/error.hpp"

#include <charconv>
#include <numeric>

namespace chakit {

namespace {

std::int64_t parse_int(std::string_view text, std::size_t offset)
{
    std::int64_t value = 0;
    if (text.empty())
        throw ParseError("empty integer in rational", offset);
    const char* first = text.data();
    if (*first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError("malformed rational '" + std::string(text) + "'", offset);
    return value;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return Rational(parse_int(text, 0));
    const auto num = parse_int(trim(text.substr(0, slash)), 0);
    const auto den = parse_int(trim(text.substr(slash + 1)), slash + 1);
    if (den == 0)
        throw ParseError("zero denominator in rational '" + std::string(text) + "'", slash + 1);
    return Rational(num, den);
}

std::string to_string(const Rational& value)
{
    if (value.denominator() == 1)
        return std::to_string(value.numerator());
    return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

std::int64_t floor_of(const Rational& value)
{
    const auto n = value.numerator();
    const auto d = value.denominator(); // always > 0 in boost::rational
    auto q = n / d;
    if (n % d != 0 && n < 0)
        --q;
    return q;
}

std::int64_t ceil_of(const Rational& value)
{
    const auto n = value.numerator();
    const auto d = value.denominator();
    auto q = n / d;
    if (n % d != 0 && n > 0)
        ++q;
    return q;
}

std::int64_t lcm_of_denominators(const std::vector<Rational>& values)
{
    std::int64_t l = 1;
    for (const auto& v : values)
        l = std::lcm(l, v.denominator());
    return l;
}

} // namespace chakit
