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

#include "chakit/model.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chakit {

/// Cocktail chosen from the current state only.
struct MemorylessTherapy {
    std::vector<Cocktail> by_state;
    friend bool operator==(const MemorylessTherapy&, const MemorylessTherapy&) = default;
};

/// Cocktail chosen from the last `window` states of the history (the whole
/// history while it is shorter than the window).
struct FiniteMemoryTherapy {
    std::size_t window = 1;
    std::map<std::vector<StateId>, Cocktail> table;
    std::optional<Cocktail> fallback;
    friend bool operator==(const FiniteMemoryTherapy&, const FiniteMemoryTherapy&) = default;
};

/// Explicit map from whole finite runs to cocktails.
struct TabularTherapy {
    std::map<std::vector<StateId>, Cocktail> table;
    std::optional<Cocktail> fallback;
    friend bool operator==(const TabularTherapy&, const TabularTherapy&) = default;
};

using Therapy = std::variant<MemorylessTherapy, FiniteMemoryTherapy, TabularTherapy>;

/// Therapy giving the same cocktail everywhere.
MemorylessTherapy constant_therapy(const Cha& cha, Cocktail c);

/// Cocktail for the history (non-empty, last element = current state).
/// Throws TherapyError when the therapy is undefined there.
Cocktail therapy_at(const Therapy& therapy, std::span<const StateId> history);

/// Every cocktail the therapy can return.
std::vector<Cocktail> therapy_range(const Therapy& therapy);

/// Checks domain coverage of a memoryless therapy and that every cocktail is
/// inside the drug universe. Throws TherapyError.
void check_therapy(const Cha& cha, const Therapy& therapy);

/// Parses "Avastin@SSG,Avastin@IAG" or "A+B@v" style memoryless therapies
/// (unlisted states get the empty cocktail). "none" or "" means no drugs.
MemorylessTherapy parse_memoryless_therapy(const Cha& cha, std::string_view text);

/// Inverse of parse_memoryless_therapy; states with an empty cocktail are
/// omitted, "none" when nothing is given.
std::string format_therapy(const Cha& cha, const MemorylessTherapy& therapy);

} // namespace chakit
