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

#include "chakit/therapy.hpp"

#include "chakit/error.hpp"

#include <algorithm>

namespace chakit {

MemorylessTherapy constant_therapy(const Cha& cha, Cocktail c)
{
    return MemorylessTherapy{std::vector<Cocktail>(cha.state_count(), c)};
}

namespace {

Cocktail lookup(const std::map<std::vector<StateId>, Cocktail>& table, const std::optional<Cocktail>& fallback,
                std::span<const StateId> key)
{
    auto it = table.find(std::vector<StateId>(key.begin(), key.end()));
    if (it != table.end())
        return it->second;
    if (fallback)
        return *fallback;
    throw TherapyError("therapy undefined on history of length " + std::to_string(key.size()));
}

} // namespace

Cocktail therapy_at(const Therapy& therapy, std::span<const StateId> history)
{
    if (history.empty())
        throw TherapyError("therapy queried on an empty history");
    return std::visit(
        [&](const auto& t) -> Cocktail {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, MemorylessTherapy>) {
                if (history.back() >= t.by_state.size())
                    throw TherapyError("memoryless therapy undefined at state " + std::to_string(history.back()));
                return t.by_state[history.back()];
            } else if constexpr (std::is_same_v<T, FiniteMemoryTherapy>) {
                const auto n = std::min(t.window, history.size());
                return lookup(t.table, t.fallback, history.subspan(history.size() - n));
            } else {
                return lookup(t.table, t.fallback, history);
            }
        },
        therapy);
}

std::vector<Cocktail> therapy_range(const Therapy& therapy)
{
    std::vector<Cocktail> out;
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, MemorylessTherapy>) {
                out = t.by_state;
            } else {
                for (const auto& [k, c] : t.table)
                    out.push_back(c);
                if (t.fallback)
                    out.push_back(*t.fallback);
            }
        },
        therapy);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void check_therapy(const Cha& cha, const Therapy& therapy)
{
    if (const auto* m = std::get_if<MemorylessTherapy>(&therapy); m && m->by_state.size() != cha.state_count())
        throw TherapyError("memoryless therapy covers " + std::to_string(m->by_state.size()) + " states, model has " +
                           std::to_string(cha.state_count()));
    if (const auto* f = std::get_if<FiniteMemoryTherapy>(&therapy); f && f->window == 0)
        throw TherapyError("finite-memory therapy needs a window of at least 1");
    const auto universe = cha.drugs.all();
    for (auto c : therapy_range(therapy))
        if (!c.subset_of(universe))
            throw TherapyError("therapy uses a drug outside the universe");
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

} // namespace

MemorylessTherapy parse_memoryless_therapy(const Cha& cha, std::string_view text)
{
    auto therapy = constant_therapy(cha, Cocktail{});
    text = trim(text);
    if (text.empty() || text == "none")
        return therapy;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto comma = text.find(',', pos);
        if (comma == std::string_view::npos)
            comma = text.size();
        auto item = trim(text.substr(pos, comma - pos));
        const auto at = item.find('@');
        if (at == std::string_view::npos)
            throw ParseError("therapy entry '" + std::string(item) + "' lacks '@state'", pos);
        const auto state = cha.state_at(trim(item.substr(at + 1)));
        Cocktail c;
        auto drugs = trim(item.substr(0, at));
        if (drugs != "none" && !drugs.empty()) {
            std::size_t p = 0;
            while (p <= drugs.size()) {
                auto plus = drugs.find('+', p);
                if (plus == std::string_view::npos)
                    plus = drugs.size();
                c = c.with(cha.drugs.at(trim(drugs.substr(p, plus - p))));
                p = plus + 1;
            }
        }
        therapy.by_state[state] = therapy.by_state[state].united(c);
        pos = comma + 1;
    }
    return therapy;
}

std::string format_therapy(const Cha& cha, const MemorylessTherapy& therapy)
{
    std::string out;
    for (std::size_t v = 0; v < therapy.by_state.size(); ++v) {
        const auto c = therapy.by_state[v];
        if (c.empty())
            continue;
        if (!out.empty())
            out += ",";
        std::string drugs;
        for (auto d : c.drugs())
            drugs += (drugs.empty() ? "" : "+") + cha.drugs.name(d);
        out += drugs + "@" + cha.states[v];
    }
    return out.empty() ? "none" : out;
}

} // namespace chakit
