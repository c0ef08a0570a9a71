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

#include "chakit/model.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <cctype>
#include <bit>
#include <unordered_set>

namespace chakit {

Cocktail Cocktail::of(std::initializer_list<DrugId> drugs)
{
    Cocktail c;
    for (auto d : drugs)
        c = c.with(d);
    return c;
}

std::size_t Cocktail::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<DrugId> Cocktail::drugs() const
{
    std::vector<DrugId> out;
    for (auto b = bits_; b != 0; b &= b - 1)
        out.push_back(static_cast<DrugId>(std::countr_zero(b)));
    return out;
}

DrugUniverse::DrugUniverse(std::vector<std::string> names)
{
    for (auto& n : names)
        add(std::move(n));
}

DrugId DrugUniverse::add(std::string name)
{
    const bool valid = !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char ch) {
        return std::isalnum(ch) != 0 || ch == '_' || ch == '-';
    });
    if (!valid)
        throw ModelError("invalid drug id '" + name + "'");
    if (index_.count(name) != 0)
        throw ModelError("duplicate drug id '" + name + "'");
    if (names_.size() >= max_drugs)
        throw ModelError("at most 64 drugs are supported");
    const auto id = static_cast<DrugId>(names_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    return id;
}

std::optional<DrugId> DrugUniverse::find(std::string_view name) const
{
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

DrugId DrugUniverse::at(std::string_view name) const
{
    if (auto id = find(name))
        return *id;
    throw UnknownIdError("unknown drug '" + std::string(name) + "'");
}

Cocktail DrugUniverse::cocktail(std::span<const std::string> names) const
{
    Cocktail c;
    for (const auto& n : names)
        c = c.with(at(n));
    return c;
}

Cocktail DrugUniverse::all() const
{
    if (names_.size() == 64)
        return Cocktail(~std::uint64_t{0});
    return Cocktail((std::uint64_t{1} << names_.size()) - 1);
}

std::vector<std::string> DrugUniverse::names_of(Cocktail c) const
{
    std::vector<std::string> out;
    for (auto d : c.drugs())
        out.push_back(name(d));
    return out;
}

std::string DrugUniverse::format(Cocktail c) const
{
    std::string s = "{";
    bool first = true;
    for (auto d : c.drugs()) {
        if (!first)
            s += ",";
        s += d < names_.size() ? names_[d] : "#" + std::to_string(d);
        first = false;
    }
    return s + "}";
}

std::optional<StateId> Cha::find_state(std::string_view name) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name)
            return static_cast<StateId>(i);
    return std::nullopt;
}

StateId Cha::state_at(std::string_view name) const
{
    if (auto id = find_state(name))
        return *id;
    throw UnknownIdError("unknown state '" + std::string(name) + "'");
}

void Cha::add_implicit_self_loops()
{
    for (std::size_t v = 0; v < states.size(); ++v)
        edges.push_back(Edge{static_cast<StateId>(v), Cocktail{}, static_cast<StateId>(v), true});
}

StateId Run::at(std::size_t i) const
{
    if (i < states.size())
        return states[i];
    if (!loop_start)
        throw Error("run index past the end of a finite run");
    const auto cycle = states.size() - *loop_start;
    return states[*loop_start + (i - *loop_start) % cycle];
}

std::vector<StateId> successors(const Cha& cha, StateId state, Cocktail cocktail)
{
    if (state >= cha.state_count())
        throw UnknownIdError("unknown state index " + std::to_string(state));
    std::vector<char> seen(cha.state_count(), 0);
    for (const auto& e : cha.edges)
        if (e.source == state && !is_inhibited(e.inhibitors, cocktail) && e.target < seen.size())
            seen[e.target] = 1;
    std::vector<StateId> out;
    for (std::size_t v = 0; v < seen.size(); ++v)
        if (seen[v])
            out.push_back(static_cast<StateId>(v));
    return out;
}

namespace {

bool step_allowed(const Cha& cha, StateId from, StateId to, Cocktail c)
{
    return std::any_of(cha.edges.begin(), cha.edges.end(), [&](const Edge& e) {
        return e.source == from && e.target == to && !is_inhibited(e.inhibitors, c);
    });
}

} // namespace

bool is_run_of(const Cha& cha, const Run& run)
{
    if (run.states.empty())
        return false;
    for (auto v : run.states)
        if (v >= cha.state_count())
            return false;
    auto cocktail_at = [&](std::size_t i) { return i < run.cocktails.size() ? run.cocktails[i] : Cocktail{}; };
    for (std::size_t i = 0; i + 1 < run.states.size(); ++i)
        if (!step_allowed(cha, run.states[i], run.states[i + 1], cocktail_at(i)))
            return false;
    if (run.loop_start) {
        if (*run.loop_start >= run.states.size())
            return false;
        if (!step_allowed(cha, run.states.back(), run.states[*run.loop_start], cocktail_at(run.states.size() - 1)))
            return false;
    }
    return true;
}

bool ValidationReport::ok() const { return errors().empty(); }

std::vector<const Finding*> ValidationReport::errors() const
{
    std::vector<const Finding*> out;
    for (const auto& f : findings)
        if (f.kind != Finding::Kind::Warning)
            out.push_back(&f);
    return out;
}

std::vector<const Finding*> ValidationReport::warnings() const
{
    std::vector<const Finding*> out;
    for (const auto& f : findings)
        if (f.kind == Finding::Kind::Warning)
            out.push_back(&f);
    return out;
}

std::vector<Cocktail> minimal_blocking_cocktails(const Cha& cha, StateId state)
{
    std::vector<Cocktail> sets;
    for (const auto& e : cha.edges) {
        if (e.source != state)
            continue;
        if (e.inhibitors.empty())
            return {};
        if (std::find(sets.begin(), sets.end(), e.inhibitors) == sets.end())
            sets.push_back(e.inhibitors);
    }
    if (sets.empty())
        return {Cocktail{}};

    // One drug picked from each distinct inhibitor set, then keep the
    // inclusion-minimal unions.
    std::vector<Cocktail> partial{Cocktail{}};
    for (const auto& s : sets) {
        std::vector<Cocktail> next;
        for (auto p : partial) {
            if (p.intersects(s)) {
                next.push_back(p);
                continue;
            }
            for (auto d : s.drugs())
                next.push_back(p.with(d));
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        partial = std::move(next);
    }
    std::vector<Cocktail> minimal;
    for (auto c : partial) {
        bool dominated = std::any_of(partial.begin(), partial.end(),
                                     [&](Cocktail o) { return o != c && o.subset_of(c); });
        if (!dominated)
            minimal.push_back(c);
    }
    return minimal;
}

ValidationReport validate(const Cha& cha)
{
    ValidationReport report;
    auto add = [&](Finding::Kind k, std::string msg, std::optional<StateId> v = {}, std::optional<Cocktail> c = {}) {
        report.findings.push_back(Finding{k, std::move(msg), v, c});
    };

    std::unordered_set<std::string> seen;
    for (std::size_t v = 0; v < cha.states.size(); ++v)
        if (!seen.insert(cha.states[v]).second)
            add(Finding::Kind::DuplicateState, "duplicate state id '" + cha.states[v] + "'", static_cast<StateId>(v));
    if (cha.labels.size() != cha.states.size())
        add(Finding::Kind::DanglingState, "label table size does not match state count");
    if (cha.initial >= cha.state_count())
        add(Finding::Kind::BadInitial, "initial state index " + std::to_string(cha.initial) + " out of range");

    const auto universe = cha.drugs.all();
    bool structural_ok = true;
    for (std::size_t i = 0; i < cha.edges.size(); ++i) {
        const auto& e = cha.edges[i];
        if (e.source >= cha.state_count() || e.target >= cha.state_count()) {
            add(Finding::Kind::DanglingState, "edge " + std::to_string(i) + " has a dangling endpoint");
            structural_ok = false;
        }
        if (!e.inhibitors.subset_of(universe))
            add(Finding::Kind::UnknownDrug, "edge " + std::to_string(i) + " names a drug outside the universe");
    }
    if (!structural_ok)
        return report;

    for (std::size_t v = 0; v < cha.state_count(); ++v) {
        for (auto c : minimal_blocking_cocktails(cha, static_cast<StateId>(v)))
            add(Finding::Kind::Totality,
                "state '" + cha.states[v] + "' has no transition under cocktail " + cha.drugs.format(c),
                static_cast<StateId>(v), c);
    }
    return report;
}

ChaBuilder& ChaBuilder::drug(std::string name)
{
    cha_.drugs.add(std::move(name));
    return *this;
}

ChaBuilder& ChaBuilder::state(std::string name, std::set<std::string> labels)
{
    if (labels.empty())
        labels.insert(name);
    cha_.states.push_back(std::move(name));
    cha_.labels.push_back(std::move(labels));
    return *this;
}

ChaBuilder& ChaBuilder::edge(std::string_view from, std::string_view to, std::vector<std::string> inhibitors)
{
    cha_.edges.push_back(Edge{cha_.state_at(from), cha_.drugs.cocktail(inhibitors), cha_.state_at(to), false});
    return *this;
}

ChaBuilder& ChaBuilder::initial(std::string_view name)
{
    cha_.initial = cha_.state_at(name);
    return *this;
}

ChaBuilder& ChaBuilder::implicit_self_loops()
{
    loops_ = true;
    return *this;
}

Cha ChaBuilder::build() const
{
    Cha out = cha_;
    if (loops_)
        out.add_implicit_self_loops();
    return out;
}

} // namespace chakit
