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

#include "chakit/timed.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <cctype>

namespace chakit {

bool ClockConstraint::satisfied_by(std::span<const Rational> valuation) const
{
    return std::all_of(atoms.begin(), atoms.end(),
                       [&](const ClockAtom& a) { return valuation[a.clock] >= Rational(a.bound); });
}

std::vector<ClockAtom> ClockConstraint::failing_atoms(std::span<const Rational> valuation) const
{
    std::vector<ClockAtom> out;
    for (const auto& a : atoms)
        if (valuation[a.clock] < Rational(a.bound))
            out.push_back(a);
    return out;
}

std::uint32_t ClockConstraint::bound_on(ClockId clock) const
{
    std::uint32_t k = 0;
    for (const auto& a : atoms)
        if (a.clock == clock)
            k = std::max(k, a.bound);
    return k;
}

ClockConstraint parse_constraint(std::string_view text, const std::vector<std::string>& clocks)
{
    ClockConstraint out;
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    };
    auto starts = [&](std::string_view tok) { return text.substr(pos, tok.size()) == tok; };
    skip_ws();
    if (pos == text.size() || text.substr(pos) == "true")
        return out;
    while (true) {
        skip_ws();
        const auto name_start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const auto name = text.substr(name_start, pos - name_start);
        if (name.empty())
            throw ParseError("expected clock name in guard", pos);
        auto it = std::find(clocks.begin(), clocks.end(), name);
        if (it == clocks.end())
            throw ParseError("unknown clock '" + std::string(name) + "' in guard", name_start);
        skip_ws();
        if (!starts(">="))
            throw ParseError("expected '>=' (only lower-bound atoms are allowed)", pos);
        pos += 2;
        skip_ws();
        const auto num_start = pos;
        std::uint64_t k = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            k = k * 10 + static_cast<std::uint64_t>(text[pos] - '0');
            if (k > 1'000'000'000)
                throw ParseError("guard constant too large", num_start);
            ++pos;
        }
        if (pos == num_start)
            throw ParseError("expected a natural number in guard", pos);
        out.atoms.push_back(ClockAtom{static_cast<ClockId>(it - clocks.begin()), static_cast<std::uint32_t>(k)});
        skip_ws();
        if (pos == text.size())
            break;
        if (starts("&&"))
            pos += 2;
        else if (starts("\xE2\x88\xA7")) // U+2227 LOGICAL AND
            pos += 3;
        else if (starts("&"))
            pos += 1;
        else if (starts("and"))
            pos += 3;
        else
            throw ParseError("expected '&&' between guard atoms", pos);
    }
    return out;
}

std::string format_constraint(const ClockConstraint& c, const std::vector<std::string>& clocks)
{
    if (c.atoms.empty())
        return "true";
    std::string s;
    for (const auto& a : c.atoms) {
        if (!s.empty())
            s += " && ";
        s += clocks.at(a.clock) + " >= " + std::to_string(a.bound);
    }
    return s;
}

std::optional<StateId> TimedCha::find_state(std::string_view name) const
{
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end())
        return std::nullopt;
    return static_cast<StateId>(it - states.begin());
}

StateId TimedCha::state_at(std::string_view name) const
{
    if (auto v = find_state(name))
        return *v;
    throw UnknownIdError("unknown state '" + std::string(name) + "'");
}

std::optional<ClockId> TimedCha::find_clock(std::string_view name) const
{
    auto it = std::find(clocks.begin(), clocks.end(), name);
    if (it == clocks.end())
        return std::nullopt;
    return static_cast<ClockId>(it - clocks.begin());
}

ClockId TimedCha::clock_at(std::string_view name) const
{
    if (auto x = find_clock(name))
        return *x;
    throw UnknownIdError("unknown clock '" + std::string(name) + "'");
}

std::optional<std::uint32_t> TimedCha::invariant(StateId v, ClockId x) const
{
    if (v >= invariants.size() || x >= invariants[v].size())
        return std::nullopt;
    return invariants[v][x];
}

Rational TimedCha::rate(StateId v, DrugId d, ClockId x) const
{
    auto it = rates.find({v, d, x});
    return it == rates.end() ? Rational(1) : it->second;
}

std::uint32_t TimedCha::max_constant() const
{
    std::uint32_t k = 1;
    for (const auto& e : edges)
        for (const auto& a : e.guard.atoms)
            k = std::max(k, a.bound);
    for (const auto& row : invariants)
        for (const auto& l : row)
            if (l)
                k = std::max(k, *l);
    for (const auto& b : clock_bounds)
        if (b)
            k = std::max(k, *b);
    return k;
}

void TimedCha::normalize_tables()
{
    invariants.resize(states.size());
    for (auto& row : invariants)
        row.resize(clocks.size());
    clock_bounds.resize(clocks.size());
    labels.resize(states.size());
}

TimedCha lift(const Cha& cha)
{
    TimedCha tc;
    tc.drugs = cha.drugs;
    tc.states = cha.states;
    tc.labels = cha.labels;
    tc.initial = cha.initial;
    for (const auto& e : cha.edges)
        tc.edges.push_back(TimedEdge{e.source, ClockConstraint{}, e.target, e.inhibitors, e.implicit});
    tc.environment_may_idle = false;
    tc.normalize_tables();
    return tc;
}

Cha skeleton(const TimedCha& tc)
{
    Cha cha;
    cha.drugs = tc.drugs;
    cha.states = tc.states;
    cha.labels = tc.labels;
    cha.initial = tc.initial;
    for (const auto& e : tc.edges)
        cha.edges.push_back(Edge{e.source, e.inhibitors, e.target, e.implicit});
    return cha;
}

Rational cocktail_rate(const TimedCha& tc, StateId state, Cocktail cocktail, ClockId clock)
{
    if (state >= tc.state_count())
        throw UnknownIdError("unknown state index " + std::to_string(state));
    if (clock >= tc.clock_count())
        throw UnknownIdError("unknown clock index " + std::to_string(clock));
    Rational r(1);
    for (auto d : cocktail.drugs()) {
        if (d >= tc.drugs.size())
            throw UnknownIdError("unknown drug index " + std::to_string(d));
        r *= tc.rate(state, d, clock);
    }
    return r;
}

TimedState initial_timed_state(const TimedCha& tc)
{
    return TimedState{tc.initial, ClockValuation(tc.clock_count(), Rational(0))};
}

TimedState delay(const TimedCha& tc, const TimedState& ts, const Rational& delta, Cocktail cocktail)
{
    if (delta <= Rational(0))
        throw Error("delay must be positive, got " + to_string(delta));
    TimedState next = ts;
    for (ClockId x = 0; x < tc.clock_count(); ++x) {
        next.valuation[x] += delta * cocktail_rate(tc, ts.state, cocktail, x);
        if (auto limit = tc.invariant(ts.state, x); limit && next.valuation[x] > Rational(*limit))
            throw InvariantViolationError("delay of " + to_string(delta) + " at '" + tc.states[ts.state] +
                                          "' pushes clock '" + tc.clocks[x] + "' to " + to_string(next.valuation[x]) +
                                          " past its limit " + std::to_string(*limit));
    }
    return next;
}

TimedState fire(const TimedCha& tc, const TimedState& ts, std::size_t edge, Cocktail cocktail)
{
    if (edge >= tc.edges.size())
        throw UnknownIdError("unknown edge index " + std::to_string(edge));
    const auto& e = tc.edges[edge];
    if (e.source != ts.state)
        throw GuardUnsatisfiedError("edge " + std::to_string(edge) + " does not leave '" + tc.states[ts.state] + "'");
    if (is_inhibited(e.inhibitors, cocktail))
        throw GuardUnsatisfiedError("edge " + std::to_string(edge) + " is inhibited by " + tc.drugs.format(cocktail));
    const auto failing = e.guard.failing_atoms(ts.valuation);
    if (!failing.empty())
        throw GuardUnsatisfiedError("guard of edge " + std::to_string(edge) + " fails: " +
                                    format_constraint(ClockConstraint{failing}, tc.clocks));
    return TimedState{e.target, ClockValuation(tc.clock_count(), Rational(0))};
}

std::vector<std::size_t> enabled_edges(const TimedCha& tc, const TimedState& ts, Cocktail cocktail)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tc.edges.size(); ++i) {
        const auto& e = tc.edges[i];
        if (e.source == ts.state && !is_inhibited(e.inhibitors, cocktail) && e.guard.satisfied_by(ts.valuation))
            out.push_back(i);
    }
    return out;
}

TimedCha emulate_inhibitor_edge(const TimedCha& tc, StateId source, StateId target, DrugId drug, std::uint32_t z)
{
    if (source >= tc.state_count() || target >= tc.state_count())
        throw UnknownIdError("unknown state in inhibitor emulation");
    if (drug >= tc.drugs.size())
        throw UnknownIdError("unknown drug in inhibitor emulation");
    if (z == 0)
        throw Error("inhibitor emulation threshold must be positive");
    const bool found = std::any_of(tc.edges.begin(), tc.edges.end(),
                                   [&](const TimedEdge& e) { return e.source == source && e.target == target; });
    if (!found)
        throw EdgeNotFoundError("no edge '" + tc.states[source] + "' -> '" + tc.states[target] + "'");

    TimedCha out = tc;
    std::string name = "x_" + tc.drugs.name(drug) + "_" + tc.states[target];
    while (out.find_clock(name))
        name += "'";
    const auto clock = static_cast<ClockId>(out.clocks.size());
    out.clocks.push_back(name);
    out.normalize_tables();
    out.rates[{source, drug, clock}] = Rational(0);
    for (auto& e : out.edges)
        if (e.source == source && e.target == target)
            e.guard.atoms.push_back(ClockAtom{clock, z});
    return out;
}

Rational duration(const TimedRun& run, std::optional<std::size_t> prefix_steps)
{
    const auto n = std::min(prefix_steps.value_or(run.steps.size()), run.steps.size());
    Rational total(0);
    for (std::size_t i = 0; i < n; ++i)
        if (const auto* d = std::get_if<DelayStep>(&run.steps[i]))
            total += d->delta;
    return total;
}

std::vector<TimedState> replay(const TimedCha& tc, const TimedRun& run)
{
    std::vector<TimedState> states{initial_timed_state(tc)};
    Cocktail current;
    for (const auto& step : run.steps) {
        if (const auto* d = std::get_if<DelayStep>(&step)) {
            current = d->cocktail;
            states.push_back(delay(tc, states.back(), d->delta, d->cocktail));
        } else {
            states.push_back(fire(tc, states.back(), std::get<FireStep>(step).edge, current));
        }
    }
    return states;
}

TimedTherapy TimedTherapy::memoryless(std::span<const Cocktail> by_state)
{
    TimedTherapy t;
    t.initial_cocktail.assign(by_state.begin(), by_state.end());
    t.switches.resize(by_state.size());
    return t;
}

Cocktail TimedTherapy::at(StateId state, const Rational& time_in_state) const
{
    if (state >= initial_cocktail.size())
        throw TherapyError("timed therapy undefined at state " + std::to_string(state));
    Cocktail c = initial_cocktail[state];
    if (state < switches.size())
        for (const auto& [when, cocktail] : switches[state])
            if (when <= time_in_state)
                c = cocktail;
    return c;
}

ExecutionCheck check_timed_execution(const TimedCha& tc, const TimedRun& run, const TimedTherapy& therapy)
{
    TimedState ts = initial_timed_state(tc);
    Rational in_state(0);
    Cocktail current;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const auto& step = run.steps[i];
        try {
            if (const auto* d = std::get_if<DelayStep>(&step)) {
                if (therapy.at(ts.state, in_state) != d->cocktail)
                    return {false, i, "therapy prescribes " + tc.drugs.format(therapy.at(ts.state, in_state)) +
                                          " at the start of delay " + std::to_string(i)};
                if (ts.state < therapy.switches.size())
                    for (const auto& [when, c] : therapy.switches[ts.state])
                        if (when > in_state && when < in_state + d->delta && therapy.at(ts.state, when) != d->cocktail)
                            return {false, i, "therapy switches to " + tc.drugs.format(c) + " after " +
                                                  to_string(when - in_state) + " time units inside delay " +
                                                  std::to_string(i)};
                ts = delay(tc, ts, d->delta, d->cocktail);
                in_state += d->delta;
                current = d->cocktail;
            } else {
                ts = fire(tc, ts, std::get<FireStep>(step).edge, current);
                in_state = 0;
            }
        } catch (const Error& e) {
            return {false, i, e.what()};
        }
    }
    return {true, run.steps.size(), {}};
}

bool is_non_zeno_lasso(const TimedCha& tc, const TimedRun& run)
{
    if (!run.loop_start || *run.loop_start >= run.steps.size())
        return false;
    std::vector<TimedState> states;
    try {
        states = replay(tc, run);
    } catch (const Error&) {
        return false;
    }
    Rational cycle_delay(0);
    for (std::size_t i = *run.loop_start; i < run.steps.size(); ++i)
        if (const auto* d = std::get_if<DelayStep>(&run.steps[i]))
            cycle_delay += d->delta;
    return states[*run.loop_start] == states.back() && cycle_delay >= Rational(1);
}

ValidationReport validate(const TimedCha& tc, std::optional<std::uint32_t> bound)
{
    ValidationReport report;
    auto add = [&](Finding::Kind k, std::string msg, std::optional<StateId> v = {}) {
        report.findings.push_back(Finding{k, std::move(msg), v, std::nullopt});
    };

    std::set<std::string> seen;
    for (std::size_t v = 0; v < tc.states.size(); ++v)
        if (!seen.insert(tc.states[v]).second)
            add(Finding::Kind::DuplicateState, "duplicate state id '" + tc.states[v] + "'", static_cast<StateId>(v));
    std::set<std::string> seen_clocks;
    for (const auto& c : tc.clocks)
        if (!seen_clocks.insert(c).second)
            add(Finding::Kind::DuplicateState, "duplicate clock id '" + c + "'");
    if (tc.initial >= tc.state_count())
        add(Finding::Kind::BadInitial, "initial state out of range");
    for (std::size_t i = 0; i < tc.edges.size(); ++i) {
        const auto& e = tc.edges[i];
        if (e.source >= tc.state_count() || e.target >= tc.state_count()) {
            add(Finding::Kind::DanglingState, "edge " + std::to_string(i) + " has a dangling endpoint");
            return report;
        }
        if (!e.inhibitors.subset_of(tc.drugs.all()))
            add(Finding::Kind::UnknownDrug, "edge " + std::to_string(i) + " names a drug outside the universe");
        for (const auto& a : e.guard.atoms) {
            if (a.clock >= tc.clock_count())
                add(Finding::Kind::Guard, "edge " + std::to_string(i) + " constrains an unknown clock");
            else if (auto b = tc.clock_bounds.size() > a.clock && tc.clock_bounds[a.clock] ? tc.clock_bounds[a.clock]
                                                                                           : bound;
                     b && a.bound > *b)
                add(Finding::Kind::Bound, "guard constant " + std::to_string(a.bound) + " on clock '" +
                                              tc.clocks[a.clock] + "' exceeds the clock bound " +
                                              std::to_string(*b));
        }
    }
    for (const auto& [key, r] : tc.rates) {
        const auto& [v, d, x] = key;
        if (v >= tc.state_count() || d >= tc.drugs.size() || x >= tc.clock_count())
            add(Finding::Kind::Rate, "rate entry refers to an unknown state, drug or clock");
        else if (r < Rational(0))
            add(Finding::Kind::Rate, "negative rate " + to_string(r) + " for drug '" + tc.drugs.name(d) + "' on clock '" +
                                         tc.clocks[x] + "' at '" + tc.states[v] + "'",
                v);
    }

    for (StateId v = 0; v < tc.state_count(); ++v) {
        for (ClockId x = 0; x < tc.clock_count(); ++x) {
            const auto limit = tc.invariant(v, x);
            if (!limit)
                continue;
            if (bound && *limit > *bound)
                add(Finding::Kind::Bound, "invariant " + std::to_string(*limit) + " on clock '" + tc.clocks[x] +
                                              "' at '" + tc.states[v] + "' exceeds the clock bound",
                    v);
            // Invariant-exit rule: an edge whose guard holds whenever x = limit
            // (other clocks arbitrary), which for >=-only guards is syntactic.
            bool exit_found = false;
            bool uninhibitable_exit = false;
            for (const auto& e : tc.edges) {
                if (e.source != v)
                    continue;
                const bool holds = std::all_of(e.guard.atoms.begin(), e.guard.atoms.end(), [&](const ClockAtom& a) {
                    return a.clock == x ? a.bound <= *limit : a.bound == 0;
                });
                if (holds) {
                    exit_found = true;
                    uninhibitable_exit = uninhibitable_exit || e.inhibitors.empty();
                }
            }
            if (!exit_found)
                add(Finding::Kind::Invariant, "state '" + tc.states[v] + "' limits clock '" + tc.clocks[x] + "' to " +
                                                  std::to_string(*limit) + " but no edge is guaranteed enabled there",
                    v);
            else if (!uninhibitable_exit)
                add(Finding::Kind::Warning, "every exit edge for the limit on '" + tc.clocks[x] + "' at '" +
                                                tc.states[v] + "' can be inhibited",
                    v);
            if (*limit == 0)
                add(Finding::Kind::Warning, "state '" + tc.states[v] + "' cannot be held for a sampling round (limit 0 on '" +
                                                tc.clocks[x] + "')",
                    v);
        }
    }
    if (!tc.environment_may_idle) {
        const auto untimed = validate(skeleton(tc));
        for (const auto& f : untimed.findings)
            if (f.kind == Finding::Kind::Totality)
                report.findings.push_back(f);
    }
    return report;
}

} // namespace chakit
