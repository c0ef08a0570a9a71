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
#include "chakit/rational.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace chakit {

using ClockId = std::uint32_t;
using ClockValuation = std::vector<Rational>;

/// x >= bound.
struct ClockAtom {
    ClockId clock = 0;
    std::uint32_t bound = 0;
    friend bool operator==(const ClockAtom&, const ClockAtom&) = default;
};

/// Conjunction of lower-bound atoms; the empty conjunction is `true`.
struct ClockConstraint {
    std::vector<ClockAtom> atoms;

    [[nodiscard]] bool satisfied_by(std::span<const Rational> valuation) const;
    [[nodiscard]] std::vector<ClockAtom> failing_atoms(std::span<const Rational> valuation) const;
    [[nodiscard]] std::uint32_t bound_on(ClockId clock) const;
    friend bool operator==(const ClockConstraint&, const ClockConstraint&) = default;
};

/// Parses "x >= 3 && y >= 7" (also "∧", "&", "and"; "true" or "" for no
/// atoms) against the given clock names.
ClockConstraint parse_constraint(std::string_view text, const std::vector<std::string>& clocks);
std::string format_constraint(const ClockConstraint& c, const std::vector<std::string>& clocks);

struct TimedEdge {
    StateId source = 0;
    ClockConstraint guard;
    StateId target = 0;
    /// Direct inhibition; empty for pure timed models. Lifted untimed
    /// models keep their inhibitor sets here.
    Cocktail inhibitors;
    bool implicit = false;
    friend bool operator==(const TimedEdge&, const TimedEdge&) = default;
};

/// Timed cancer hybrid automaton. Rates default to 1; invariants are
/// optional per (state, clock).
struct TimedCha {
    DrugUniverse drugs;
    std::vector<std::string> states;
    std::vector<std::set<std::string>> labels;
    std::vector<std::string> clocks;
    std::vector<TimedEdge> edges;
    StateId initial = 0;
    /// invariants[state][clock]
    std::vector<std::vector<std::optional<std::uint32_t>>> invariants;
    std::map<std::tuple<StateId, DrugId, ClockId>, Rational> rates;
    /// Saturation bound per clock for the region quotient, when declared.
    std::vector<std::optional<std::uint32_t>> clock_bounds;
    /// False for lifted untimed models, whose runs must move every step.
    bool environment_may_idle = true;

    [[nodiscard]] std::size_t state_count() const { return states.size(); }
    [[nodiscard]] std::size_t clock_count() const { return clocks.size(); }
    [[nodiscard]] std::optional<StateId> find_state(std::string_view name) const;
    [[nodiscard]] StateId state_at(std::string_view name) const;
    [[nodiscard]] std::optional<ClockId> find_clock(std::string_view name) const;
    [[nodiscard]] ClockId clock_at(std::string_view name) const;
    [[nodiscard]] std::optional<std::uint32_t> invariant(StateId v, ClockId x) const;
    /// rho(v, d, x), 1 when unspecified.
    [[nodiscard]] Rational rate(StateId v, DrugId d, ClockId x) const;
    /// Largest constant in guards, invariants and declared bounds (at least 1).
    [[nodiscard]] std::uint32_t max_constant() const;
    /// Resizes invariant/bound tables after clocks or states were added.
    void normalize_tables();
};

/// Zero-clock timed view of an untimed CHA (inhibitor sets preserved,
/// environment must move every round).
TimedCha lift(const Cha& cha);

/// Untimed skeleton (guards dropped), used for reachability distances and
/// untimed-only operations.
Cha skeleton(const TimedCha& tc);

/// Product of the per-drug rates; 1 for the empty cocktail.
Rational cocktail_rate(const TimedCha& tc, StateId state, Cocktail cocktail, ClockId clock);

struct TimedState {
    StateId state = 0;
    ClockValuation valuation;
    friend bool operator==(const TimedState&, const TimedState&) = default;
};

TimedState initial_timed_state(const TimedCha& tc);

/// Delay transition. Throws InvariantViolationError naming the first clock
/// whose limit would be exceeded; `delta` must be positive.
TimedState delay(const TimedCha& tc, const TimedState& ts, const Rational& delta, Cocktail cocktail);

/// State transition along `edge`, resetting all clocks. Throws
/// GuardUnsatisfiedError listing the failing atoms (or the inhibition).
TimedState fire(const TimedCha& tc, const TimedState& ts, std::size_t edge, Cocktail cocktail = {});

/// Edges leaving ts.state whose guards hold and that `cocktail` does not
/// inhibit, in model order.
std::vector<std::size_t> enabled_edges(const TimedCha& tc, const TimedState& ts, Cocktail cocktail = {});

/// Replaces direct inhibition of source -> target by `drug` with a fresh
/// clock stopped by the drug at `source` and a guard `clock >= z`.
TimedCha emulate_inhibitor_edge(const TimedCha& tc, StateId source, StateId target, DrugId drug, std::uint32_t z);

struct DelayStep {
    Rational delta;
    Cocktail cocktail;
    friend bool operator==(const DelayStep&, const DelayStep&) = default;
};
struct FireStep {
    std::size_t edge = 0;
    friend bool operator==(const FireStep&, const FireStep&) = default;
};
using TimedStep = std::variant<DelayStep, FireStep>;

/// Run from (initial, 0). When `loop_start` is set, steps[loop_start..] repeat.
struct TimedRun {
    std::vector<TimedStep> steps;
    std::optional<std::size_t> loop_start;
};

/// Sum of the delays of the first `prefix_steps` steps (all when omitted).
Rational duration(const TimedRun& run, std::optional<std::size_t> prefix_steps = std::nullopt);

/// Replays the run; returns the timed state after each step (front = start).
/// Throws on an invalid step.
std::vector<TimedState> replay(const TimedCha& tc, const TimedRun& run);

/// Piecewise-constant timed therapy: per state, breakpoints (time since the
/// state was entered) at which the cocktail changes. The cocktail before the
/// first breakpoint is `initial_cocktail[state]`.
struct TimedTherapy {
    std::vector<Cocktail> initial_cocktail;
    std::vector<std::vector<std::pair<Rational, Cocktail>>> switches;

    static TimedTherapy memoryless(std::span<const Cocktail> by_state);
    [[nodiscard]] Cocktail at(StateId state, const Rational& time_in_state) const;
};

struct ExecutionCheck {
    bool ok = true;
    std::size_t step = 0;
    std::string diagnostic;
};

/// True iff every step is valid and each delay's cocktail equals the
/// therapy's choice on every intermediate prefix of that delay.
ExecutionCheck check_timed_execution(const TimedCha& tc, const TimedRun& run, const TimedTherapy& therapy);

/// Lasso validity: the cycle returns to the timed state where it started and
/// contains total delay >= 1.
bool is_non_zeno_lasso(const TimedCha& tc, const TimedRun& run);

/// Guard/invariant/rate checks including the syntactic invariant-exit rule.
/// `bound`, when given, rejects constants above it.
ValidationReport validate(const TimedCha& tc, std::optional<std::uint32_t> bound = std::nullopt);

} // namespace chakit
