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

#include "chakit/ctl.hpp"
#include "chakit/timed.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chakit {

/// Reserved label of the absorbing node entered when time cannot progress.
inline const std::string timelock_label = "timelock";

/// ∅ first, then the given cocktails in order, duplicates dropped.
std::vector<Cocktail> canonical_menu(std::span<const Cocktail> menu);

struct GameEdge {
    enum class Kind { Controllable, Uncontrollable };
    Kind kind = Kind::Uncontrollable;
    std::size_t from = 0;
    std::size_t to = 0;
    /// Index of the CHA edge an uncontrollable edge replicates.
    std::size_t model_edge = 0;
    /// Over GameGraph::clocks (model clocks plus the sampling clock once
    /// discretized).
    ClockConstraint guard;
    /// Uncontrollable edges reset every model clock; after discretization
    /// every discrete move resets the sampling clock.
    bool resets_clocks = false;
    bool resets_sampling = false;
};

/// Game over locations v_C (one per state and menu cocktail). Location
/// index = state * |menu| + menu position.
struct GameGraph {
    TimedCha model;
    std::vector<Cocktail> menu;
    std::vector<std::string> clocks;
    std::vector<GameEdge> edges;
    std::optional<ClockId> sampling_clock;
    std::size_t initial = 0;

    [[nodiscard]] std::size_t location_count() const { return model.state_count() * menu.size(); }
    [[nodiscard]] std::size_t location(StateId v, std::size_t cocktail) const { return v * menu.size() + cocktail; }
    [[nodiscard]] StateId state_of(std::size_t loc) const { return static_cast<StateId>(loc / menu.size()); }
    [[nodiscard]] std::size_t cocktail_of(std::size_t loc) const { return loc % menu.size(); }
    /// rho(v, C, x); the sampling clock always runs at rate 1.
    [[nodiscard]] Rational rate(std::size_t loc, ClockId x) const;
    [[nodiscard]] std::optional<std::uint32_t> invariant(std::size_t loc, ClockId x) const;
    [[nodiscard]] std::string location_name(std::size_t loc) const;
};

/// Rectangular hybrid game of a timed CHA. The menu must contain ∅; throws
/// UnknownIdError for cocktails outside the drug universe.
GameGraph translate(const TimedCha& tc, std::span<const Cocktail> menu);

/// Adds the sampling clock: invariant 1 everywhere, `>= 1` conjoined to
/// every guard, rate 1, reset by every discrete move.
GameGraph discretize(const GameGraph& g);

/// Concrete configuration of the sampling game at the start of a round.
struct GameState {
    std::size_t location = 0;
    /// Model clocks followed by the sampling clock.
    ClockValuation valuation;
};

/// One sampling round: the controller picks a menu entry, the environment
/// fires a model edge or passes (nullopt), then one time unit elapses.
struct RoundMove {
    std::size_t cocktail = 0;
    std::optional<std::size_t> edge;
};

enum class RoundOutcome { Ok, IllegalMove, Timelock };

struct RoundResult {
    RoundOutcome outcome = RoundOutcome::Ok;
    GameState next;
    std::string diagnostic;
};

GameState initial_game_state(const GameGraph& g);

/// Edges the environment may fire after the controller chose `cocktail`.
std::vector<std::size_t> environment_edges(const GameGraph& g, const GameState& s, std::size_t cocktail);

/// Whether the environment may pass (timed model and the unit delay keeps
/// every invariant) after the controller chose `cocktail`.
bool environment_may_pass(const GameGraph& g, const GameState& s, std::size_t cocktail);

/// Plays one round on a discretized game with exact rationals.
RoundResult play_round(const GameGraph& g, const GameState& s, const RoundMove& move);

/// Per clock: 2j for the point j, 2j+1 for the open interval (j, j+1).
struct Region {
    std::vector<std::int64_t> code;

    [[nodiscard]] std::int64_t floor(std::size_t clock) const { return code[clock] / 2; }
    [[nodiscard]] std::int64_t ceil(std::size_t clock) const { return (code[clock] + 1) / 2; }
    [[nodiscard]] bool is_point(std::size_t clock) const { return code[clock] % 2 == 0; }
    friend bool operator==(const Region&, const Region&) = default;
    friend auto operator<=>(const Region&, const Region&) = default;
};

/// Floor/ceiling class of a valuation with values saturated at `bound`.
/// With `saturate` false, a value above the bound throws UnboundedClockError.
Region region_of(std::span<const Rational> valuation, std::uint32_t bound, bool saturate = true);

struct QuotientOptions {
    /// Saturation bound m for every clock; defaults to each clock's declared
    /// bound, else the model's largest constant.
    std::optional<std::uint32_t> bound;
    /// Grid refinement; defaults to the lcm of all rate denominators.
    std::optional<std::int64_t> scale;
    std::size_t max_nodes = 50'000'000;
};

/// Finite region quotient of the sampling game. Regions live on the grid
/// 1/scale (values multiplied by `scale`), so every unit delay moves a
/// region to exactly one region. Node id = ((location * R) + region) * 3 +
/// turn, followed by one timelock sink.
struct QuotientGame {
    enum class Turn : std::uint8_t { Controller = 0, Environment = 1, Delay = 2 };
    static constexpr std::size_t none = static_cast<std::size_t>(-1);

    GameGraph game;
    std::int64_t scale = 1;
    /// Unscaled bound m per model clock.
    std::vector<std::uint32_t> bound;
    /// Scaled saturation point per clock (scale * m).
    std::vector<std::int64_t> scaled_bound;
    std::size_t regions_per_location = 1;
    std::size_t sink = 0;
    std::size_t initial = 0;

    /// Environment moves per (location, region): CSR over env_target with
    /// the replicated model edge (or `none` for a pass).
    std::vector<std::size_t> env_offset;
    std::vector<std::size_t> env_target;
    std::vector<std::size_t> env_edge;
    /// Successor of each delay node: a controller node or the sink.
    std::vector<std::size_t> delay_target;

    [[nodiscard]] std::size_t node_count() const { return sink + 1; }
    [[nodiscard]] std::size_t menu_size() const { return game.menu.size(); }
    [[nodiscard]] std::size_t node(std::size_t loc, std::size_t region, Turn t) const
    {
        return (loc * regions_per_location + region) * 3 + static_cast<std::size_t>(t);
    }
    [[nodiscard]] Turn turn(std::size_t n) const { return static_cast<Turn>(n % 3); }
    [[nodiscard]] std::size_t cell(std::size_t n) const { return n / 3; }
    [[nodiscard]] std::size_t location(std::size_t n) const { return n / 3 / regions_per_location; }
    [[nodiscard]] std::size_t region_index(std::size_t n) const { return n / 3 % regions_per_location; }
    [[nodiscard]] StateId state(std::size_t n) const { return game.state_of(location(n)); }

    [[nodiscard]] Region region(std::size_t index) const;
    [[nodiscard]] std::size_t region_index(const Region& r) const;
    /// Controller node n choosing menu entry j leads to this environment node.
    [[nodiscard]] std::size_t controller_successor(std::size_t n, std::size_t j) const;
    [[nodiscard]] std::span<const std::size_t> environment_successors(std::size_t n) const;
    [[nodiscard]] std::span<const std::size_t> environment_edges(std::size_t n) const;
    [[nodiscard]] const std::set<std::string>& labels(std::size_t n) const;
    /// Region of an unscaled valuation (model clocks only) in this quotient.
    [[nodiscard]] Region scaled_region(std::span<const Rational> valuation) const;
    /// Controller node of a concrete round-start configuration.
    [[nodiscard]] std::size_t controller_node(const GameState& s) const;
    /// "SSG/{Avastin}@x=(0,1/2),t={1}" style.
    [[nodiscard]] std::string node_name(std::size_t n) const;
    /// Region text per clock in unscaled units.
    [[nodiscard]] std::string region_text(std::size_t index) const;
};

/// Throws UnboundedClockError when the bound is below a model constant,
/// RegionSplitError when `scale` does not clear every rate denominator and
/// ExplosionError above max_nodes.
QuotientGame quotient(const GameGraph& g, const QuotientOptions& options = {});

/// translate + discretize + quotient.
QuotientGame build_quotient(const TimedCha& tc, std::span<const Cocktail> menu, const QuotientOptions& options = {});

/// Memoryless strategy: menu index per controller cell (location * R +
/// region); `unset` where undefined.
struct Strategy {
    static constexpr std::uint16_t unset = 0xFFFF;
    std::vector<std::uint16_t> choice;

    [[nodiscard]] bool defined(std::size_t cell) const { return cell < choice.size() && choice[cell] != unset; }
};

/// Round-level Kripke structure: one node per reachable controller node
/// (plus the sink if reachable), one edge per round. With a strategy only
/// its choices are followed; throws PartialStrategyError at a reachable
/// controller node without a choice.
struct RoundKripke {
    Kripke kripke;
    /// Quotient node of every Kripke node.
    std::vector<std::size_t> game_node;
};

RoundKripke round_kripke(const QuotientGame& q, const Strategy* strategy = nullptr);

/// Closed round Kripke of a memoryless therapy over base states.
RoundKripke round_kripke(const QuotientGame& q, std::span<const std::size_t> menu_choice_by_state);

/// True iff every cycle of the quotient passes through a delay node.
bool every_cycle_has_delay(const QuotientGame& q);

} // namespace chakit
