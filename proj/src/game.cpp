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

#include "chakit/game.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace chakit {

std::vector<Cocktail> canonical_menu(std::span<const Cocktail> menu)
{
    std::vector<Cocktail> out{Cocktail{}};
    for (auto c : menu)
        if (std::find(out.begin(), out.end(), c) == out.end())
            out.push_back(c);
    return out;
}

Rational GameGraph::rate(std::size_t loc, ClockId x) const
{
    if (sampling_clock && x == *sampling_clock)
        return Rational(1);
    return cocktail_rate(model, state_of(loc), menu.at(cocktail_of(loc)), x);
}

std::optional<std::uint32_t> GameGraph::invariant(std::size_t loc, ClockId x) const
{
    if (sampling_clock && x == *sampling_clock)
        return 1;
    return model.invariant(state_of(loc), x);
}

std::string GameGraph::location_name(std::size_t loc) const
{
    return model.states.at(state_of(loc)) + "/" + model.drugs.format(menu.at(cocktail_of(loc)));
}

GameGraph translate(const TimedCha& tc, std::span<const Cocktail> menu)
{
    if (menu.empty())
        throw Error("cocktail menu is empty");
    if (std::find(menu.begin(), menu.end(), Cocktail{}) == menu.end())
        throw Error("cocktail menu must contain the empty cocktail");
    for (auto c : menu)
        if (!c.subset_of(tc.drugs.all()))
            throw UnknownIdError("menu cocktail names a drug outside the universe");
    GameGraph g;
    g.model = tc;
    g.model.normalize_tables();
    g.menu.assign(menu.begin(), menu.end());
    g.clocks = tc.clocks;
    const auto k = g.menu.size();
    for (StateId v = 0; v < tc.state_count(); ++v) {
        for (std::size_t j = 0; j < k; ++j) {
            const auto from = g.location(v, j);
            for (std::size_t j2 = 0; j2 < k; ++j2)
                if (j2 != j)
                    g.edges.push_back(GameEdge{GameEdge::Kind::Controllable, from, g.location(v, j2), 0, {}, false,
                                               false});
            for (std::size_t e = 0; e < tc.edges.size(); ++e) {
                const auto& edge = tc.edges[e];
                if (edge.source != v || is_inhibited(edge.inhibitors, g.menu[j]))
                    continue;
                g.edges.push_back(GameEdge{GameEdge::Kind::Uncontrollable, from, g.location(edge.target, j), e,
                                           edge.guard, true, false});
            }
        }
    }
    g.initial = g.location(tc.initial, 0);
    return g;
}

GameGraph discretize(const GameGraph& g)
{
    if (g.sampling_clock)
        return g;
    GameGraph out = g;
    std::string name = "x_sample";
    while (std::find(out.clocks.begin(), out.clocks.end(), name) != out.clocks.end())
        name += "'";
    const auto xs = static_cast<ClockId>(out.clocks.size());
    out.clocks.push_back(name);
    out.sampling_clock = xs;
    for (auto& e : out.edges) {
        e.guard.atoms.push_back(ClockAtom{xs, 1});
        e.resets_sampling = true;
    }
    return out;
}

GameState initial_game_state(const GameGraph& g)
{
    GameState s;
    s.location = g.initial;
    s.valuation.assign(g.model.clock_count(), Rational(0));
    // A round starts once a sampling period has elapsed; the very first
    // round is treated the same way.
    if (g.sampling_clock)
        s.valuation.push_back(Rational(1));
    return s;
}

std::vector<std::size_t> environment_edges(const GameGraph& g, const GameState& s, std::size_t cocktail)
{
    std::vector<std::size_t> out;
    if (cocktail >= g.menu.size())
        return out;
    if (g.sampling_clock && s.valuation.at(*g.sampling_clock) < Rational(1))
        return out;
    const auto v = g.state_of(s.location);
    const std::span<const Rational> clocks(s.valuation.data(), g.model.clock_count());
    for (std::size_t e = 0; e < g.model.edges.size(); ++e) {
        const auto& edge = g.model.edges[e];
        if (edge.source == v && !is_inhibited(edge.inhibitors, g.menu[cocktail]) && edge.guard.satisfied_by(clocks))
            out.push_back(e);
    }
    return out;
}

namespace {

/// Unit delay of the model clocks at `loc`; false on an invariant violation.
bool unit_delay(const GameGraph& g, std::size_t loc, ClockValuation& val)
{
    for (ClockId x = 0; x < g.model.clock_count(); ++x) {
        val[x] += g.rate(loc, x);
        if (auto l = g.invariant(loc, x); l && val[x] > Rational(*l))
            return false;
    }
    return true;
}

} // namespace

bool environment_may_pass(const GameGraph& g, const GameState& s, std::size_t cocktail)
{
    if (!g.model.environment_may_idle || cocktail >= g.menu.size())
        return false;
    auto val = s.valuation;
    return unit_delay(g, g.location(g.state_of(s.location), cocktail), val);
}

RoundResult play_round(const GameGraph& g, const GameState& s, const RoundMove& move)
{
    RoundResult r;
    r.next = s;
    if (move.cocktail >= g.menu.size()) {
        r.outcome = RoundOutcome::IllegalMove;
        r.diagnostic = "cocktail index " + std::to_string(move.cocktail) + " is not on the menu";
        return r;
    }
    const auto v = g.state_of(s.location);
    const auto edges = environment_edges(g, s, move.cocktail);
    const bool may_pass = environment_may_pass(g, s, move.cocktail);
    if (edges.empty() && !may_pass) {
        r.outcome = RoundOutcome::Timelock;
        r.diagnostic = "no legal environment move at " + g.location_name(g.location(v, move.cocktail));
        return r;
    }
    StateId target = v;
    if (move.edge) {
        if (std::find(edges.begin(), edges.end(), *move.edge) == edges.end()) {
            r.outcome = RoundOutcome::IllegalMove;
            r.diagnostic = "edge " + std::to_string(*move.edge) + " is not enabled";
            return r;
        }
        target = g.model.edges[*move.edge].target;
        for (ClockId x = 0; x < g.model.clock_count(); ++x)
            r.next.valuation[x] = Rational(0);
    } else if (!may_pass) {
        r.outcome = RoundOutcome::IllegalMove;
        r.diagnostic = "the environment cannot pass here";
        return r;
    }
    r.next.location = g.location(target, move.cocktail);
    if (!unit_delay(g, r.next.location, r.next.valuation)) {
        r.outcome = RoundOutcome::Timelock;
        r.diagnostic = "unit delay at " + g.location_name(r.next.location) + " violates an invariant";
        return r;
    }
    if (g.sampling_clock)
        r.next.valuation[*g.sampling_clock] = Rational(1);
    return r;
}

Region region_of(std::span<const Rational> valuation, std::uint32_t bound, bool saturate)
{
    Region r;
    r.code.reserve(valuation.size());
    for (const auto& v : valuation) {
        if (v < Rational(0))
            throw Error("negative clock value " + to_string(v));
        if (v > Rational(bound)) {
            if (!saturate)
                throw UnboundedClockError("clock value " + to_string(v) + " exceeds bound " + std::to_string(bound));
            r.code.push_back(2 * static_cast<std::int64_t>(bound));
            continue;
        }
        const auto f = floor_of(v);
        r.code.push_back(Rational(f) == v ? 2 * f : 2 * f + 1);
    }
    return r;
}

Region QuotientGame::region(std::size_t index) const
{
    Region r;
    const auto n = scaled_bound.size();
    r.code.assign(n, 0);
    for (std::size_t x = n; x-- > 0;) {
        const auto radix = static_cast<std::size_t>(2 * scaled_bound[x] + 1);
        r.code[x] = static_cast<std::int64_t>(index % radix);
        index /= radix;
    }
    return r;
}

std::size_t QuotientGame::region_index(const Region& r) const
{
    std::size_t index = 0;
    for (std::size_t x = 0; x < scaled_bound.size(); ++x)
        index = index * static_cast<std::size_t>(2 * scaled_bound[x] + 1) + static_cast<std::size_t>(r.code[x]);
    return index;
}

std::size_t QuotientGame::controller_successor(std::size_t n, std::size_t j) const
{
    const auto loc = game.location(state(n), j);
    return node(loc, region_index(n), Turn::Environment);
}

std::span<const std::size_t> QuotientGame::environment_successors(std::size_t n) const
{
    const auto c = cell(n);
    return {env_target.data() + env_offset[c], env_offset[c + 1] - env_offset[c]};
}

std::span<const std::size_t> QuotientGame::environment_edges(std::size_t n) const
{
    const auto c = cell(n);
    return {env_edge.data() + env_offset[c], env_offset[c + 1] - env_offset[c]};
}

const std::set<std::string>& QuotientGame::labels(std::size_t n) const
{
    static const std::set<std::string> sink_labels{timelock_label};
    if (n == sink)
        return sink_labels;
    return game.model.labels.at(state(n));
}

Region QuotientGame::scaled_region(std::span<const Rational> valuation) const
{
    Region r;
    for (std::size_t x = 0; x < scaled_bound.size(); ++x) {
        const Rational y = valuation[x] * Rational(scale);
        if (y < Rational(0))
            throw Error("negative clock value");
        if (y >= Rational(scaled_bound[x])) {
            r.code.push_back(2 * scaled_bound[x]);
            continue;
        }
        const auto f = floor_of(y);
        r.code.push_back(Rational(f) == y ? 2 * f : 2 * f + 1);
    }
    return r;
}

std::size_t QuotientGame::controller_node(const GameState& s) const
{
    return node(s.location, region_index(scaled_region(s.valuation)), Turn::Controller);
}

std::string QuotientGame::region_text(std::size_t index) const
{
    const auto r = region(index);
    std::string s;
    for (std::size_t x = 0; x < r.code.size(); ++x) {
        if (!s.empty())
            s += ",";
        const auto& name = game.model.clocks[x];
        const auto lo = Rational(r.floor(x), scale);
        const auto hi = Rational(r.ceil(x), scale);
        if (r.code[x] == 2 * scaled_bound[x])
            s += name + ">=" + to_string(lo);
        else if (r.is_point(x))
            s += name + "=" + to_string(lo);
        else
            s += name + "=(" + to_string(lo) + "," + to_string(hi) + ")";
    }
    return s;
}

std::string QuotientGame::node_name(std::size_t n) const
{
    if (n == sink)
        return timelock_label;
    std::string s = game.location_name(location(n));
    if (!scaled_bound.empty())
        s += "@" + region_text(region_index(n));
    switch (turn(n)) {
    case Turn::Environment: s += "[env]"; break;
    case Turn::Delay: s += "[delay]"; break;
    default: break;
    }
    return s;
}

QuotientGame quotient(const GameGraph& input, const QuotientOptions& options)
{
    QuotientGame q;
    q.game = input.sampling_clock ? input : discretize(input);
    const auto& g = q.game;
    const auto& tc = g.model;
    const auto n = tc.clock_count();

    q.bound.resize(n);
    for (ClockId x = 0; x < n; ++x) {
        q.bound[x] = options.bound ? *options.bound : tc.clock_bounds.size() > x && tc.clock_bounds[x]
                                                           ? *tc.clock_bounds[x]
                                                           : tc.max_constant();
        for (const auto& e : tc.edges)
            if (e.guard.bound_on(x) > q.bound[x])
                throw UnboundedClockError("guard constant " + std::to_string(e.guard.bound_on(x)) + " on clock '" +
                                          tc.clocks[x] + "' exceeds the bound " + std::to_string(q.bound[x]));
        for (StateId v = 0; v < tc.state_count(); ++v)
            if (auto l = tc.invariant(v, x); l && *l > q.bound[x])
                throw UnboundedClockError("invariant " + std::to_string(*l) + " on clock '" + tc.clocks[x] +
                                          "' exceeds the bound " + std::to_string(q.bound[x]));
    }

    std::vector<Rational> rates;
    for (std::size_t loc = 0; loc < g.location_count(); ++loc)
        for (ClockId x = 0; x < n; ++x)
            rates.push_back(g.rate(loc, x));
    const auto lcm = lcm_of_denominators(rates);
    q.scale = options.scale.value_or(lcm);
    if (q.scale <= 0 || q.scale % lcm != 0)
        throw RegionSplitError("grid scale " + std::to_string(q.scale) +
                               " leaves fractional unit-delay increments (rate denominators need " +
                               std::to_string(lcm) + ")");

    q.scaled_bound.resize(n);
    std::size_t regions = 1;
    for (ClockId x = 0; x < n; ++x) {
        q.scaled_bound[x] = q.scale * static_cast<std::int64_t>(q.bound[x]);
        const auto radix = static_cast<std::size_t>(2 * q.scaled_bound[x] + 1);
        if (regions > options.max_nodes / radix)
            throw ExplosionError("region quotient exceeds " + std::to_string(options.max_nodes) + " nodes");
        regions *= radix;
    }
    q.regions_per_location = regions;
    const auto locations = g.location_count();
    if (locations != 0 && regions > options.max_nodes / 3 / locations)
        throw ExplosionError("region quotient exceeds " + std::to_string(options.max_nodes) + " nodes");
    const auto cells = locations * regions;
    q.sink = cells * 3;

    // Integer increment of every scaled clock per unit delay.
    std::vector<std::int64_t> step(locations * n);
    for (std::size_t loc = 0; loc < locations; ++loc)
        for (ClockId x = 0; x < n; ++x) {
            const Rational inc = g.rate(loc, x) * Rational(q.scale);
            if (inc.denominator() != 1)
                throw RegionSplitError("fractional scaled rate");
            step[loc * n + x] = inc.numerator();
        }

    auto satisfied = [&](const ClockConstraint& guard, const Region& r) {
        return std::all_of(guard.atoms.begin(), guard.atoms.end(), [&](const ClockAtom& a) {
            return r.floor(a.clock) >= q.scale * static_cast<std::int64_t>(a.bound);
        });
    };
    auto delayed = [&](std::size_t loc, const Region& r) -> std::optional<Region> {
        Region out = r;
        const auto v = g.state_of(loc);
        for (ClockId x = 0; x < n; ++x) {
            const auto j = r.floor(x) + step[loc * n + x];
            const bool point = r.is_point(x);
            if (auto l = tc.invariant(v, x)) {
                const auto limit = q.scale * static_cast<std::int64_t>(*l);
                if ((point ? j : j + 1) > limit)
                    return std::nullopt;
            }
            out.code[x] = j >= q.scaled_bound[x] ? 2 * q.scaled_bound[x] : 2 * j + (point ? 0 : 1);
        }
        return out;
    };

    q.env_offset.assign(cells + 1, 0);
    q.delay_target.assign(cells, q.sink);
    for (std::size_t loc = 0; loc < locations; ++loc) {
        const auto v = g.state_of(loc);
        const auto c = g.menu[g.cocktail_of(loc)];
        const auto j = g.cocktail_of(loc);
        for (std::size_t ri = 0; ri < regions; ++ri) {
            const auto region = q.region(ri);
            const auto cell = loc * regions + ri;
            for (std::size_t e = 0; e < tc.edges.size(); ++e) {
                const auto& edge = tc.edges[e];
                if (edge.source != v || is_inhibited(edge.inhibitors, c) || !satisfied(edge.guard, region))
                    continue;
                q.env_target.push_back(q.node(g.location(edge.target, j), 0, QuotientGame::Turn::Delay));
                q.env_edge.push_back(e);
            }
            const auto after = delayed(loc, region);
            if (tc.environment_may_idle && after) {
                q.env_target.push_back(q.node(loc, ri, QuotientGame::Turn::Delay));
                q.env_edge.push_back(QuotientGame::none);
            }
            if (q.env_offset[cell] == q.env_target.size()) {
                q.env_target.push_back(q.sink);
                q.env_edge.push_back(QuotientGame::none);
            }
            q.env_offset[cell + 1] = q.env_target.size();
            if (after)
                q.delay_target[cell] = q.node(loc, q.region_index(*after), QuotientGame::Turn::Controller);
        }
    }
    q.initial = q.node(g.initial, 0, QuotientGame::Turn::Controller);
    return q;
}

QuotientGame build_quotient(const TimedCha& tc, std::span<const Cocktail> menu, const QuotientOptions& options)
{
    return quotient(discretize(translate(tc, menu)), options);
}

namespace {

template <class Choices>
RoundKripke explore_rounds(const QuotientGame& q, Choices&& choices_at)
{
    RoundKripke rk;
    auto& k = rk.kripke;
    const std::uint32_t unseen = 0xFFFFFFFFU;
    std::vector<std::uint32_t> id(q.node_count() / 3 + 1, unseen);
    const auto sink_slot = id.size() - 1;
    std::deque<std::size_t> queue;
    auto visit = [&](std::size_t node) -> std::size_t {
        const auto slot = node == q.sink ? sink_slot : q.cell(node);
        if (id[slot] == unseen) {
            id[slot] = static_cast<std::uint32_t>(k.size());
            k.successors.emplace_back();
            k.labels.push_back(q.labels(node));
            k.names.push_back(q.node_name(node));
            rk.game_node.push_back(node);
            queue.push_back(node);
        }
        return id[slot];
    };
    k.initial = visit(q.initial);
    while (!queue.empty()) {
        const auto node = queue.front();
        queue.pop_front();
        const auto from = id[node == q.sink ? sink_slot : q.cell(node)];
        std::vector<std::size_t> succ;
        if (node == q.sink) {
            succ.push_back(from);
        } else {
            for (auto j : choices_at(node)) {
                for (auto t : q.environment_successors(q.controller_successor(node, j))) {
                    const auto next = t == q.sink ? q.sink : q.delay_target[q.cell(t)];
                    succ.push_back(visit(next));
                }
            }
        }
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        k.successors[from] = std::move(succ);
    }
    for (const auto& l : q.game.model.labels)
        k.declared.insert(l.begin(), l.end());
    k.declared.insert(timelock_label);
    return rk;
}

} // namespace

RoundKripke round_kripke(const QuotientGame& q, const Strategy* strategy)
{
    std::vector<std::size_t> all(q.menu_size());
    std::iota(all.begin(), all.end(), 0);
    return explore_rounds(q, [&](std::size_t node) -> std::vector<std::size_t> {
        if (!strategy)
            return all;
        const auto c = q.cell(node);
        if (!strategy->defined(c))
            throw PartialStrategyError("strategy has no choice at reachable node " + q.node_name(node));
        if (strategy->choice[c] >= q.menu_size())
            throw PartialStrategyError("strategy choice out of menu range at " + q.node_name(node));
        return {strategy->choice[c]};
    });
}

RoundKripke round_kripke(const QuotientGame& q, std::span<const std::size_t> menu_choice_by_state)
{
    if (menu_choice_by_state.size() != q.game.model.state_count())
        throw TherapyError("therapy must give a menu entry for every state");
    for (auto j : menu_choice_by_state)
        if (j >= q.menu_size())
            throw TherapyError("therapy cocktail is not on the menu");
    return explore_rounds(q, [&](std::size_t node) -> std::vector<std::size_t> {
        return {menu_choice_by_state[q.state(node)]};
    });
}

bool every_cycle_has_delay(const QuotientGame& q)
{
    // Kahn's algorithm over the move edges (controller and environment);
    // delay edges and the sink's self-loop are left out.
    std::vector<std::uint32_t> indegree(q.node_count(), 0);
    auto for_moves = [&](std::size_t n, auto&& f) {
        if (n == q.sink)
            return;
        switch (q.turn(n)) {
        case QuotientGame::Turn::Controller:
            for (std::size_t j = 0; j < q.menu_size(); ++j)
                f(q.controller_successor(n, j));
            break;
        case QuotientGame::Turn::Environment:
            for (auto t : q.environment_successors(n))
                f(t);
            break;
        case QuotientGame::Turn::Delay: break;
        }
    };
    for (std::size_t n = 0; n < q.node_count(); ++n)
        for_moves(n, [&](std::size_t t) { ++indegree[t]; });
    std::vector<std::size_t> stack;
    for (std::size_t n = 0; n < q.node_count(); ++n)
        if (indegree[n] == 0)
            stack.push_back(n);
    std::size_t removed = 0;
    while (!stack.empty()) {
        const auto n = stack.back();
        stack.pop_back();
        ++removed;
        for_moves(n, [&](std::size_t t) {
            if (--indegree[t] == 0)
                stack.push_back(t);
        });
    }
    return removed == q.node_count();
}

} // namespace chakit
