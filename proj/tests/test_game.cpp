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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chakit/error.hpp"
#include "chakit/game.hpp"
#include "chakit/model_io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <set>

using namespace chakit;
using namespace chakit::testing;

namespace {

TimedCha one_clock(Rational rate = Rational(1))
{
    TimedCha tc;
    tc.drugs = DrugUniverse({"d"});
    tc.states = {"v", "w"};
    tc.labels = {{"v"}, {"w"}};
    tc.clocks = {"x"};
    tc.normalize_tables();
    tc.clock_bounds = {2};
    tc.edges = {TimedEdge{0, parse_constraint("x >= 2", tc.clocks), 1, {}, false}, TimedEdge{1, {}, 1, {}, false}};
    tc.rates[{0, 0, 0}] = rate;
    return tc;
}

std::vector<Cocktail> full_menu(std::size_t drugs)
{
    std::vector<Cocktail> menu;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << drugs); ++b)
        menu.push_back(Cocktail(b));
    return menu;
}

std::set<std::string> atoms_of(const TimedCha& tc)
{
    std::set<std::string> out;
    for (const auto& l : tc.labels)
        out.insert(l.begin(), l.end());
    return out;
}

} // namespace

TEST_CASE("translate builds one location per state and menu entry")
{
    const auto tc = one_clock();
    const auto g = translate(tc, full_menu(1));
    CHECK(g.location_count() == 4);
    std::size_t controllable = 0;
    std::size_t uncontrollable = 0;
    for (const auto& e : g.edges) {
        if (e.kind == GameEdge::Kind::Controllable) {
            ++controllable;
            CHECK(g.state_of(e.from) == g.state_of(e.to));
            CHECK(e.from != e.to);
            CHECK(e.guard.atoms.empty());
            CHECK_FALSE(e.resets_clocks);
        } else {
            ++uncontrollable;
            CHECK(g.cocktail_of(e.from) == g.cocktail_of(e.to));
            CHECK(e.guard == tc.edges[e.model_edge].guard);
            CHECK(e.resets_clocks);
        }
    }
    CHECK(controllable == 2 * 2);
    CHECK(uncontrollable == 2 * tc.edges.size());
    CHECK(g.rate(g.location(0, 1), 0) == Rational(1));

    const auto bare = translate(tc, std::vector<Cocktail>{Cocktail{}});
    CHECK(bare.location_count() == tc.state_count());
    std::size_t bare_edges = 0;
    for (const auto& e : bare.edges) {
        CHECK(e.kind == GameEdge::Kind::Uncontrollable);
        CHECK(tc.edges[e.model_edge].source == bare.state_of(e.from));
        CHECK(tc.edges[e.model_edge].target == bare.state_of(e.to));
        ++bare_edges;
    }
    CHECK(bare_edges == tc.edges.size());

    CHECK_THROWS_AS(translate(tc, std::vector<Cocktail>{Cocktail{}, Cocktail(0b10)}), UnknownIdError);
}

TEST_CASE("controllable switch edges number k(k-1) per state")
{
    Rng rng(131);
    for (int round = 0; round < 50; ++round) {
        const auto tc = random_timed_cha(rng, TimedParams{4, 0, 1, 2, 2, 3, 0.8});
        auto menu = full_menu(tc.drugs.size());
        const auto k = uniform(rng, 1, menu.size());
        menu.resize(k);
        const auto g = translate(tc, menu);
        std::vector<std::size_t> per_state(tc.state_count(), 0);
        for (const auto& e : g.edges)
            if (e.kind == GameEdge::Kind::Controllable)
                ++per_state[g.state_of(e.from)];
        for (auto c : per_state)
            CHECK(c == k * (k - 1));
        CHECK(g.location_count() == tc.state_count() * k);
    }
}

TEST_CASE("discretize adds the sampling clock")
{
    const auto tc = one_clock(Rational(1, 2));
    const auto g = discretize(translate(tc, full_menu(1)));
    REQUIRE(g.sampling_clock.has_value());
    const auto s = *g.sampling_clock;
    CHECK(g.clocks[s] == "x_sample");
    for (std::size_t loc = 0; loc < g.location_count(); ++loc) {
        CHECK(g.invariant(loc, s) == std::optional<std::uint32_t>(1));
        CHECK(g.rate(loc, s) == Rational(1));
    }
    for (const auto& e : g.edges) {
        CHECK(std::count(e.guard.atoms.begin(), e.guard.atoms.end(), ClockAtom{s, 1}) == 1);
        CHECK(e.resets_sampling);
        if (e.kind == GameEdge::Kind::Uncontrollable)
            for (const auto& a : tc.edges[e.model_edge].guard.atoms)
                CHECK(std::count(e.guard.atoms.begin(), e.guard.atoms.end(), a) == 1);
    }
}

TEST_CASE("k sampling rounds take exactly k time units")
{
    TimedCha tc;
    tc.states = {"a"};
    tc.labels = {{"a"}};
    tc.clocks = {"x"};
    tc.normalize_tables();
    tc.clock_bounds = {100};
    tc.edges = {TimedEdge{0, parse_constraint("x >= 100", tc.clocks), 0, {}, false}};
    const auto g = discretize(translate(tc, std::vector<Cocktail>{Cocktail{}}));
    auto s = initial_game_state(g);
    CHECK(s.valuation[*g.sampling_clock] == Rational(1));
    for (int k = 1; k <= 20; ++k) {
        const auto r = play_round(g, s, RoundMove{0, std::nullopt});
        REQUIRE(r.outcome == RoundOutcome::Ok);
        s = r.next;
        CHECK(s.valuation[0] == Rational(k));
        CHECK(s.valuation[*g.sampling_clock] == Rational(1));
    }
}

TEST_CASE("play_round rejects illegal moves and detects timelocks")
{
    auto tc = one_clock();
    tc.invariants[0][0] = 2;
    const auto g = discretize(translate(tc, full_menu(1)));
    auto s = initial_game_state(g);
    CHECK(play_round(g, s, RoundMove{0, 0}).outcome == RoundOutcome::IllegalMove);
    s = play_round(g, s, RoundMove{0, std::nullopt}).next;
    s = play_round(g, s, RoundMove{0, std::nullopt}).next;
    CHECK(s.valuation[0] == Rational(2));
    CHECK_FALSE(environment_may_pass(g, s, 0));
    CHECK(environment_edges(g, s, 0) == std::vector<std::size_t>{0});
    const auto r = play_round(g, s, RoundMove{1, 0});
    CHECK(r.outcome == RoundOutcome::Ok);
    CHECK(g.state_of(r.next.location) == 1);
    CHECK(g.cocktail_of(r.next.location) == 1);

    TimedCha stuck;
    stuck.states = {"a", "b"};
    stuck.labels = {{"a"}, {"b"}};
    stuck.clocks = {"x"};
    stuck.normalize_tables();
    stuck.invariants[1][0] = 1;
    stuck.rates.clear();
    stuck.drugs = DrugUniverse({"d"});
    stuck.rates[{1, 0, 0}] = Rational(2);
    stuck.edges = {TimedEdge{0, {}, 1, {}, false}, TimedEdge{1, parse_constraint("x >= 1", stuck.clocks), 0, {}, false}};
    stuck.normalize_tables();
    const auto sg = discretize(translate(stuck, full_menu(1)));
    // entering b under d, the first unit delay pushes x to 2 > 1
    const auto t = play_round(sg, initial_game_state(sg), RoundMove{1, 0});
    CHECK(t.outcome == RoundOutcome::Timelock);
}

TEST_CASE("region_of examples and properties")
{
    const std::vector<Rational> a{Rational(3, 2), Rational(2)};
    const std::vector<Rational> b{Rational(17, 10), Rational(2)};
    CHECK(region_of(a, 3) == region_of(b, 3));
    CHECK(region_of(std::vector<Rational>{Rational(1)}, 3) != region_of(std::vector<Rational>{Rational(3, 2)}, 3));
    CHECK(region_of(std::vector<Rational>{Rational(3, 2)}, 3).code == std::vector<std::int64_t>{3});
    CHECK(region_of(std::vector<Rational>{Rational(9)}, 3).code == std::vector<std::int64_t>{6});
    CHECK_THROWS_AS(region_of(std::vector<Rational>{Rational(9)}, 3, false), UnboundedClockError);

    Rng rng(137);
    for (int round = 0; round < 3000; ++round) {
        const auto n = uniform(rng, 1, 3);
        const auto m = static_cast<std::uint32_t>(uniform(rng, 1, 4));
        auto gen = [&] {
            std::vector<Rational> v;
            for (std::size_t x = 0; x < n; ++x)
                v.push_back(Rational(static_cast<std::int64_t>(uniform(rng, 0, 4 * m)), 4));
            return v;
        };
        const auto u = gen();
        const auto v = gen();
        const auto ru = region_of(u, m);
        const auto rv = region_of(v, m);
        CHECK(ru == region_of(u, m));
        CHECK((ru == rv) == (rv == ru));
        for (std::size_t x = 0; x < n; ++x) {
            CHECK(ru.floor(x) <= ru.ceil(x));
            CHECK(ru.is_point(x) == (ru.floor(x) == ru.ceil(x)));
            CHECK(ru.ceil(x) <= static_cast<std::int64_t>(m));
        }
        if (ru == rv) {
            for (int g = 0; g < 5; ++g) {
                ClockConstraint c;
                for (ClockId x = 0; x < n; ++x)
                    if (coin(rng))
                        c.atoms.push_back(ClockAtom{x, static_cast<std::uint32_t>(uniform(rng, 0, m))});
                CHECK(c.satisfied_by(u) == c.satisfied_by(v));
            }
        }
    }
}

TEST_CASE("region count per location is (2m+1)^n")
{
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::uint32_t m = 1; m <= 4; ++m) {
            TimedCha tc;
            tc.states = {"a"};
            tc.labels = {{"a"}};
            for (std::size_t x = 0; x < n; ++x)
                tc.clocks.push_back("c" + std::to_string(x));
            tc.normalize_tables();
            tc.edges = {TimedEdge{0, {}, 0, {}, false}};
            const auto q = build_quotient(tc, std::vector<Cocktail>{Cocktail{}}, QuotientOptions{m, std::nullopt});
            std::size_t expected = 1;
            for (std::size_t x = 0; x < n; ++x)
                expected *= 2 * m + 1;
            CHECK(q.regions_per_location == expected);

            // exhaustive: every grid point of step 1/2 up to m + 1
            std::set<Region> seen;
            std::vector<std::int64_t> digits(n, 0);
            while (true) {
                std::vector<Rational> val;
                for (auto d : digits)
                    val.push_back(Rational(d, 2));
                seen.insert(region_of(val, m));
                std::size_t i = 0;
                while (i < n && ++digits[i] > 2 * static_cast<std::int64_t>(m) + 2)
                    digits[i++] = 0;
                if (i == n)
                    break;
            }
            CHECK(seen.size() == expected);
            for (const auto& r : seen)
                CHECK(q.region(q.region_index(r)) == r);
        }
}

TEST_CASE("quotient delay chains")
{
    {
        auto tc = one_clock();
        tc.drugs = DrugUniverse();
        tc.rates.clear();
        const auto q = build_quotient(tc, std::vector<Cocktail>{Cocktail{}});
        CHECK(q.scale == 1);
        std::size_t n = q.initial;
        std::vector<std::string> seen{q.region_text(q.region_index(n))};
        for (int i = 0; i < 3; ++i) {
            const auto env = q.controller_successor(n, 0);
            const auto succ = q.environment_successors(env);
            const auto edges = q.environment_edges(env);
            std::size_t pass = QuotientGame::none;
            for (std::size_t k = 0; k < succ.size(); ++k)
                if (edges[k] == QuotientGame::none)
                    pass = succ[k];
            if (pass == QuotientGame::none)
                break;
            n = q.delay_target[pass / 3];
            seen.push_back(q.region_text(q.region_index(n)));
        }
        CHECK(seen == std::vector<std::string>{"x=0", "x=1", "x>=2", "x>=2"});
    }
    {
        const auto tc = one_clock(Rational(1, 2));
        const auto q = build_quotient(tc, full_menu(1));
        CHECK(q.scale == 2);
        const auto env = q.controller_successor(q.initial, 1);
        const auto succ = q.environment_successors(env);
        const auto edges = q.environment_edges(env);
        REQUIRE(succ.size() == 1);
        CHECK(edges[0] == QuotientGame::none);
        const auto next = q.delay_target[succ[0] / 3];
        CHECK(q.region_text(q.region_index(next)) == "x=1/2");
        const std::vector<Rational> half{Rational(1, 2)};
        CHECK(region_of(half, 2).code == std::vector<std::int64_t>{1});
        CHECK(q.scaled_region(half) == q.region(q.region_index(next)));
    }
}

TEST_CASE("quotient option errors")
{
    const auto tc = one_clock(Rational(1, 3));
    CHECK_THROWS_AS(build_quotient(tc, full_menu(1), QuotientOptions{1, std::nullopt}), UnboundedClockError);
    CHECK_THROWS_AS(build_quotient(tc, full_menu(1), QuotientOptions{std::nullopt, 2}), RegionSplitError);
    CHECK_NOTHROW(build_quotient(tc, full_menu(1), QuotientOptions{std::nullopt, 6}));
    QuotientOptions tiny;
    tiny.max_nodes = 10;
    CHECK_THROWS_AS(build_quotient(tc, full_menu(1), tiny), ExplosionError);
}

TEST_CASE("quotient CTL verdicts equal the concrete sampled graph")
{
    Rng rng(139);
    int compared = 0;
    for (int model = 0; model < 40; ++model) {
        const auto tc = random_timed_cha(rng, TimedParams{});
        const auto menu = canonical_menu(full_menu(tc.drugs.size()));
        QuotientGame q;
        try {
            q = build_quotient(tc, menu);
        } catch (const Error&) {
            continue;
        }
        std::vector<std::uint32_t> bound(tc.clock_count(), *tc.clock_bounds[0]);
        ConcreteGame concrete(tc, menu, bound);
        auto ck = concrete.round_graph();
        auto rk = round_kripke(q);
        ck.declared.insert({"p", "q"});
        rk.kripke.declared.insert({"p", "q"});
        std::vector<std::string> atoms{"p", "q", "timelock"};
        for (int f = 0; f < 10; ++f) {
            const auto formula = random_ctl(rng, 3, atoms, 7);
            CAPTURE(to_string(*formula));
            CHECK(model_check(rk.kripke, *formula).initial == model_check(ck, *formula).initial);
            ++compared;
        }
        // under a fixed therapy as well
        std::vector<std::size_t> choice;
        for (std::size_t v = 0; v < tc.state_count(); ++v)
            choice.push_back(uniform(rng, 0, menu.size() - 1));
        auto fixed_c = concrete.round_graph([&](StateId v) { return choice[v]; });
        auto fixed_q = round_kripke(q, choice);
        fixed_c.declared.insert({"p", "q"});
        fixed_q.kripke.declared.insert({"p", "q"});
        for (int f = 0; f < 3; ++f) {
            const auto formula = random_ctl(rng, 3, atoms, 7);
            CHECK(model_check(fixed_q.kripke, *formula).initial == model_check(fixed_c, *formula).initial);
        }
        CHECK(every_cycle_has_delay(q));
    }
    CHECK(compared >= 300);
}

TEST_CASE("translation preserves reachable base states")
{
    Rng rng(149);
    for (int model = 0; model < 40; ++model) {
        const auto tc = random_timed_cha(rng, TimedParams{4, 1, 2, 2, 2, 2, 0.8});
        const auto menu = canonical_menu(full_menu(tc.drugs.size()));
        const auto q = build_quotient(tc, menu);
        ConcreteGame concrete(tc, menu, std::vector<std::uint32_t>(tc.clock_count(), *tc.clock_bounds[0]));
        concrete.round_graph();
        std::set<StateId> expected;
        for (auto n : concrete.round_nodes())
            expected.insert(concrete.node(n).state);
        const auto rk = round_kripke(q);
        std::set<StateId> got;
        for (auto n : rk.game_node)
            if (n != q.sink)
                got.insert(q.state(n));
        CHECK(got == expected);
    }
}

TEST_CASE("shipped models build quotients without Zeno cycles")
{
    for (const auto* name : {"fig1.json", "fig2.json", "fig3.json"}) {
        const auto file = load_model(std::string(CHAKIT_MODELS_DIR) + "/" + name);
        const auto q = build_quotient(file.model, file.default_menu());
        CHECK(every_cycle_has_delay(q));
        CHECK(q.node_count() > 1);
    }
}
