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
#include "chakit/model_io.hpp"
#include "chakit/timed.hpp"
#include "support/generators.hpp"

using namespace chakit;
using namespace chakit::testing;

namespace {

TimedCha two_clock()
{
    TimedCha tc;
    tc.drugs = DrugUniverse({"d1", "d2", "Avastin"});
    tc.states = {"v", "w"};
    tc.labels = {{"v"}, {"w"}};
    tc.clocks = {"x", "y"};
    tc.normalize_tables();
    tc.edges.push_back(TimedEdge{0, parse_constraint("x >= 4 && y >= 7", tc.clocks), 1, {}, false});
    tc.edges.push_back(TimedEdge{0, parse_constraint("x >= 4", tc.clocks), 1, {}, false});
    tc.edges.push_back(TimedEdge{0, parse_constraint("y >= 7", tc.clocks), 0, {}, false});
    tc.edges.push_back(TimedEdge{1, {}, 1, {}, false});
    tc.rates[{0, 0, 0}] = Rational(1, 2);
    tc.rates[{0, 1, 0}] = Rational(1, 2);
    tc.rates[{0, 2, 0}] = Rational(1, 2);
    tc.rates[{0, 1, 1}] = Rational(0);
    return tc;
}

TimedState at(StateId v, std::int64_t x, std::int64_t y)
{
    return TimedState{v, {Rational(x), Rational(y)}};
}

// H1 -> H2 at x >= 4, H1 -> AntiHallmark at y >= 7, rate 2 on y under d.
TimedCha anti_hallmark_literal()
{
    TimedCha tc;
    tc.drugs = DrugUniverse({"d"});
    tc.states = {"H1", "H2", "AntiHallmark"};
    tc.labels = {{"H1"}, {"H2"}, {"AntiHallmark"}};
    tc.clocks = {"x", "y"};
    tc.normalize_tables();
    tc.edges.push_back(TimedEdge{0, parse_constraint("x >= 4", tc.clocks), 1, {}, false});
    tc.edges.push_back(TimedEdge{0, parse_constraint("y >= 7", tc.clocks), 2, {}, false});
    tc.edges.push_back(TimedEdge{1, {}, 1, {}, false});
    tc.edges.push_back(TimedEdge{2, {}, 2, {}, false});
    tc.rates[{0, 0, 1}] = Rational(2);
    return tc;
}

} // namespace

TEST_CASE("cocktail rates multiply")
{
    const auto tc = two_clock();
    CHECK(cocktail_rate(tc, 0, Cocktail(0b011), 0) == Rational(1, 4));
    CHECK(cocktail_rate(tc, 0, Cocktail(0b111), 0) == Rational(1, 8));
    CHECK(cocktail_rate(tc, 0, Cocktail{}, 0) == Rational(1));
    CHECK(cocktail_rate(tc, 0, Cocktail(0b010), 1) == Rational(0));
    CHECK(cocktail_rate(tc, 1, Cocktail(0b111), 0) == Rational(1));
    CHECK_THROWS_AS(static_cast<void>(cocktail_rate(tc, 7, Cocktail{}, 0)), UnknownIdError);
}

TEST_CASE("delay advances by rate and respects invariants")
{
    auto tc = two_clock();
    const auto avastin = Cocktail{}.with(2);
    const auto s = delay(tc, at(0, 0, 0), Rational(2), avastin);
    CHECK(s.valuation == ClockValuation{Rational(1), Rational(2)});
    const auto t = delay(tc, at(0, 0, 0), Rational(3, 7), Cocktail{});
    CHECK(t.valuation == ClockValuation{Rational(3, 7), Rational(3, 7)});

    tc.invariants[0][1] = 3;
    CHECK_NOTHROW(delay(tc, at(0, 0, 0), Rational(3), Cocktail{}));
    try {
        delay(tc, at(0, 0, 0), Rational(7, 2), Cocktail{});
        FAIL("expected an invariant violation");
    } catch (const InvariantViolationError& e) {
        CHECK(std::string(e.what()).find('y') != std::string::npos);
    }
    // a stopped clock never violates
    CHECK_NOTHROW(delay(tc, at(0, 0, 0), Rational(10), Cocktail{}.with(1).with(0)));
    CHECK_THROWS_AS(delay(tc, at(0, 0, 0), Rational(0), Cocktail{}), Error);
}

TEST_CASE("fire checks guards and resets every clock")
{
    const auto tc = two_clock();
    CHECK(fire(tc, at(0, 4, 0), 1) == at(1, 0, 0));
    CHECK(fire(tc, at(0, 5, 7), 0) == at(1, 0, 0));
    const TimedState almost{0, {Rational(39, 10), Rational(0)}};
    CHECK_THROWS_AS(fire(tc, almost, 1), GuardUnsatisfiedError);
    try {
        fire(tc, at(0, 3, 8), 0);
    } catch (const GuardUnsatisfiedError& e) {
        CHECK(std::string(e.what()).find("x >= 4") != std::string::npos);
    }

    auto inhibited = tc;
    inhibited.edges[1].inhibitors = Cocktail{}.with(0);
    CHECK_THROWS_AS(fire(inhibited, at(0, 4, 0), 1, Cocktail{}.with(0)), GuardUnsatisfiedError);
}

TEST_CASE("enabled edges")
{
    const auto tc = two_clock();
    CHECK(enabled_edges(tc, at(0, 4, 7)) == std::vector<std::size_t>{0, 1, 2});
    CHECK(enabled_edges(tc, at(0, 4, 0)) == std::vector<std::size_t>{1});
    CHECK(enabled_edges(tc, at(0, 0, 0)).empty());

    Rng rng(91);
    std::vector<std::string> clocks{"a", "b", "c"};
    for (int round = 0; round < 2000; ++round) {
        ClockConstraint g;
        for (ClockId x = 0; x < 3; ++x)
            if (coin(rng))
                g.atoms.push_back(ClockAtom{x, static_cast<std::uint32_t>(uniform(rng, 0, 4))});
        ClockValuation val;
        for (int x = 0; x < 3; ++x)
            val.push_back(Rational(static_cast<std::int64_t>(uniform(rng, 0, 20)), 4));
        bool expected = true;
        for (const auto& a : g.atoms)
            expected = expected && val[a.clock] >= Rational(a.bound);
        CHECK(g.satisfied_by(val) == expected);
        CHECK(g.failing_atoms(val).empty() == expected);
        // upward closure
        auto bigger = val;
        for (auto& v : bigger)
            v += Rational(static_cast<std::int64_t>(uniform(rng, 0, 8)), 4);
        if (expected)
            CHECK(g.satisfied_by(bigger));
        CHECK(parse_constraint(format_constraint(g, clocks), clocks) == g);
    }
}

TEST_CASE("constraint parser")
{
    const std::vector<std::string> clocks{"x", "y"};
    CHECK(parse_constraint("true", clocks).atoms.empty());
    CHECK(parse_constraint("", clocks).atoms.empty());
    CHECK(parse_constraint("x>=3 and y >= 0", clocks).atoms.size() == 2);
    CHECK(parse_constraint("x >= 3 ∧ y >= 7", clocks).atoms.size() == 2);
    CHECK_THROWS_AS(parse_constraint("x <= 3", clocks), ParseError);
    CHECK_THROWS_AS(parse_constraint("x >= -1", clocks), ParseError);
    CHECK_THROWS_AS(parse_constraint("x >= 1.5", clocks), ParseError);
    CHECK_THROWS_AS(parse_constraint("z >= 1", clocks), Error);
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK(parse_rational("6/4") == Rational(3, 2));
}

TEST_CASE("delay is additive and rate monotone")
{
    Rng rng(97);
    for (int round = 0; round < 1000; ++round) {
        auto tc = two_clock();
        const Cocktail c(uniform(rng, 0, 7));
        const Rational d1(static_cast<std::int64_t>(uniform(rng, 1, 12)), static_cast<std::int64_t>(uniform(rng, 1, 6)));
        const Rational d2(static_cast<std::int64_t>(uniform(rng, 1, 12)), static_cast<std::int64_t>(uniform(rng, 1, 6)));
        const TimedState s{0, {Rational(static_cast<std::int64_t>(uniform(rng, 0, 3))), Rational(0)}};
        CHECK(delay(tc, delay(tc, s, d1, c), d2, c) == delay(tc, s, d1 + d2, c));
        // d1 and d2 have rate <= 1 on every clock
        const auto extra = static_cast<DrugId>(uniform(rng, 0, 2));
        const auto with = delay(tc, s, d1, c.with(extra));
        const auto without = delay(tc, s, d1, c);
        for (std::size_t x = 0; x < 2; ++x)
            CHECK(with.valuation[x] <= without.valuation[x]);
    }
}

TEST_CASE("durations")
{
    TimedRun r{{DelayStep{Rational(1), {}}, FireStep{0}, DelayStep{Rational(2), {}}}, std::nullopt};
    CHECK(duration(r) == Rational(3));
    CHECK(duration(TimedRun{}) == Rational(0));
    CHECK(duration(r, 1) == Rational(1));

    Rng rng(101);
    for (int round = 0; round < 500; ++round) {
        TimedRun run;
        Rational expected(0);
        const auto n = uniform(rng, 0, 10);
        for (std::size_t i = 0; i < n; ++i) {
            if (coin(rng)) {
                const Rational d(static_cast<std::int64_t>(uniform(rng, 1, 9)), static_cast<std::int64_t>(uniform(rng, 1, 5)));
                run.steps.push_back(DelayStep{d, {}});
                expected += d;
            } else {
                run.steps.push_back(FireStep{uniform(rng, 0, 3)});
            }
        }
        CHECK(duration(run) == expected);
    }
}

TEST_CASE("inhibitor emulation")
{
    TimedCha tc;
    tc.drugs = DrugUniverse({"d"});
    tc.states = {"v", "w"};
    tc.labels = {{"v"}, {"w"}};
    tc.edges = {TimedEdge{0, {}, 1, {}, false}, TimedEdge{0, {}, 0, {}, false}, TimedEdge{1, {}, 1, {}, false}};
    tc.normalize_tables();
    const auto e = emulate_inhibitor_edge(tc, 0, 1, 0, 1);
    REQUIRE(e.clock_count() == 1);
    CHECK(e.clocks[0] == "x_d_w");
    CHECK(e.rate(0, 0, 0) == Rational(0));
    const auto d = Cocktail{}.with(0);

    // d from time 0: the clock never moves
    TimedState s = initial_timed_state(e);
    for (int i = 0; i < 50; ++i) {
        s = delay(e, s, Rational(1), d);
        const auto en = enabled_edges(e, s);
        CHECK(std::count(en.begin(), en.end(), 0) == 0);
    }
    // never given: enabled after z time units
    const auto early = enabled_edges(e, delay(e, initial_timed_state(e), Rational(1, 2), {}));
    CHECK(std::count(early.begin(), early.end(), 0) == 0);
    const auto late = delay(e, initial_timed_state(e), Rational(1), {});
    CHECK(enabled_edges(e, late).front() == 0);
    // advanced too far: giving d afterwards does not disable it
    const auto after = delay(e, late, Rational(5), d);
    CHECK(enabled_edges(e, after).front() == 0);

    CHECK_THROWS_AS(emulate_inhibitor_edge(tc, 1, 0, 0, 1), EdgeNotFoundError);
    CHECK_THROWS_AS(emulate_inhibitor_edge(tc, 0, 1, 4, 1), UnknownIdError);
}

TEST_CASE("timed executions against therapies")
{
    const auto tc = two_clock();
    const auto d1 = Cocktail{}.with(0);
    const std::vector<Cocktail> by_state{d1, Cocktail{}};
    const auto th = TimedTherapy::memoryless(by_state);
    TimedRun ok{{DelayStep{Rational(8), d1}, FireStep{1}, DelayStep{Rational(1), {}}}, std::nullopt};
    CHECK(check_timed_execution(tc, ok, th).ok);

    auto switching = th;
    switching.switches = {{{Rational(3), Cocktail{}}}, {}};
    const auto r = check_timed_execution(tc, ok, switching);
    CHECK_FALSE(r.ok);
    CHECK(r.step == 0);
    TimedRun split{{DelayStep{Rational(3), d1}, DelayStep{Rational(3), {}}, FireStep{1}}, std::nullopt};
    CHECK(check_timed_execution(tc, split, switching).ok);

    TimedRun bad_guard{{DelayStep{Rational(1), d1}, FireStep{1}}, std::nullopt};
    const auto g = check_timed_execution(tc, bad_guard, th);
    CHECK_FALSE(g.ok);
    CHECK(g.step == 1);
}

TEST_CASE("unit-delay runs agree with a step-by-step simulator")
{
    Rng rng(103);
    int checked = 0;
    for (int round = 0; round < 400; ++round) {
        auto tc = random_timed_cha(rng, TimedParams{});
        for (auto& e : tc.edges)
            e.inhibitors = {};
        if (!validate(tc).ok())
            continue;
        std::vector<Cocktail> by_state;
        for (std::size_t v = 0; v < tc.state_count(); ++v)
            by_state.push_back(random_subset(rng, tc.drugs.size()));
        const auto th = TimedTherapy::memoryless(by_state);
        TimedRun run;
        TimedState s = initial_timed_state(tc);
        std::vector<TimedState> trace{s};
        for (int step = 0; step < 12; ++step) {
            const auto c = by_state[s.state];
            const auto fired = enabled_edges(tc, s, c);
            if (!fired.empty() && coin(rng)) {
                const auto e = fired[uniform(rng, 0, fired.size() - 1)];
                run.steps.push_back(FireStep{e});
                s = fire(tc, s, e, c);
            } else {
                try {
                    s = delay(tc, s, Rational(1), c);
                } catch (const InvariantViolationError&) {
                    break;
                }
                run.steps.push_back(DelayStep{Rational(1), c});
            }
            trace.push_back(s);
        }
        CHECK(check_timed_execution(tc, run, th).ok);
        CHECK(replay(tc, run) == trace);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("validated models never get stuck")
{
    Rng rng(107);
    int models = 0;
    for (int round = 0; round < 600 && models < 150; ++round) {
        auto tc = random_timed_cha(rng, TimedParams{});
        for (auto& e : tc.edges)
            e.inhibitors = {};
        if (!validate(tc).ok())
            continue;
        ++models;
        for (int walk = 0; walk < 10; ++walk) {
            TimedState s = initial_timed_state(tc);
            for (int step = 0; step < 25; ++step) {
                const Cocktail c = random_subset(rng, tc.drugs.size());
                std::optional<Rational> room;
                for (ClockId x = 0; x < tc.clock_count(); ++x) {
                    const auto limit = tc.invariant(s.state, x);
                    const auto rate = cocktail_rate(tc, s.state, c, x);
                    if (!limit || rate == Rational(0))
                        continue;
                    const auto r = (Rational(*limit) - s.valuation[x]) / rate;
                    room = room ? std::min(*room, r) : r;
                }
                const auto enabled = enabled_edges(tc, s);
                if (room && *room == Rational(0)) {
                    REQUIRE_FALSE(enabled.empty());
                    s = fire(tc, s, enabled[uniform(rng, 0, enabled.size() - 1)]);
                    continue;
                }
                if (!enabled.empty() && coin(rng, 0.3)) {
                    s = fire(tc, s, enabled[uniform(rng, 0, enabled.size() - 1)]);
                    continue;
                }
                Rational d = room ? (coin(rng, 0.5) ? *room : *room * Rational(1, 2))
                                  : Rational(static_cast<std::int64_t>(uniform(rng, 1, 6)), 2);
                s = delay(tc, s, d, c);
            }
        }
    }
    CHECK(models >= 50);
}

TEST_CASE("invariant-exit rule is syntactic")
{
    TimedCha tc;
    tc.states = {"a", "b"};
    tc.labels = {{"a"}, {"b"}};
    tc.clocks = {"x", "y"};
    tc.normalize_tables();
    tc.invariants[0][0] = 3;
    tc.edges = {TimedEdge{0, parse_constraint("x >= 3 && y >= 1", tc.clocks), 1, {}, false},
                TimedEdge{1, {}, 1, {}, false}};
    auto r = validate(tc);
    REQUIRE_FALSE(r.ok());
    CHECK(r.errors()[0]->kind == Finding::Kind::Invariant);
    tc.edges[0].guard = parse_constraint("x >= 2 && y >= 0", tc.clocks);
    CHECK(validate(tc).ok());
    tc.edges[0].guard = parse_constraint("x >= 4", tc.clocks);
    CHECK_FALSE(validate(tc).ok());
    tc.edges[0].guard = parse_constraint("x >= 3", tc.clocks);
    CHECK(validate(tc).ok());
    CHECK_FALSE(validate(tc, 2).ok());
}

TEST_CASE("anti-hallmark guard constant 7 is reached before x = 4 iff d starts within one time unit")
{
    const auto tc = anti_hallmark_literal();
    const auto d = Cocktail{}.with(0);
    for (std::int64_t num = 0; num <= 16; ++num) {
        const Rational t0(num, 4);
        TimedState s = initial_timed_state(tc);
        if (t0 > Rational(0))
            s = delay(tc, s, t0, {});
        // y(t) = t0 + 2 (t - t0) hits 7 at t = (7 + t0) / 2
        const Rational hit = (Rational(7) + t0) / Rational(2);
        const bool expected = t0 <= Rational(1);
        CHECK((hit <= Rational(4)) == expected);
        if (hit > t0) {
            const auto before = delay(tc, s, hit - t0 - Rational(1, 100), d);
            const auto none = enabled_edges(tc, before);
            CHECK(std::count(none.begin(), none.end(), 1) == 0);
            const auto reached = delay(tc, s, hit - t0, d);
            CHECK(reached.valuation[1] == Rational(7));
            const auto en = enabled_edges(tc, reached);
            CHECK(std::count(en.begin(), en.end(), 1) == 1);
            // at that instant x = hit, so H2 is not yet forced iff hit <= 4
            CHECK((reached.valuation[0] <= Rational(4)) == expected);
        }
    }
}

TEST_CASE("shipped timed models validate and Avastin halves the clock")
{
    const auto fig2 = load_model(std::string(CHAKIT_MODELS_DIR) + "/fig2.json");
    const auto ssg = fig2.model.state_at("SSG");
    const auto avastin = Cocktail{}.with(fig2.model.drugs.at("Avastin"));
    const auto x = fig2.model.clock_at("x");
    CHECK(cocktail_rate(fig2.model, ssg, avastin, x) == Rational(1, 2));
    TimedState s{ssg, ClockValuation(fig2.model.clock_count(), Rational(0))};
    CHECK(delay(fig2.model, s, Rational(2), avastin).valuation[x] == Rational(1));
    const auto fig3 = load_model(std::string(CHAKIT_MODELS_DIR) + "/fig3.json");
    CHECK(fig3.report.ok());
}

TEST_CASE("non-zeno lassos")
{
    TimedCha tc;
    tc.states = {"a"};
    tc.labels = {{"a"}};
    tc.clocks = {"x"};
    tc.edges = {TimedEdge{0, {}, 0, {}, false}};
    tc.normalize_tables();
    TimedRun good{{DelayStep{Rational(1), {}}, FireStep{0}}, 0};
    CHECK(is_non_zeno_lasso(tc, good));
    TimedRun zeno{{DelayStep{Rational(1, 2), {}}, FireStep{0}}, 0};
    CHECK_FALSE(is_non_zeno_lasso(tc, zeno));
    TimedRun open{{DelayStep{Rational(1), {}}}, 0};
    CHECK_FALSE(is_non_zeno_lasso(tc, open));
}
