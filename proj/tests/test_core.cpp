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
#include "chakit/execute.hpp"
#include "chakit/model.hpp"
#include "chakit/therapy.hpp"
#include "support/generators.hpp"

#include <set>

using namespace chakit;
using namespace chakit::testing;

namespace {

Cha fig1_like()
{
    return ChaBuilder()
        .drug("Avastin")
        .state("Normal")
        .state("SSG")
        .state("IAG")
        .state("Ang")
        .state("LRP")
        .state("EvAp")
        .state("M")
        .edge("Normal", "SSG")
        .edge("Normal", "IAG")
        .edge("SSG", "Ang", {"Avastin"})
        .edge("IAG", "Ang", {"Avastin"})
        .edge("SSG", "Normal")
        .edge("IAG", "Normal")
        .edge("Ang", "LRP")
        .edge("Ang", "EvAp")
        .edge("LRP", "EvAp")
        .edge("LRP", "M")
        .edge("EvAp", "M")
        .initial("Normal")
        .implicit_self_loops()
        .build();
}

std::vector<StateId> filter_oracle(const Cha& cha, StateId v, Cocktail c)
{
    std::set<StateId> out;
    for (const auto& e : cha.edges)
        if (e.source == v && (e.inhibitors.bits() & c.bits()) == 0)
            out.insert(e.target);
    return {out.begin(), out.end()};
}

} // namespace

TEST_CASE("inhibition is set intersection")
{
    DrugUniverse d({"Avastin", "d1", "d2", "d3"});
    CHECK(is_inhibited(d.cocktail(std::vector<std::string>{"Avastin"}), d.cocktail(std::vector<std::string>{"Avastin"})));
    CHECK_FALSE(is_inhibited(d.cocktail(std::vector<std::string>{"Avastin"}), Cocktail{}));
    CHECK_FALSE(is_inhibited(d.cocktail(std::vector<std::string>{"d1"}), d.cocktail(std::vector<std::string>{"d2", "d3"})));
}

TEST_CASE("drug ids follow the identifier pattern")
{
    DrugUniverse d;
    CHECK_THROWS_AS(d.add(""), Error);
    CHECK_THROWS_AS(d.add("bad name"), Error);
    d.add("VEGF-i_2");
    CHECK_THROWS_AS(d.add("VEGF-i_2"), Error);
    CHECK(d.format(d.cocktail(std::vector<std::string>{"VEGF-i_2"})) == "{VEGF-i_2}");
}

TEST_CASE("successors exclude Ang under Avastin at pre-Ang states")
{
    const auto cha = fig1_like();
    const auto avastin = Cocktail{}.with(cha.drugs.at("Avastin"));
    for (auto name : {"SSG", "IAG"}) {
        const auto s = successors(cha, cha.state_at(name), avastin);
        CHECK(std::find(s.begin(), s.end(), cha.state_at("Ang")) == s.end());
        const auto open = successors(cha, cha.state_at(name), {});
        CHECK(std::find(open.begin(), open.end(), cha.state_at("Ang")) != open.end());
    }
    CHECK_THROWS_AS(successors(cha, 99, {}), UnknownIdError);
}

TEST_CASE("self-loop only state has itself as successor")
{
    const auto cha = ChaBuilder().drug("d").state("v").edge("v", "v").initial("v").build();
    CHECK(successors(cha, 0, {}) == std::vector<StateId>{0});
    CHECK(successors(cha, 0, Cocktail{}.with(0)) == std::vector<StateId>{0});
}

TEST_CASE("successors agree with the per-edge filter, are monotone and unfiltered under the empty cocktail")
{
    Rng rng(11);
    for (int round = 0; round < 200; ++round) {
        const auto drugs = uniform(rng, 0, 3);
        const auto cha = random_cha(rng, uniform(rng, 1, 5), drugs);
        for (StateId v = 0; v < cha.state_count(); ++v)
            for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << drugs); ++bits) {
                const Cocktail c(bits);
                const auto s = successors(cha, v, c);
                REQUIRE(s == filter_oracle(cha, v, c));
                for (std::uint64_t sup = bits; sup < (std::uint64_t{1} << drugs); sup = (sup + 1) | bits) {
                    const auto t = successors(cha, v, Cocktail(sup));
                    CHECK(std::includes(s.begin(), s.end(), t.begin(), t.end()));
                }
            }
    }
}

TEST_CASE("validate reports the minimal blocking cocktail")
{
    const auto cha = ChaBuilder().drug("d").drug("e").state("v").state("w").edge("v", "w", {"d"}).edge("w", "w").initial("v").build();
    const auto r = validate(cha);
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.errors().size() == 1);
    CHECK(r.errors()[0]->kind == Finding::Kind::Totality);
    CHECK(r.errors()[0]->state == StateId{0});
    CHECK(r.errors()[0]->cocktail == Cocktail{}.with(0));
}

TEST_CASE("validate flags dangling ids and duplicate states")
{
    Cha cha;
    cha.drugs = DrugUniverse({"d"});
    cha.states = {"a", "a"};
    cha.labels = {{"a"}, {"a"}};
    cha.edges = {Edge{0, {}, 5, false}};
    const auto r = validate(cha);
    bool dup = false;
    bool dangling = false;
    for (const auto* f : r.errors()) {
        dup = dup || f->kind == Finding::Kind::DuplicateState;
        dangling = dangling || f->kind == Finding::Kind::DanglingState;
    }
    CHECK(dup);
    CHECK(dangling);
}

TEST_CASE("fig1 reconstruction with implicit self-loops validates")
{
    CHECK(validate(fig1_like()).ok());
}

TEST_CASE("totality report agrees with exhaustive cocktail check")
{
    Rng rng(5);
    for (int round = 0; round < 300; ++round) {
        const auto drugs = uniform(rng, 1, 3);
        Cha cha;
        cha.drugs = DrugUniverse(drug_names(drugs));
        const auto n = uniform(rng, 1, 5);
        for (std::size_t v = 0; v < n; ++v) {
            cha.states.push_back("s" + std::to_string(v));
            cha.labels.push_back({cha.states.back()});
        }
        for (StateId u = 0; u < n; ++u)
            for (StateId v = 0; v < n; ++v)
                if (coin(rng, 0.35))
                    cha.edges.push_back(Edge{u, random_subset(rng, drugs, 0.6), v, false});
        const auto r = validate(cha);
        for (StateId v = 0; v < n; ++v) {
            std::vector<Cocktail> blocking;
            for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << drugs); ++bits)
                if (filter_oracle(cha, v, Cocktail(bits)).empty())
                    blocking.push_back(Cocktail(bits));
            std::vector<Cocktail> minimal;
            for (auto c : blocking)
                if (std::none_of(blocking.begin(), blocking.end(),
                                 [&](Cocktail o) { return o != c && o.subset_of(c); }))
                    minimal.push_back(c);
            std::vector<Cocktail> reported;
            for (const auto* f : r.errors())
                if (f->kind == Finding::Kind::Totality && f->state == v)
                    reported.push_back(*f->cocktail);
            std::sort(minimal.begin(), minimal.end());
            std::sort(reported.begin(), reported.end());
            CHECK(reported == minimal);
            auto mbc = minimal_blocking_cocktails(cha, v);
            std::sort(mbc.begin(), mbc.end());
            CHECK(mbc == minimal);
        }
    }
}

TEST_CASE("execute under the Avastin therapy never reaches Ang or M")
{
    const auto cha = fig1_like();
    const auto therapy = parse_memoryless_therapy(cha, "Avastin@SSG,Avastin@IAG");
    for (auto policy : {"first-by-order", "uniform-random", "adversarial:M"})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto run = execute(cha, Therapy{therapy}, AdversaryPolicy::parse(policy), 50, seed);
            for (auto v : run.states) {
                CHECK(v != cha.state_at("Ang"));
                CHECK(v != cha.state_at("M"));
            }
        }
}

TEST_CASE("execute on a chain follows the chain; seeded runs repeat")
{
    const auto chain = ChaBuilder().state("a").state("b").state("c").edge("a", "b").edge("b", "c").edge("c", "c").initial("a").build();
    const auto run = execute(chain, Therapy{constant_therapy(chain, {})}, {}, 3, 0);
    CHECK(run.states == std::vector<StateId>{0, 1, 2, 2});

    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto cha = random_cha(rng, uniform(rng, 1, 5), 2);
        const Therapy t = constant_therapy(cha, Cocktail(uniform(rng, 0, 3)));
        const auto policy = AdversaryPolicy::parse("uniform-random");
        CHECK(execute(cha, t, policy, 30, 99) == execute(cha, t, policy, 30, 99));
    }
}

TEST_CASE("validated models never dead-end during execution")
{
    Rng rng(17);
    int checked = 0;
    while (checked < 1000) {
        const auto drugs = uniform(rng, 0, 2);
        const auto cha = random_cha(rng, uniform(rng, 1, 5), drugs, 0.3);
        if (!validate(cha).ok())
            continue;
        MemorylessTherapy t;
        for (std::size_t v = 0; v < cha.state_count(); ++v)
            t.by_state.push_back(random_subset(rng, drugs));
        const auto policies = {"first-by-order", "uniform-random", "adversarial:p"};
        const auto policy = AdversaryPolicy::parse(*std::next(policies.begin(), static_cast<long>(uniform(rng, 0, 2))));
        CHECK_NOTHROW(execute(cha, Therapy{t}, policy, 25, rng()));
        ++checked;
    }
}

TEST_CASE("dead-end is reported when totality fails")
{
    const auto cha = ChaBuilder().drug("d").state("a").state("b").edge("a", "b", {"d"}).edge("b", "b").initial("a").build();
    MemorylessTherapy t{{Cocktail{}.with(0), Cocktail{}}};
    CHECK_THROWS_AS(execute(cha, Therapy{t}, {}, 5, 0), DeadEndError);
}

TEST_CASE("possible executions: chain, fan-out, fig1 reaches M, explosion guard")
{
    const auto chain = ChaBuilder().state("a").state("b").state("c").state("d").edge("a", "b").edge("b", "c").edge("c", "d").edge("d", "d").initial("a").build();
    CHECK(possible_executions(chain, Therapy{constant_therapy(chain, {})}, 3).size() == 1);

    const auto fan = ChaBuilder().state("a").state("b").state("c").edge("a", "b").edge("a", "c").edge("b", "b").edge("c", "c").initial("a").build();
    CHECK(possible_executions(fan, Therapy{constant_therapy(fan, {})}, 1).size() == 2);

    const auto cha = fig1_like();
    const auto runs = possible_executions(cha, Therapy{constant_therapy(cha, {})}, cha.state_count());
    CHECK(std::any_of(runs.begin(), runs.end(), [&](const Run& r) { return r.states.back() == cha.state_at("M"); }));

    CHECK_THROWS_AS(possible_executions(cha, Therapy{constant_therapy(cha, {})}, 12, 1000), ExplosionError);
    CHECK_THROWS_AS(possible_executions(cha, Therapy{constant_therapy(cha, {})}, 0), Error);
}

TEST_CASE("possible executions equal brute-force enumeration over edge choices")
{
    Rng rng(23);
    for (int round = 0; round < 150; ++round) {
        const auto drugs = uniform(rng, 0, 3);
        const auto cha = random_cha(rng, uniform(rng, 1, 5), drugs);
        MemorylessTherapy t;
        for (std::size_t v = 0; v < cha.state_count(); ++v)
            t.by_state.push_back(random_subset(rng, drugs));
        const auto h = uniform(rng, 1, 4);
        std::set<std::vector<StateId>> expected;
        std::vector<StateId> path{cha.initial};
        auto dfs = [&](auto& self) -> void {
            if (path.size() == h + 1) {
                expected.insert(path);
                return;
            }
            for (const auto& e : cha.edges)
                if (e.source == path.back() && !e.inhibitors.intersects(t.by_state[path.back()])) {
                    path.push_back(e.target);
                    self(self);
                    path.pop_back();
                }
        };
        dfs(dfs);
        const auto runs = possible_executions(cha, Therapy{t}, h);
        std::set<std::vector<StateId>> got;
        for (const auto& r : runs)
            got.insert(r.states);
        CHECK(got == expected);
        CHECK(got.size() == runs.size());
    }
}

TEST_CASE("therapy representations")
{
    const auto cha = fig1_like();
    const auto t = parse_memoryless_therapy(cha, "Avastin@SSG, Avastin@IAG");
    CHECK(format_therapy(cha, t) == "Avastin@SSG,Avastin@IAG");
    CHECK(parse_memoryless_therapy(cha, format_therapy(cha, t)) == t);
    CHECK(format_therapy(cha, parse_memoryless_therapy(cha, "none")) == "none");
    CHECK_THROWS_AS(parse_memoryless_therapy(cha, "Aspirin@SSG"), UnknownIdError);

    FiniteMemoryTherapy fm;
    fm.window = 2;
    fm.table[{0, 1}] = Cocktail{}.with(0);
    fm.fallback = Cocktail{};
    const std::vector<StateId> h1{3, 0, 1};
    const std::vector<StateId> h2{1, 1};
    CHECK(therapy_at(Therapy{fm}, h1) == Cocktail{}.with(0));
    CHECK(therapy_at(Therapy{fm}, h2) == Cocktail{});

    TabularTherapy tab;
    tab.table[{0}] = Cocktail{};
    const std::vector<StateId> h3{0, 1};
    CHECK_THROWS_AS(therapy_at(Therapy{tab}, h3), TherapyError);
}

TEST_CASE("runs are checked against edges and inhibition")
{
    const auto cha = fig1_like();
    Run ok{{cha.state_at("Normal"), cha.state_at("SSG"), cha.state_at("Normal")}, {}, 0};
    CHECK(is_run_of(cha, ok));
    Run skip{{cha.state_at("Normal"), cha.state_at("Ang")}, {}, std::nullopt};
    CHECK_FALSE(is_run_of(cha, skip));
    const auto av = Cocktail{}.with(0);
    Run blocked{{cha.state_at("SSG"), cha.state_at("Ang")}, {av}, std::nullopt};
    CHECK_FALSE(is_run_of(cha, blocked));
}
