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

#include "chakit/ctl.hpp"
#include "chakit/error.hpp"
#include "chakit/execute.hpp"
#include "chakit/model_io.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace chakit;
using namespace chakit::testing;
using Op = CtlFormula::Op;

namespace {

Kripke chain()
{
    Kripke k;
    k.successors = {{1}, {1}};
    k.labels = {{}, {"p"}};
    return k;
}

bool verdict(const Kripke& k, const std::string& f)
{
    return model_check(k, *parse_ctl(f)).initial;
}

} // namespace

TEST_CASE("parser builds the expected trees")
{
    const auto f = parse_ctl("AG !M");
    CHECK(f->op == Op::AG);
    CHECK_FALSE(f->bound.has_value());
    CHECK(f->lhs->op == Op::Not);
    CHECK(f->lhs->lhs->op == Op::Atom);
    CHECK(f->lhs->lhs->atom == "M");

    const auto g = parse_ctl("AG (Ang -> AG !EvAp)");
    REQUIRE(g->op == Op::AG);
    REQUIRE(g->lhs->op == Op::Implies);
    CHECK(g->lhs->lhs->atom == "Ang");
    CHECK(g->lhs->rhs->op == Op::AG);
    CHECK(g->lhs->rhs->lhs->op == Op::Not);
    CHECK(g->lhs->rhs->lhs->lhs->atom == "EvAp");
    CHECK(g->depth() == 2);

    const auto h = parse_ctl("AG<=20 !M");
    CHECK(h->op == Op::AG);
    CHECK(h->bound == std::optional<std::uint32_t>(20));

    const auto u = parse_ctl("A[p U<=3 q] & E[true U q]");
    REQUIRE(u->op == Op::And);
    CHECK(u->lhs->op == Op::AU);
    CHECK(u->lhs->bound == std::optional<std::uint32_t>(3));
    CHECK(u->rhs->op == Op::EU);
}

TEST_CASE("parser precedence and errors")
{
    CHECK(equal(*parse_ctl("p | q & r"), *ctl::disj(ctl::atom("p"), ctl::conj(ctl::atom("q"), ctl::atom("r")))));
    CHECK(equal(*parse_ctl("p -> q -> r"), *ctl::implies(ctl::atom("p"), ctl::implies(ctl::atom("q"), ctl::atom("r")))));
    CHECK(equal(*parse_ctl("!p & q"), *ctl::conj(ctl::negation(ctl::atom("p")), ctl::atom("q"))));
    CHECK(equal(*parse_ctl("EF p <-> q"), *ctl::iff(ctl::unary(Op::EF, ctl::atom("p")), ctl::atom("q"))));
    for (const auto* bad : {"", "AG", "p &", "(p", "E[p q]", "AG<= !p", "p q", "AG<=-1 p"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_ctl(bad), ParseError);
    }
    try {
        parse_ctl("p & & q");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("printer round-trips random formulas")
{
    Rng rng(71);
    for (int i = 0; i < 2000; ++i) {
        const auto f = random_ctl(rng, 3, {"p", "q", "Ang"}, 8);
        const auto text = to_string(*f);
        CAPTURE(text);
        CHECK(equal(*parse_ctl(text), *f));
        CHECK(to_string(*parse_ctl(text)) == text);
    }
}

TEST_CASE("chain examples")
{
    const auto k = chain();
    CHECK(verdict(k, "EF p"));
    CHECK_FALSE(verdict(k, "AG p"));
    CHECK(verdict(k, "AX p"));
    CHECK(verdict(k, "AF<=1 p"));
    CHECK_FALSE(verdict(k, "EF<=0 p"));
    CHECK(verdict(k, "AG<=0 !p"));
    CHECK_FALSE(verdict(k, "AG<=1 !p"));
    CHECK(verdict(k, "EX AG p"));
    CHECK_THROWS_AS(model_check(k, *parse_ctl("EF r")), UnknownAtomError);
    auto declared = k;
    declared.declared = {"r"};
    CHECK_FALSE(verdict(declared, "EF r"));
}

TEST_CASE("model checking agrees with the bounded path oracle")
{
    Rng rng(73);
    for (int round = 0; round < 400; ++round) {
        const auto k = random_kripke(rng, 6);
        const auto f = random_ctl(rng, 3, {"p", "q"}, 8);
        CAPTURE(to_string(*f));
        const auto r = model_check(k, *f);
        CtlOracle oracle(k);
        for (std::size_t s = 0; s < k.size(); ++s)
            CHECK(r.holds[s] == oracle.holds(*f, s));
        CHECK(r.initial == r.holds[k.initial]);
        const auto again = model_check(k, *f);
        CHECK(again.holds == r.holds);
    }
}

TEST_CASE("dualities and bound monotonicity")
{
    Rng rng(79);
    for (int round = 0; round < 300; ++round) {
        const auto k = random_kripke(rng, uniform(rng, 1, 7));
        const auto p = random_ctl(rng, 1, {"p", "q"}, 4);
        const auto np = ctl::negation(p);
        auto holds = [&](const Ctl& f) { return model_check(k, *f).holds; };
        auto negated = [](std::vector<bool> v) {
            v.flip();
            return v;
        };
        CHECK(holds(ctl::unary(Op::EF, p)) == negated(holds(ctl::unary(Op::AG, np))));
        CHECK(holds(ctl::unary(Op::AF, p)) == negated(holds(ctl::unary(Op::EG, np))));
        CHECK(holds(ctl::unary(Op::EX, p)) == negated(holds(ctl::unary(Op::AX, np))));
        const auto b = static_cast<std::uint32_t>(uniform(rng, 0, 5));
        CHECK(holds(ctl::unary(Op::EF, p, b)) == negated(holds(ctl::unary(Op::AG, np, b))));
        const auto wide = holds(ctl::unary(Op::AG, p, b + 1));
        const auto narrow = holds(ctl::unary(Op::AG, p, b));
        for (std::size_t s = 0; s < k.size(); ++s)
            if (wide[s])
                CHECK(narrow[s]);
        const auto ef_narrow = holds(ctl::unary(Op::EF, p, b));
        const auto ef_wide = holds(ctl::unary(Op::EF, p, b + 1));
        const auto ef = holds(ctl::unary(Op::EF, p));
        for (std::size_t s = 0; s < k.size(); ++s) {
            if (ef_narrow[s])
                CHECK(ef_wide[s]);
            if (ef_wide[s])
                CHECK(ef[s]);
        }
    }
}

TEST_CASE("non-total structures are rejected")
{
    Kripke k;
    k.successors = {{}};
    k.labels = {{}};
    CHECK_THROWS_AS(k.check_total(), Error);
    CHECK_THROWS_AS(model_check(k, *parse_ctl("EX true")), Error);
}

TEST_CASE("closed systems of the shipped untimed model")
{
    const auto file = load_model(std::string(CHAKIT_MODELS_DIR) + "/fig1.json");
    const auto cha = file.cha();
    const auto open = close_system(cha, Therapy{constant_therapy(cha, {})});
    CHECK(open.size() == cha.state_count());
    std::size_t edges = 0;
    for (const auto& s : open.successors)
        edges += s.size();
    for (StateId v = 0; v < cha.state_count(); ++v)
        CHECK(open.successors[v].size() == successors(cha, v, {}).size());
    CHECK(edges > 0);
    CHECK(model_check(open, *parse_ctl("EF M")).initial);
    CHECK_FALSE(model_check(open, *parse_ctl("AG !M")).initial);

    const auto therapy = parse_memoryless_therapy(cha, "Avastin@SSG,Avastin@IAG");
    const auto treated = close_system(cha, Therapy{therapy});
    CHECK(model_check(treated, *parse_ctl("AG !Ang")).initial);
    CHECK(model_check(treated, *parse_ctl("AG !M")).initial);
    CHECK(model_check(treated, *parse_ctl("AG (Ang -> AG !EvAp)")).initial);
}

TEST_CASE("finite-memory closed systems match the explicit window product")
{
    Rng rng(83);
    int built = 0;
    for (int round = 0; round < 200; ++round) {
        const auto n = uniform(rng, 1, 4);
        const auto cha = random_cha(rng, n, 1, 0.5);
        FiniteMemoryTherapy fm;
        fm.window = 2;
        fm.fallback = Cocktail{};
        for (StateId a = 0; a < n; ++a)
            for (StateId b = 0; b < n; ++b)
                if (coin(rng, 0.3))
                    fm.table[{a, b}] = Cocktail(1);
        Kripke k;
        try {
            k = close_system(cha, Therapy{fm});
        } catch (const DeadEndError&) {
            continue;
        }
        ++built;

        // reachable windows, by hand
        std::set<std::vector<StateId>> seen{{cha.initial}};
        std::vector<std::vector<StateId>> todo{{cha.initial}};
        while (!todo.empty()) {
            const auto h = todo.back();
            todo.pop_back();
            const auto c = therapy_at(Therapy{fm}, h);
            for (const auto& e : cha.edges) {
                if (e.source != h.back() || e.inhibitors.intersects(c))
                    continue;
                const std::vector<StateId> next{h.back(), e.target};
                if (seen.insert(next).second)
                    todo.push_back(next);
            }
        }
        CHECK(k.size() == seen.size());
        std::size_t pairs = 0;
        for (const auto& h : seen)
            pairs += h.size() == 2 ? 1 : 0;
        CHECK(pairs <= n * n);

        // paths of the closed system are the possible executions
        auto state_of = [&](std::size_t node) {
            const auto& name = k.names[node];
            const auto dot = name.rfind('.');
            return cha.state_at(dot == std::string::npos ? name : name.substr(dot + 1));
        };
        std::set<std::vector<StateId>> paths;
        std::vector<std::size_t> path{k.initial};
        auto dfs = [&](auto& self) -> void {
            if (path.size() == 4) {
                std::vector<StateId> states;
                for (auto node : path)
                    states.push_back(state_of(node));
                paths.insert(states);
                return;
            }
            for (auto t : k.successors[path.back()]) {
                path.push_back(t);
                self(self);
                path.pop_back();
            }
        };
        dfs(dfs);
        std::set<std::vector<StateId>> runs;
        for (const auto& r : possible_executions(cha, Therapy{fm}, 3))
            runs.insert(r.states);
        CHECK(paths == runs);
    }
    CHECK(built > 50);
}

TEST_CASE("tabular therapies cannot be closed")
{
    const auto cha = ChaBuilder().state("a").edge("a", "a").initial("a").build();
    CHECK_THROWS_AS(close_system(cha, Therapy{TabularTherapy{}}), TherapyError);
}
