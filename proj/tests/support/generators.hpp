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

// Hand-rolled random generators for property tests. Everything is driven
// by an explicit mt19937_64 so failures replay from the printed seed.

#include "chakit/cost.hpp"
#include "chakit/ctl.hpp"
#include "chakit/model.hpp"
#include "chakit/timed.hpp"

#include <random>
#include <string>
#include <vector>

namespace chakit::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi)
{
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p = 0.5)
{
    return std::bernoulli_distribution(p)(rng);
}

inline Cocktail random_subset(Rng& rng, std::size_t drugs, double p = 0.5)
{
    Cocktail c;
    for (DrugId d = 0; d < drugs; ++d)
        if (coin(rng, p))
            c = c.with(d);
    return c;
}

inline std::vector<std::string> drug_names(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(std::string(1, static_cast<char>('A' + i)));
    return out;
}

inline std::set<std::string> random_labels(Rng& rng, const std::string& id)
{
    std::set<std::string> l{id};
    if (coin(rng, 0.4))
        l.insert("p");
    if (coin(rng, 0.3))
        l.insert("q");
    return l;
}

/// Total untimed CHA: every state keeps one uninhibitable outgoing edge.
inline Cha random_cha(Rng& rng, std::size_t states, std::size_t drugs, double edge_p = 0.4)
{
    Cha cha;
    cha.drugs = DrugUniverse(drug_names(drugs));
    for (std::size_t v = 0; v < states; ++v) {
        cha.states.push_back("s" + std::to_string(v));
        cha.labels.push_back(random_labels(rng, cha.states.back()));
    }
    for (StateId u = 0; u < states; ++u) {
        cha.edges.push_back(Edge{u, {}, static_cast<StateId>(uniform(rng, 0, states - 1)), false});
        for (StateId v = 0; v < states; ++v)
            if (coin(rng, edge_p))
                cha.edges.push_back(Edge{u, random_subset(rng, drugs, 0.5), v, false});
    }
    return cha;
}

inline CostModel random_costs(Rng& rng, std::size_t states, std::size_t drugs, std::size_t dim, double discount)
{
    auto m = CostModel::zero(dim, states, drugs);
    for (auto& row : m.state_costs)
        for (auto& x : row)
            x = static_cast<double>(uniform(rng, 0, 4));
    for (auto& row : m.drug_costs)
        for (auto& x : row)
            x = static_cast<double>(uniform(rng, 0, 3));
    m.discount = discount;
    return m;
}

struct TimedParams {
    std::size_t max_states = 5;
    std::size_t min_clocks = 1;
    std::size_t max_clocks = 2;
    std::uint32_t max_bound = 3;
    std::int64_t max_denominator = 4;
    std::size_t max_drugs = 2;
    double idle_p = 0.8;
};

inline Rational random_rate(Rng& rng, std::int64_t max_den)
{
    const auto q = static_cast<std::int64_t>(uniform(rng, 1, static_cast<std::size_t>(max_den)));
    const auto p = static_cast<std::int64_t>(uniform(rng, 0, static_cast<std::size_t>(2 * q)));
    return Rational(p, q);
}

inline TimedCha random_timed_cha(Rng& rng, const TimedParams& params)
{
    TimedCha tc;
    const auto n = uniform(rng, 1, params.max_states);
    const auto k = uniform(rng, params.min_clocks, params.max_clocks);
    const auto drugs = uniform(rng, 0, params.max_drugs);
    const auto m = static_cast<std::uint32_t>(uniform(rng, 1, params.max_bound));
    tc.drugs = DrugUniverse(drug_names(drugs));
    for (std::size_t v = 0; v < n; ++v) {
        tc.states.push_back("s" + std::to_string(v));
        tc.labels.push_back(random_labels(rng, tc.states.back()));
    }
    for (std::size_t x = 0; x < k; ++x)
        tc.clocks.push_back(std::string(1, static_cast<char>('x' + x)));
    tc.normalize_tables();
    for (auto& b : tc.clock_bounds)
        b = m;
    for (StateId u = 0; u < n; ++u)
        for (StateId v = 0; v < n; ++v) {
            if (!coin(rng, 0.4))
                continue;
            TimedEdge e;
            e.source = u;
            e.target = v;
            for (ClockId x = 0; x < k; ++x)
                if (coin(rng, 0.5))
                    e.guard.atoms.push_back(ClockAtom{x, static_cast<std::uint32_t>(uniform(rng, 0, m))});
            e.inhibitors = coin(rng, 0.3) ? random_subset(rng, drugs, 0.6) : Cocktail{};
            tc.edges.push_back(e);
        }
    for (StateId v = 0; v < n; ++v)
        for (ClockId x = 0; x < k; ++x)
            if (coin(rng, 0.3))
                tc.invariants[v][x] = static_cast<std::uint32_t>(uniform(rng, 1, m));
    for (StateId v = 0; v < n; ++v)
        for (DrugId d = 0; d < drugs; ++d)
            for (ClockId x = 0; x < k; ++x)
                if (coin(rng, 0.4))
                    tc.rates[{v, d, x}] = random_rate(rng, params.max_denominator);
    tc.environment_may_idle = coin(rng, params.idle_p);
    return tc;
}

/// Random CTL formula with temporal nesting depth at most `depth`.
inline Ctl random_ctl(Rng& rng, int depth, const std::vector<std::string>& atoms, int budget = 6)
{
    using Op = CtlFormula::Op;
    if (depth == 0 || budget <= 1 || coin(rng, 0.2)) {
        const auto r = uniform(rng, 0, atoms.size() + 1);
        if (r == atoms.size())
            return ctl::truth();
        if (r == atoms.size() + 1)
            return coin(rng) ? ctl::falsity() : ctl::negation(ctl::atom(atoms[0]));
        return ctl::atom(atoms[r]);
    }
    auto bound = [&]() -> std::optional<std::uint32_t> {
        if (coin(rng, 0.3))
            return static_cast<std::uint32_t>(uniform(rng, 0, 4));
        return std::nullopt;
    };
    switch (uniform(rng, 0, 11)) {
    case 0: return ctl::negation(random_ctl(rng, depth, atoms, budget - 1));
    case 1: return ctl::conj(random_ctl(rng, depth, atoms, budget / 2), random_ctl(rng, depth, atoms, budget / 2));
    case 2: return ctl::disj(random_ctl(rng, depth, atoms, budget / 2), random_ctl(rng, depth, atoms, budget / 2));
    case 3: return ctl::implies(random_ctl(rng, depth, atoms, budget / 2), random_ctl(rng, depth, atoms, budget / 2));
    case 4: return ctl::unary(Op::EX, random_ctl(rng, depth - 1, atoms, budget - 1));
    case 5: return ctl::unary(Op::AX, random_ctl(rng, depth - 1, atoms, budget - 1));
    case 6: return ctl::unary(Op::EF, random_ctl(rng, depth - 1, atoms, budget - 1), bound());
    case 7: return ctl::unary(Op::AF, random_ctl(rng, depth - 1, atoms, budget - 1), bound());
    case 8: return ctl::unary(Op::EG, random_ctl(rng, depth - 1, atoms, budget - 1), bound());
    case 9: return ctl::unary(Op::AG, random_ctl(rng, depth - 1, atoms, budget - 1), bound());
    case 10:
        return ctl::until(Op::EU, random_ctl(rng, depth - 1, atoms, budget / 2), random_ctl(rng, depth - 1, atoms, budget / 2),
                          bound());
    default:
        return ctl::until(Op::AU, random_ctl(rng, depth - 1, atoms, budget / 2), random_ctl(rng, depth - 1, atoms, budget / 2),
                          bound());
    }
}

/// Random total Kripke structure over atoms p, q.
inline Kripke random_kripke(Rng& rng, std::size_t n)
{
    Kripke k;
    k.successors.resize(n);
    k.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        k.successors[i].push_back(uniform(rng, 0, n - 1));
        for (std::size_t j = 0; j < n; ++j)
            if (coin(rng, 0.25) && j != k.successors[i][0])
                k.successors[i].push_back(j);
        std::sort(k.successors[i].begin(), k.successors[i].end());
        if (coin(rng, 0.5))
            k.labels[i].insert("p");
        if (coin(rng, 0.4))
            k.labels[i].insert("q");
        k.names.push_back("n" + std::to_string(i));
    }
    k.declared = {"p", "q"};
    k.initial = 0;
    return k;
}

} // namespace chakit::testing
