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

#include "chakit/cost.hpp"

#include "chakit/error.hpp"
#include "chakit/execute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace chakit {

namespace {

void add_into(CostVector& acc, const CostVector& v, double scale = 1.0)
{
    for (std::size_t i = 0; i < acc.size(); ++i)
        acc[i] += scale * v[i];
}

double max_entry(const CostVector& v)
{
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

/// Largest entry any single step can cost under the therapy.
double step_bound(const Run& run, const Therapy& therapy, const CostModel& model)
{
    double s = 0.0;
    for (auto v : run.states)
        s = std::max(s, max_entry(model.state_cost(v)));
    double c = 0.0;
    for (auto cocktail : therapy_range(therapy))
        c = std::max(c, max_entry(model.cocktail_cost(cocktail)));
    return s + c;
}

} // namespace

CostModel CostModel::zero(std::size_t dimension, std::size_t states, std::size_t drugs)
{
    CostModel m;
    m.dimension = dimension;
    m.state_costs.assign(states, CostVector(dimension, 0.0));
    m.drug_costs.assign(drugs, CostVector(dimension, 0.0));
    return m;
}

CostVector CostModel::state_cost(StateId v) const
{
    if (v >= state_costs.size())
        return CostVector(dimension, 0.0);
    return state_costs[v];
}

CostVector CostModel::cocktail_cost(Cocktail c) const
{
    if (auto it = cocktail_costs.find(c); it != cocktail_costs.end())
        return it->second;
    CostVector out(dimension, 0.0);
    for (auto d : c.drugs())
        if (d < drug_costs.size())
            add_into(out, drug_costs[d]);
    return out;
}

void CostModel::check(std::size_t states, std::size_t drugs) const
{
    if (dimension == 0)
        throw ModelError("cost dimension must be positive");
    if (state_costs.size() > states)
        throw DimensionMismatchError("more state costs than states");
    if (drug_costs.size() > drugs)
        throw DimensionMismatchError("more drug costs than drugs");
    auto check_vector = [&](const CostVector& v, const std::string& what) {
        if (v.size() != dimension)
            throw DimensionMismatchError(what + " has " + std::to_string(v.size()) + " entries, expected " +
                                         std::to_string(dimension));
        for (double x : v)
            if (!(x >= 0.0) || !std::isfinite(x))
                throw ModelError(what + " must be finite and non-negative");
    };
    for (std::size_t v = 0; v < state_costs.size(); ++v)
        check_vector(state_costs[v], "cost of state " + std::to_string(v));
    for (std::size_t d = 0; d < drug_costs.size(); ++d)
        check_vector(drug_costs[d], "cost of drug " + std::to_string(d));
    for (const auto& [c, v] : cocktail_costs)
        check_vector(v, "cocktail cost");
    if (!(discount > 0.0 && discount <= 1.0))
        throw ModelError("discount must lie in (0, 1]");
    if (!(timed_discount > 0.0 && std::isfinite(timed_discount)))
        throw ModelError("timed discount must be positive");
}

CostResult untimed_cost(const Run& run, const Therapy& therapy, const CostModel& model,
                        std::optional<std::size_t> horizon)
{
    if (run.states.empty())
        return {CostVector(model.dimension, 0.0), 0.0};
    const double delta = model.discount;
    const bool lasso = run.loop_start.has_value();
    if (lasso && *run.loop_start >= run.states.size())
        throw Error("loop start outside the run");

    std::vector<StateId> history;
    auto term = [&](std::size_t i) {
        // history holds run.at(0..i-1) on entry
        history.push_back(run.at(i));
        CostVector t = model.state_cost(history.back());
        add_into(t, model.cocktail_cost(therapy_at(therapy, history)));
        return t;
    };
    auto partial = [&](std::size_t h) {
        history.clear();
        CostVector sum(model.dimension, 0.0);
        double w = 1.0;
        for (std::size_t i = 0; i < h; ++i) {
            add_into(sum, term(i), w);
            w *= delta;
        }
        return sum;
    };

    if (!lasso) {
        const auto h = std::min(horizon.value_or(run.states.size()), run.states.size());
        return {partial(h), 0.0};
    }
    const double bound = step_bound(run, therapy, model);
    auto radius_after = [&](std::size_t h) -> std::optional<double> {
        if (delta >= 1.0)
            return std::nullopt;
        return std::pow(delta, static_cast<double>(h)) / (1.0 - delta) * bound;
    };
    if (horizon)
        return {partial(*horizon), radius_after(*horizon)};
    if (delta >= 1.0)
        throw DivergenceError("discount 1 on an infinite run needs a horizon");

    if (std::holds_alternative<MemorylessTherapy>(therapy)) {
        const auto p = *run.loop_start;
        const auto c = run.states.size() - p;
        CostVector prefix = partial(p);
        CostVector cycle(model.dimension, 0.0);
        double w = 1.0;
        for (std::size_t j = 0; j < c; ++j) {
            add_into(cycle, term(p + j), w);
            w *= delta;
        }
        const double scale = std::pow(delta, static_cast<double>(p)) / (1.0 - std::pow(delta, static_cast<double>(c)));
        add_into(prefix, cycle, scale);
        return {prefix, 0.0};
    }
    std::size_t h = 1;
    while (h < 1'000'000 && *radius_after(h) > 1e-12)
        ++h;
    return {partial(h), radius_after(h)};
}

CostVector segment_cost(const CostModel& model, StateId v, Cocktail c, double t0, double t1)
{
    const double d = model.timed_discount;
    const double weight = -std::exp(-d * t0) * std::expm1(-d * (t1 - t0)) / d;
    CostVector out = model.state_cost(v);
    add_into(out, model.cocktail_cost(c));
    for (auto& x : out)
        x *= weight;
    return out;
}

CostVector timed_cost(const TimedCha& tc, const TimedRun& run, const CostModel& model, double start_time)
{
    const auto states = replay(tc, run);
    const auto loop = run.loop_start.value_or(run.steps.size());
    if (loop > run.steps.size())
        throw Error("loop start outside the run");
    CostVector total(model.dimension, 0.0);
    CostVector cycle(model.dimension, 0.0);
    double tau = start_time;
    double cycle_start = start_time;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        if (i == loop)
            cycle_start = tau;
        const auto* d = std::get_if<DelayStep>(&run.steps[i]);
        if (!d)
            continue;
        const double next = tau + to_double(d->delta);
        add_into(i < loop ? total : cycle, segment_cost(model, states[i].state, d->cocktail, tau, next));
        tau = next;
    }
    if (run.loop_start && loop < run.steps.size()) {
        const double period = tau - cycle_start;
        if (!(period > 0.0))
            throw Error("lasso cycle of a timed run must have positive duration");
        // Each further lap is the same cost discounted by e^{-d period}.
        add_into(total, cycle, -1.0 / std::expm1(-model.timed_discount * period));
    }
    return total;
}

bool pareto_dominates(const CostVector& x, const CostVector& y)
{
    if (x.size() != y.size())
        throw DimensionMismatchError("cost vectors of dimension " + std::to_string(x.size()) + " and " +
                                     std::to_string(y.size()));
    bool strict = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > y[i] + cost_tolerance)
            return false;
        if (x[i] < y[i] - cost_tolerance)
            strict = true;
    }
    return strict;
}

std::vector<std::size_t> pareto_front(const std::vector<CostVector>& vectors)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < vectors.size() && !dominated; ++j)
            dominated = j != i && pareto_dominates(vectors[j], vectors[i]);
        if (!dominated)
            out.push_back(i);
    }
    return out;
}

std::vector<MemorylessTherapy> enumerate_therapies(const Cha& cha, const TherapySpace& space)
{
    if (space.menu.empty())
        throw Error("therapy space needs a non-empty cocktail menu");
    const auto n = cha.state_count();
    const auto k = space.menu.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (total > space.cap / k)
            throw ExplosionError("therapy space " + std::to_string(k) + "^" + std::to_string(n) + " exceeds cap " +
                                 std::to_string(space.cap));
        total *= k;
    }
    std::vector<MemorylessTherapy> out;
    out.reserve(total);
    std::vector<std::size_t> digit(n, 0);
    for (std::size_t t = 0; t < total; ++t) {
        MemorylessTherapy th;
        th.by_state.reserve(n);
        for (auto i : digit)
            th.by_state.push_back(space.menu[i]);
        out.push_back(std::move(th));
        for (std::size_t pos = n; pos-- > 0;) {
            if (++digit[pos] < k)
                break;
            digit[pos] = 0;
        }
    }
    return out;
}

CostSet execution_costs(const Cha& cha, const MemorylessTherapy& therapy, const CostModel& model, std::size_t horizon,
                        std::size_t cap)
{
    const Therapy th = therapy;
    CostSet out;
    double bound = 0.0;
    for (const auto& row : model.state_costs)
        bound = std::max(bound, max_entry(row));
    double cocktail_bound = 0.0;
    for (auto c : therapy.by_state)
        cocktail_bound = std::max(cocktail_bound, max_entry(model.cocktail_cost(c)));
    bound += cocktail_bound;
    for (const auto& run : possible_executions(cha, th, horizon, cap))
        out.costs.push_back(untimed_cost(run, th, model).value);
    std::sort(out.costs.begin(), out.costs.end());
    out.costs.erase(std::unique(out.costs.begin(), out.costs.end(),
                                [](const CostVector& a, const CostVector& b) {
                                    for (std::size_t i = 0; i < a.size(); ++i)
                                        if (std::abs(a[i] - b[i]) > cost_tolerance)
                                            return false;
                                    return true;
                                }),
                    out.costs.end());
    if (model.discount < 1.0)
        out.tail_radius = std::pow(model.discount, static_cast<double>(horizon + 1)) / (1.0 - model.discount) * bound;
    else if (bound == 0.0)
        out.tail_radius = 0.0;
    return out;
}

DominanceVerdict set_dominates(const CostSet& a, const CostSet& b)
{
    if (a.costs.empty() || b.costs.empty())
        return {false, true};
    const auto n = a.costs.front().size();
    CostVector max_a(n, -std::numeric_limits<double>::infinity());
    CostVector min_b(n, std::numeric_limits<double>::infinity());
    for (const auto& x : a.costs) {
        if (x.size() != n)
            throw DimensionMismatchError("cost vectors of different dimensions");
        for (std::size_t i = 0; i < n; ++i)
            max_a[i] = std::max(max_a[i], x[i]);
    }
    for (const auto& x : b.costs) {
        if (x.size() != n)
            throw DimensionMismatchError("cost vectors of different dimensions");
        for (std::size_t i = 0; i < n; ++i)
            min_b[i] = std::min(min_b[i], x[i]);
    }

    // Every pair is ordered iff max_a <= min_b; strictness then only fails
    // on pairs that are equal, which needs max_a == min_b on every entry.
    bool dominates = true;
    bool strict_somewhere = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (max_a[i] > min_b[i] + cost_tolerance)
            dominates = false;
        if (max_a[i] < min_b[i] - cost_tolerance)
            strict_somewhere = true;
    }
    if (dominates && !strict_somewhere)
        for (const auto& x : a.costs)
            for (const auto& y : b.costs)
                if (!pareto_dominates(x, y))
                    dominates = false;

    const double inf = std::numeric_limits<double>::infinity();
    const double ra = a.tail_radius.value_or(inf);
    const double rb = b.tail_radius.value_or(inf);
    if (ra == 0.0 && rb == 0.0)
        return {dominates, true};
    bool conclusive = false;
    if (dominates) {
        bool safe = ra < inf;
        bool strict = false;
        for (std::size_t i = 0; i < n && safe; ++i) {
            if (max_a[i] + ra > min_b[i] + cost_tolerance)
                safe = false;
            if (max_a[i] + ra < min_b[i] - cost_tolerance)
                strict = true;
        }
        conclusive = safe && strict;
    } else {
        for (std::size_t i = 0; i < n && !conclusive; ++i)
            conclusive = max_a[i] > min_b[i] + rb + cost_tolerance;
    }
    return {dominates, conclusive};
}

CandidateReport candidate_therapies(const Cha& cha, const CostModel& model, const TherapySpace& space,
                                    std::size_t horizon)
{
    if (horizon == 0)
        throw Error("horizon must be at least 1");
    model.check(cha.state_count(), cha.drugs.size());
    CandidateReport report;
    report.space = enumerate_therapies(cha, space);
    for (const auto& th : report.space)
        report.costs.push_back(execution_costs(cha, th, model, horizon));
    for (std::size_t t = 0; t < report.space.size(); ++t) {
        bool excluded = false;
        for (std::size_t u = 0; u < report.space.size(); ++u) {
            if (u == t)
                continue;
            const auto v = set_dominates(report.costs[u], report.costs[t]);
            if (v.dominates) {
                if (!excluded)
                    report.dominance.emplace_back(u, t);
                excluded = true;
                if (!v.conclusive)
                    report.inconclusive.emplace_back(u, t);
            } else if (!v.conclusive) {
                ++report.inconclusive_non_dominance;
            }
        }
        if (!excluded)
            report.candidates.push_back(t);
    }
    return report;
}

std::vector<FamilyMember> align_family(const std::vector<FamilyMember>& family)
{
    if (family.empty())
        return {};
    const auto& ref = family.front();
    std::vector<FamilyMember> out{ref};
    for (std::size_t k = 1; k < family.size(); ++k) {
        const auto& m = family[k];
        const auto n = ref.cha.state_count();
        if (m.cha.state_count() != n)
            throw DomainMismatchError("family member " + std::to_string(k) + " has " +
                                      std::to_string(m.cha.state_count()) + " states, expected " + std::to_string(n));
        if (m.cha.drugs.size() != ref.cha.drugs.size())
            throw DomainMismatchError("family member " + std::to_string(k) + " has a different drug universe");
        std::vector<StateId> state_map(n);
        for (StateId v = 0; v < n; ++v) {
            auto mapped = ref.cha.find_state(m.cha.states[v]);
            if (!mapped)
                throw DomainMismatchError("state '" + m.cha.states[v] + "' of family member " + std::to_string(k) +
                                          " is not in the first member");
            state_map[v] = *mapped;
        }
        std::vector<DrugId> drug_map(m.cha.drugs.size());
        for (DrugId d = 0; d < drug_map.size(); ++d) {
            auto mapped = ref.cha.drugs.find(m.cha.drugs.name(d));
            if (!mapped)
                throw DomainMismatchError("drug '" + m.cha.drugs.name(d) + "' of family member " +
                                          std::to_string(k) + " is not in the first member");
            drug_map[d] = *mapped;
        }
        auto remap = [&](Cocktail c) {
            Cocktail r;
            for (auto d : c.drugs())
                r = r.with(drug_map[d]);
            return r;
        };
        FamilyMember a;
        a.cha.drugs = ref.cha.drugs;
        a.cha.states = ref.cha.states;
        a.cha.labels.resize(n);
        for (StateId v = 0; v < n; ++v)
            a.cha.labels[state_map[v]] = m.cha.labels[v];
        for (const auto& e : m.cha.edges)
            a.cha.edges.push_back(Edge{state_map[e.source], remap(e.inhibitors), state_map[e.target], e.implicit});
        a.cha.initial = state_map[m.cha.initial];
        a.costs = m.costs;
        a.costs.state_costs.assign(n, CostVector(m.costs.dimension, 0.0));
        for (StateId v = 0; v < m.costs.state_costs.size(); ++v)
            a.costs.state_costs[state_map[v]] = m.costs.state_costs[v];
        a.costs.drug_costs.assign(m.cha.drugs.size(), CostVector(m.costs.dimension, 0.0));
        for (DrugId d = 0; d < m.costs.drug_costs.size(); ++d)
            a.costs.drug_costs[drug_map[d]] = m.costs.drug_costs[d];
        a.costs.cocktail_costs.clear();
        for (const auto& [c, v] : m.costs.cocktail_costs)
            a.costs.cocktail_costs[remap(c)] = v;
        out.push_back(std::move(a));
    }
    return out;
}

UniversalReport universal_candidates(const std::vector<FamilyMember>& family, const TherapySpace& space,
                                     std::size_t horizon)
{
    UniversalReport report;
    const auto aligned = align_family(family);
    if (aligned.empty())
        return report;
    report.space = enumerate_therapies(aligned.front().cha, space);
    std::vector<std::size_t> count(report.space.size(), 0);
    for (const auto& m : aligned) {
        report.members.push_back(candidate_therapies(m.cha, m.costs, space, horizon));
        for (auto t : report.members.back().candidates)
            ++count[t];
    }
    for (std::size_t t = 0; t < count.size(); ++t)
        if (count[t] == aligned.size())
            report.universal.push_back(t);
    return report;
}

bool covers(const std::vector<MemorylessTherapy>& therapies, const std::vector<FamilyMember>& family,
            const TherapySpace& space, std::size_t horizon)
{
    const auto report = universal_candidates(family, space, horizon);
    for (const auto& member : report.members) {
        const bool hit = std::any_of(member.candidates.begin(), member.candidates.end(), [&](std::size_t t) {
            return std::find(therapies.begin(), therapies.end(), member.space[t]) != therapies.end();
        });
        if (!hit)
            return false;
    }
    return true;
}

std::vector<std::size_t> prune_candidates(const CandidateReport& report, RiskAttitude attitude)
{
    std::vector<double> score;
    for (auto t : report.candidates) {
        double best = std::numeric_limits<double>::infinity();
        double worst = -best;
        for (const auto& c : report.costs[t].costs) {
            const double s = std::accumulate(c.begin(), c.end(), 0.0);
            best = std::min(best, s);
            worst = std::max(worst, s);
        }
        score.push_back(attitude == RiskAttitude::Maximin ? worst : best);
    }
    std::vector<std::size_t> out;
    if (score.empty())
        return out;
    const double target = *std::min_element(score.begin(), score.end());
    for (std::size_t i = 0; i < score.size(); ++i)
        if (score[i] <= target + cost_tolerance)
            out.push_back(report.candidates[i]);
    return out;
}

} // namespace chakit
