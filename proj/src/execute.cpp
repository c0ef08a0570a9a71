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

#include "chakit/execute.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <deque>

namespace chakit {

AdversaryPolicy AdversaryPolicy::parse(std::string_view text)
{
    if (text == "first-by-order")
        return {Kind::FirstByOrder, {}};
    if (text == "uniform-random")
        return {Kind::UniformRandom, {}};
    constexpr std::string_view prefix = "adversarial:";
    if (text.substr(0, prefix.size()) == prefix && text.size() > prefix.size())
        return {Kind::AdversarialToward, std::string(text.substr(prefix.size()))};
    throw ParseError("unknown adversary policy '" + std::string(text) + "'", 0);
}

std::string AdversaryPolicy::to_string() const
{
    switch (kind) {
    case Kind::FirstByOrder:
        return "first-by-order";
    case Kind::UniformRandom:
        return "uniform-random";
    case Kind::AdversarialToward:
        return "adversarial:" + goal;
    }
    return {};
}

std::size_t pick_move(const AdversaryPolicy& policy, std::mt19937_64& rng, std::span<const std::size_t> distances)
{
    if (distances.empty())
        throw DeadEndError("no move available");
    switch (policy.kind) {
    case AdversaryPolicy::Kind::FirstByOrder:
        return 0;
    case AdversaryPolicy::Kind::UniformRandom:
        return std::uniform_int_distribution<std::size_t>(0, distances.size() - 1)(rng);
    case AdversaryPolicy::Kind::AdversarialToward:
        return static_cast<std::size_t>(std::min_element(distances.begin(), distances.end()) - distances.begin());
    }
    return 0;
}

std::vector<std::size_t> distances_to_label(const std::vector<std::vector<StateId>>& adjacency,
                                            const std::vector<std::set<std::string>>& labels,
                                            const std::string& goal)
{
    const auto n = adjacency.size();
    std::vector<std::vector<StateId>> reverse(n);
    for (std::size_t v = 0; v < n; ++v)
        for (auto w : adjacency[v])
            reverse[w].push_back(static_cast<StateId>(v));
    std::vector<std::size_t> dist(n, unreachable_distance);
    std::deque<StateId> queue;
    for (std::size_t v = 0; v < n; ++v)
        if (labels[v].count(goal) != 0) {
            dist[v] = 0;
            queue.push_back(static_cast<StateId>(v));
        }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto u : reverse[v])
            if (dist[u] == unreachable_distance) {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
    }
    return dist;
}

namespace {

/// Non-inhibited targets from `state` in edge order, first occurrence kept.
std::vector<StateId> ordered_targets(const Cha& cha, StateId state, Cocktail c)
{
    std::vector<StateId> out;
    for (const auto& e : cha.edges)
        if (e.source == state && !is_inhibited(e.inhibitors, c) &&
            std::find(out.begin(), out.end(), e.target) == out.end())
            out.push_back(e.target);
    return out;
}

std::vector<std::vector<StateId>> adjacency_of(const Cha& cha)
{
    std::vector<std::vector<StateId>> adj(cha.state_count());
    for (const auto& e : cha.edges)
        adj[e.source].push_back(e.target);
    return adj;
}

} // namespace

Run execute(const Cha& cha, const Therapy& therapy, const AdversaryPolicy& policy, std::size_t max_steps,
            std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> dist;
    if (policy.kind == AdversaryPolicy::Kind::AdversarialToward)
        dist = distances_to_label(adjacency_of(cha), cha.labels, policy.goal);

    Run run;
    run.states.push_back(cha.initial);
    for (std::size_t step = 0; step < max_steps; ++step) {
        const auto v = run.states.back();
        const auto c = therapy_at(therapy, run.states);
        const auto targets = ordered_targets(cha, v, c);
        if (targets.empty())
            throw DeadEndError("state '" + cha.states[v] + "' has no transition under " + cha.drugs.format(c));
        std::vector<std::size_t> scores(targets.size(), 0);
        if (!dist.empty())
            for (std::size_t i = 0; i < targets.size(); ++i)
                scores[i] = dist[targets[i]];
        run.cocktails.push_back(c);
        run.states.push_back(targets[pick_move(policy, rng, scores)]);
    }
    return run;
}

std::vector<Run> possible_executions(const Cha& cha, const Therapy& therapy, std::size_t horizon, std::size_t cap)
{
    if (horizon == 0)
        throw Error("horizon must be at least 1");
    double bound = 1.0;
    for (std::size_t i = 0; i < horizon; ++i) {
        bound *= static_cast<double>(cha.state_count());
        if (bound > static_cast<double>(cap))
            throw ExplosionError("execution enumeration bound |V|^" + std::to_string(horizon) + " exceeds cap " +
                                 std::to_string(cap));
    }

    std::vector<Run> out;
    Run current;
    current.states.push_back(cha.initial);
    auto dfs = [&](auto& self) -> void {
        if (current.steps() == horizon) {
            out.push_back(current);
            return;
        }
        const auto c = therapy_at(therapy, current.states);
        const auto targets = successors(cha, current.states.back(), c);
        if (targets.empty())
            throw DeadEndError("state '" + cha.states[current.states.back()] + "' has no transition");
        for (auto t : targets) {
            current.states.push_back(t);
            current.cocktails.push_back(c);
            self(self);
            current.states.pop_back();
            current.cocktails.pop_back();
        }
    };
    dfs(dfs);
    return out;
}

} // namespace chakit
