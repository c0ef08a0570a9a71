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
#include "chakit/therapy.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace chakit {

/// How the cancer (environment) resolves nondeterminism in simulations.
struct AdversaryPolicy {
    enum class Kind { FirstByOrder, UniformRandom, AdversarialToward };
    Kind kind = Kind::FirstByOrder;
    /// Label the adversary steers toward (AdversarialToward only).
    std::string goal;

    /// "first-by-order", "uniform-random", "adversarial:<label>".
    static AdversaryPolicy parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;
};

/// Index of the chosen candidate. `distances[i]` is candidate i's distance to
/// the adversary's goal (only read by AdversarialToward); ties go to the
/// lowest index.
std::size_t pick_move(const AdversaryPolicy& policy, std::mt19937_64& rng, std::span<const std::size_t> distances);

inline constexpr std::size_t unreachable_distance = static_cast<std::size_t>(-1);

/// BFS distance from every state to the nearest state labeled `goal`,
/// ignoring inhibition. `adjacency[v]` lists v's successors.
std::vector<std::size_t> distances_to_label(const std::vector<std::vector<StateId>>& adjacency,
                                            const std::vector<std::set<std::string>>& labels,
                                            const std::string& goal);

/// Simulates `max_steps` steps of the therapy against the policy. Throws
/// DeadEndError when no transition is possible.
Run execute(const Cha& cha, const Therapy& therapy, const AdversaryPolicy& policy, std::size_t max_steps,
            std::uint64_t seed);

/// All runs of exactly `horizon` steps consistent with the therapy, in
/// lexicographic order of successor choices. Throws ExplosionError when
/// |V|^horizon exceeds `cap`.
std::vector<Run> possible_executions(const Cha& cha, const Therapy& therapy, std::size_t horizon,
                                     std::size_t cap = 1'000'000);

} // namespace chakit
