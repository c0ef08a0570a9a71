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
#include "chakit/timed.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chakit {

using CostVector = std::vector<double>;

/// Tolerance for every floating-point cost comparison.
inline constexpr double cost_tolerance = 1e-9;

/// n-dimensional cost model shared by the untimed and timed cost functions.
struct CostModel {
    std::size_t dimension = 1;
    /// state_costs[v], each of length `dimension`.
    std::vector<CostVector> state_costs;
    /// drug_costs[d]; an unlisted cocktail costs the sum of its drugs.
    std::vector<CostVector> drug_costs;
    std::map<Cocktail, CostVector> cocktail_costs;
    /// delta, for untimed runs.
    double discount = 1.0;
    /// d, for timed runs.
    double timed_discount = 1.0;

    /// All-zero model of the right shape.
    static CostModel zero(std::size_t dimension, std::size_t states, std::size_t drugs);

    [[nodiscard]] CostVector state_cost(StateId v) const;
    [[nodiscard]] CostVector cocktail_cost(Cocktail c) const;
    /// Shape and range checks. Throws DimensionMismatchError or ModelError.
    void check(std::size_t states, std::size_t drugs) const;
};

struct CostResult {
    CostVector value;
    /// Upper bound on what the unsummed tail can still add to any entry;
    /// 0 when the value is exact, nullopt when no finite bound exists.
    std::optional<double> tail_radius = 0.0;
};

/// Discounted cost sum_{i < horizon} delta^i (c(v_i) + c(theta(S_i))) of an
/// untimed run. For a finite run the default horizon is its length. For a
/// lasso with delta < 1 and no horizon the infinite sum is returned (exact
/// for memoryless therapies). Throws DivergenceError for a lasso with
/// delta = 1 and no horizon.
CostResult untimed_cost(const Run& run, const Therapy& therapy, const CostModel& model,
                        std::optional<std::size_t> horizon = std::nullopt);

/// (1/d)(e^{-d t0} - e^{-d t1}) (c(v) + c(C)): the cost of staying in v under
/// C over [t0, t1].
CostVector segment_cost(const CostModel& model, StateId v, Cocktail c, double t0, double t1);

/// Exponentially discounted cost of a timed run, whose delay steps carry
/// their cocktails. `start_time` offsets every tau (for cost additivity over
/// concatenation). Lassos are summed in closed form; their cycle must have
/// positive duration.
CostVector timed_cost(const TimedCha& tc, const TimedRun& run, const CostModel& model, double start_time = 0.0);

/// x <= y everywhere and x < y somewhere (with cost_tolerance).
bool pareto_dominates(const CostVector& x, const CostVector& y);

/// Indices of the vectors not dominated by any other, in input order.
std::vector<std::size_t> pareto_front(const std::vector<CostVector>& vectors);

/// Finite space of memoryless therapies: every map state -> menu entry.
struct TherapySpace {
    std::vector<Cocktail> menu;
    /// Refuse spaces larger than this.
    std::size_t cap = 100'000;
};

/// The space's members in lexicographic order (last state varies fastest,
/// menu order within each state). Throws ExplosionError above the cap.
std::vector<MemorylessTherapy> enumerate_therapies(const Cha& cha, const TherapySpace& space);

/// Costs of every possible execution of `horizon` steps, deduplicated and
/// sorted, with a common tail radius.
struct CostSet {
    std::vector<CostVector> costs;
    std::optional<double> tail_radius;
};

CostSet execution_costs(const Cha& cha, const MemorylessTherapy& therapy, const CostModel& model, std::size_t horizon,
                        std::size_t cap = 1'000'000);

struct DominanceVerdict {
    /// Verdict on the horizon-truncated costs.
    bool dominates = false;
    /// False when the tail radii could overturn the verdict.
    bool conclusive = true;
};

/// Therapy-level dominance: every cost of `a` dominates every cost of `b`.
DominanceVerdict set_dominates(const CostSet& a, const CostSet& b);

struct CandidateReport {
    std::vector<MemorylessTherapy> space;
    std::vector<CostSet> costs;
    /// Indices into `space` of the non-dominated therapies.
    std::vector<std::size_t> candidates;
    /// (dominator, dominated) pairs that decided an exclusion.
    std::vector<std::pair<std::size_t, std::size_t>> dominance;
    /// Dominating pairs whose verdict a tail bound could overturn.
    std::vector<std::pair<std::size_t, std::size_t>> inconclusive;
    /// Number of non-dominance verdicts a tail bound could overturn.
    std::size_t inconclusive_non_dominance = 0;
};

/// Candidate therapies over all executions of `horizon` steps.
CandidateReport candidate_therapies(const Cha& cha, const CostModel& model, const TherapySpace& space,
                                    std::size_t horizon);

struct FamilyMember {
    Cha cha;
    CostModel costs;
};

/// Reorders every member's states and drugs to match the first member (by
/// name). Throws DomainMismatchError when the state or drug sets differ.
std::vector<FamilyMember> align_family(const std::vector<FamilyMember>& family);

struct UniversalReport {
    std::vector<MemorylessTherapy> space;
    std::vector<CandidateReport> members;
    std::vector<std::size_t> universal;
};

/// Therapies that are candidates in every member.
UniversalReport universal_candidates(const std::vector<FamilyMember>& family, const TherapySpace& space,
                                     std::size_t horizon);

/// True iff `therapies` meets the candidate set of every member. Therapies
/// refer to the first member's state order.
bool covers(const std::vector<MemorylessTherapy>& therapies, const std::vector<FamilyMember>& family,
            const TherapySpace& space, std::size_t horizon);

enum class RiskAttitude { Maximin, Maximax };

/// Optional post-filter on candidates: keeps those minimizing the worst
/// (maximin) or best (maximax) aggregate cost, the aggregate being the sum
/// of the components.
std::vector<std::size_t> prune_candidates(const CandidateReport& report, RiskAttitude attitude);

} // namespace chakit
