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

#include "chakit/cost.hpp"
#include "chakit/ctl.hpp"
#include "chakit/game.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chakit {

/// One-step controllable predecessor on the quotient game graph: controller
/// nodes with some move into `target`, environment nodes with every move
/// into `target`, delay nodes whose successor is in `target`. The sink is
/// never a predecessor.
std::vector<bool> cpre(const QuotientGame& q, const std::vector<bool>& target);

/// Round-level predecessor over controller cells: cells where some menu
/// choice sends every environment reply (and the ensuing delay) into
/// `target`. `target` is indexed by controller cell; the sink never counts.
std::vector<bool> round_cpre(const QuotientGame& q, const std::vector<bool>& target);

enum class SynthesisStatus { Realizable, Unrealizable, Unverified };

std::string to_string(SynthesisStatus s);

struct SynthesisStats {
    std::size_t nodes = 0;
    std::size_t controller_cells = 0;
    std::size_t reachable_controller_nodes = 0;
    std::size_t winning_controller_cells = 0;
    std::size_t iterations = 0;
    std::int64_t scale = 1;
    std::size_t regions_per_location = 1;
};

/// Lasso trace through the closed round Kripke structure.
struct Trace {
    std::vector<std::size_t> nodes;
    std::optional<std::size_t> loop_start;
};

struct SynthesisResult {
    SynthesisStatus status = SynthesisStatus::Unrealizable;
    std::string goal;
    /// Per controller cell.
    std::vector<bool> winning;
    Strategy strategy;
    /// Menu entries consistent with every operator witness, per cell.
    std::vector<std::vector<std::uint16_t>> witness_moves;
    SynthesisStats stats;
    /// Filled when verification failed.
    std::optional<Trace> counterexample;
};

/// AG !bad. Unknown labels mark no node.
SynthesisResult solve_safety(const QuotientGame& q, const std::string& bad);

/// AF goal, or AF<=k goal.
SynthesisResult solve_reachability(const QuotientGame& q, const std::string& goal,
                                   std::optional<std::uint32_t> bound = std::nullopt);

/// Bottom-up fixpoints for A-operators (AG, AF, AX, A[U], bounded or not),
/// boolean connectives, and EF/EG/EX evaluated cooperatively; the result is
/// model-checked on the closed system and downgraded to Unverified on a
/// mismatch. Throws UnsupportedFragmentError naming the offending
/// subformula, UnknownAtomError for undeclared atoms.
SynthesisResult solve_ctl(const QuotientGame& q, const CtlFormula& f);

struct VerifyResult {
    bool holds = false;
    RoundKripke closed;
    std::optional<Trace> counterexample;
};

/// Composes the strategy with the game and model-checks `f`. Throws
/// PartialStrategyError when a reachable controller node has no choice.
VerifyResult verify_strategy(const QuotientGame& q, const Strategy& strategy, const CtlFormula& f);

/// Cost-aware post-pass: enumerates every strategy choosing among the
/// witness moves at reachable winning controller nodes (at most `cap`
/// strategies), keeps those that verify, scores each by the componentwise
/// worst-case discounted cost over `horizon` rounds, and returns the
/// Pareto front.
struct ScoredStrategy {
    Strategy strategy;
    CostVector worst_case;
};

struct ParetoStrategies {
    std::vector<ScoredStrategy> front;
    std::size_t enumerated = 0;
    bool capped = false;
};

ParetoStrategies pareto_strategies(const QuotientGame& q, const SynthesisResult& result, const CtlFormula& f,
                                   const CostModel& costs, std::size_t horizon, std::size_t cap = 4096);

/// Worst-case (per component) discounted cost of the closed system over
/// `horizon` rounds.
CostVector worst_case_cost(const QuotientGame& q, const Strategy& strategy, const CostModel& costs,
                           std::size_t horizon);

} // namespace chakit
