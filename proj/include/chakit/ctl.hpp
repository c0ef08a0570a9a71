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

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace chakit {

/// CTL formula tree. Temporal operators carry an optional step bound.
struct CtlFormula {
    enum class Op { True, False, Atom, Not, And, Or, Implies, Iff, EX, AX, EF, AF, EG, AG, EU, AU };
    Op op = Op::True;
    std::string atom;
    std::optional<std::uint32_t> bound;
    std::shared_ptr<const CtlFormula> lhs;
    std::shared_ptr<const CtlFormula> rhs;

    [[nodiscard]] bool is_temporal() const { return op >= Op::EX; }
    [[nodiscard]] bool is_existential() const
    {
        return op == Op::EX || op == Op::EF || op == Op::EG || op == Op::EU;
    }
    [[nodiscard]] std::size_t depth() const;
    /// Every atom mentioned, sorted.
    [[nodiscard]] std::set<std::string> atoms() const;
};

using Ctl = std::shared_ptr<const CtlFormula>;

namespace ctl {
Ctl truth();
Ctl falsity();
Ctl atom(std::string name);
Ctl negation(Ctl f);
Ctl conj(Ctl a, Ctl b);
Ctl disj(Ctl a, Ctl b);
Ctl implies(Ctl a, Ctl b);
Ctl iff(Ctl a, Ctl b);
/// Unary temporal operator (EX, AX, EF, AF, EG, AG).
Ctl unary(CtlFormula::Op op, Ctl f, std::optional<std::uint32_t> bound = std::nullopt);
/// EU or AU.
Ctl until(CtlFormula::Op op, Ctl a, Ctl b, std::optional<std::uint32_t> bound = std::nullopt);
} // namespace ctl

/// Grammar, loosest first: `<->`, `->` (right associative), `|`, `&`, then
/// prefix `!` and the temporal operators `EX AX EF AF EG AG` (optionally
/// bounded as `AG<=20`), `E[f U g]`, `A[f U<=k g]`, parentheses, `true`,
/// `false` and atoms. Throws ParseError with the offending position.
Ctl parse_ctl(std::string_view text);

/// Canonical text; parse_ctl(to_string(f)) rebuilds f.
std::string to_string(const CtlFormula& f);
bool equal(const CtlFormula& a, const CtlFormula& b);

/// Explicit finite transition system with a total transition relation.
struct Kripke {
    std::vector<std::vector<std::size_t>> successors;
    std::vector<std::set<std::string>> labels;
    std::size_t initial = 0;
    /// Propositions that may be used in formulas even if no node carries them.
    std::set<std::string> declared;
    /// Optional display name per node.
    std::vector<std::string> names;

    [[nodiscard]] std::size_t size() const { return successors.size(); }
    /// Throws Error when some node has no successor.
    void check_total() const;
};

/// Node-wise truth of a formula plus the verdict at the initial node.
struct CheckResult {
    std::vector<bool> holds;
    bool initial = false;
};

/// Labeling algorithm over the core {EX, EU, EG}; bounded operators iterate
/// exactly k steps. Throws UnknownAtomError for atoms neither on any label
/// nor declared.
CheckResult model_check(const Kripke& k, const CtlFormula& f);

/// Closed system of a therapy: paths from the initial node are exactly the
/// possible executions. Memoryless therapies give one node per state;
/// finite-memory therapies one node per reachable history suffix. Throws
/// DeadEndError on a totality violation and TherapyError for tabular
/// therapies.
Kripke close_system(const Cha& cha, const Therapy& therapy);

/// State labels of the CHA plus all label names, declared.
std::set<std::string> declared_atoms(const Cha& cha);

} // namespace chakit
