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

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace chakit {

using StateId = std::uint32_t;
using DrugId = std::uint32_t;

inline constexpr std::size_t max_drugs = 64;

/// A set of drugs given at the same time, stored as a bit set over the
/// model's drug universe.
class Cocktail {
public:
    constexpr Cocktail() = default;
    constexpr explicit Cocktail(std::uint64_t bits) : bits_(bits) {}

    static Cocktail of(std::initializer_list<DrugId> drugs);

    [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] constexpr bool contains(DrugId d) const { return (bits_ >> d) & 1U; }
    [[nodiscard]] constexpr bool intersects(Cocktail other) const { return (bits_ & other.bits_) != 0; }
    [[nodiscard]] constexpr bool subset_of(Cocktail other) const { return (bits_ & ~other.bits_) == 0; }
    [[nodiscard]] constexpr Cocktail with(DrugId d) const { return Cocktail(bits_ | (std::uint64_t{1} << d)); }
    [[nodiscard]] constexpr Cocktail united(Cocktail other) const { return Cocktail(bits_ | other.bits_); }
    [[nodiscard]] std::size_t size() const;
    /// Members in increasing id order.
    [[nodiscard]] std::vector<DrugId> drugs() const;

    friend constexpr auto operator<=>(Cocktail, Cocktail) = default;

private:
    std::uint64_t bits_ = 0;
};

/// True iff the edge labeled `edge_inhibitors` is blocked by `cocktail`.
constexpr bool is_inhibited(Cocktail edge_inhibitors, Cocktail cocktail)
{
    return edge_inhibitors.intersects(cocktail);
}

/// Ordered set of drug names. Ids are positions in declaration order.
class DrugUniverse {
public:
    DrugUniverse() = default;
    explicit DrugUniverse(std::vector<std::string> names);

    DrugId add(std::string name);
    [[nodiscard]] std::size_t size() const { return names_.size(); }
    [[nodiscard]] const std::string& name(DrugId id) const { return names_.at(id); }
    [[nodiscard]] const std::vector<std::string>& names() const { return names_; }
    [[nodiscard]] std::optional<DrugId> find(std::string_view name) const;
    /// Throws UnknownIdError.
    [[nodiscard]] DrugId at(std::string_view name) const;
    [[nodiscard]] Cocktail cocktail(std::span<const std::string> names) const;
    [[nodiscard]] Cocktail all() const;
    [[nodiscard]] std::vector<std::string> names_of(Cocktail c) const;
    /// "{}" or "{A,B}" in declaration order.
    [[nodiscard]] std::string format(Cocktail c) const;

    friend bool operator==(const DrugUniverse& a, const DrugUniverse& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, DrugId> index_;
};

/// Edge (source, D, target): the progression source -> target, blocked by any
/// drug in D. Implicit self-loops added by the file flag are marked so they
/// do not get written back out.
struct Edge {
    StateId source = 0;
    Cocktail inhibitors;
    StateId target = 0;
    bool implicit = false;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Untimed cancer hybrid automaton.
struct Cha {
    DrugUniverse drugs;
    std::vector<std::string> states;
    std::vector<std::set<std::string>> labels;
    std::vector<Edge> edges;
    StateId initial = 0;

    [[nodiscard]] std::size_t state_count() const { return states.size(); }
    [[nodiscard]] std::optional<StateId> find_state(std::string_view name) const;
    /// Throws UnknownIdError.
    [[nodiscard]] StateId state_at(std::string_view name) const;
    [[nodiscard]] bool has_label(StateId v, const std::string& prop) const { return labels.at(v).count(prop) != 0; }
    /// Adds an uninhibitable self-loop to every state.
    void add_implicit_self_loops();
};

/// Finite run, or a lasso when `loop_start` is set: the run continues from
/// states.back() back to states[*loop_start] forever. `cocktails[i]`, when
/// present, is the cocktail active for the step leaving states[i].
struct Run {
    std::vector<StateId> states;
    std::vector<Cocktail> cocktails;
    std::optional<std::size_t> loop_start;

    [[nodiscard]] std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }
    /// i-th state of the (possibly infinite) unrolled run.
    [[nodiscard]] StateId at(std::size_t i) const;
    friend bool operator==(const Run&, const Run&) = default;
};

/// Targets of every edge from `state` not inhibited by `cocktail`, sorted and
/// unique. Throws UnknownIdError for a bad state.
std::vector<StateId> successors(const Cha& cha, StateId state, Cocktail cocktail);

/// True iff consecutive states (and the lasso back edge) are connected and no
/// annotated cocktail inhibits every connecting edge.
bool is_run_of(const Cha& cha, const Run& run);

struct Finding {
    enum class Kind { DuplicateState, DanglingState, UnknownDrug, BadInitial, Totality, Guard, Invariant, Rate, Bound, Warning };
    Kind kind;
    std::string message;
    std::optional<StateId> state;
    std::optional<Cocktail> cocktail;
};

struct ValidationReport {
    std::vector<Finding> findings;

    /// Warnings do not make a model ill-formed.
    [[nodiscard]] bool ok() const;
    [[nodiscard]] std::vector<const Finding*> errors() const;
    [[nodiscard]] std::vector<const Finding*> warnings() const;
};

/// Structural checks plus the totality assumption. Totality is checked over
/// the minimal hitting sets of the inhibitor sets of each state's outgoing
/// edges; each violation is reported with its minimal blocking cocktail.
ValidationReport validate(const Cha& cha);

/// Minimal cocktails (by inclusion) that block every outgoing edge of
/// `state`. Empty when some outgoing edge is uninhibitable.
std::vector<Cocktail> minimal_blocking_cocktails(const Cha& cha, StateId state);

/// Small fluent helper for building models in code.
class ChaBuilder {
public:
    ChaBuilder& drug(std::string name);
    ChaBuilder& state(std::string name, std::set<std::string> labels = {});
    ChaBuilder& edge(std::string_view from, std::string_view to, std::vector<std::string> inhibitors = {});
    ChaBuilder& initial(std::string_view name);
    ChaBuilder& implicit_self_loops();
    [[nodiscard]] Cha build() const;

private:
    Cha cha_;
    bool loops_ = false;
};

} // namespace chakit
