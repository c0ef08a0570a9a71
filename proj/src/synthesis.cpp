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

#include "chakit/synthesis.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace chakit {

using Op = CtlFormula::Op;
using Turn = QuotientGame::Turn;

std::vector<bool> cpre(const QuotientGame& q, const std::vector<bool>& target)
{
    std::vector<bool> out(q.node_count(), false);
    for (std::size_t n = 0; n < q.sink; ++n) {
        switch (q.turn(n)) {
        case Turn::Controller:
            for (std::size_t j = 0; j < q.menu_size() && !out[n]; ++j)
                out[n] = target[q.controller_successor(n, j)];
            break;
        case Turn::Environment: {
            const auto succ = q.environment_successors(n);
            out[n] = std::all_of(succ.begin(), succ.end(), [&](std::size_t t) { return bool(target[t]); });
            break;
        }
        case Turn::Delay: out[n] = target[q.delay_target[q.cell(n)]]; break;
        }
    }
    return out;
}

std::string to_string(SynthesisStatus s)
{
    switch (s) {
    case SynthesisStatus::Realizable: return "realizable";
    case SynthesisStatus::Unrealizable: return "unrealizable";
    case SynthesisStatus::Unverified: return "strategy-found-but-unverified";
    }
    return "?";
}

namespace {

constexpr std::size_t infinite = std::numeric_limits<std::size_t>::max();

/// Round graph over controller cells; cell `cells` stands for the sink.
/// Pair p = cell * k + j is "cell picks menu entry j".
struct RoundGraph {
    std::size_t cells = 0;
    std::size_t k = 0;
    std::vector<std::size_t> offset;
    std::vector<std::size_t> succ;
    std::vector<std::size_t> roffset;
    std::vector<std::size_t> rpair;

    [[nodiscard]] std::size_t sink() const { return cells; }
    [[nodiscard]] std::span<const std::size_t> successors(std::size_t p) const
    {
        return {succ.data() + offset[p], offset[p + 1] - offset[p]};
    }
    [[nodiscard]] std::span<const std::size_t> predecessors(std::size_t c) const
    {
        return {rpair.data() + roffset[c], roffset[c + 1] - roffset[c]};
    }
};

RoundGraph build_round_graph(const QuotientGame& q)
{
    RoundGraph g;
    g.cells = q.sink / 3;
    g.k = q.menu_size();
    const auto pairs = g.cells * g.k;
    g.offset.assign(pairs + 1, 0);
    std::vector<std::size_t> tmp;
    for (std::size_t c = 0; c < g.cells; ++c) {
        for (std::size_t j = 0; j < g.k; ++j) {
            tmp.clear();
            for (auto t : q.environment_successors(q.controller_successor(c * 3, j))) {
                const auto next = t == q.sink ? q.sink : q.delay_target[q.cell(t)];
                tmp.push_back(next == q.sink ? g.cells : next / 3);
            }
            std::sort(tmp.begin(), tmp.end());
            tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
            g.succ.insert(g.succ.end(), tmp.begin(), tmp.end());
            g.offset[c * g.k + j + 1] = g.succ.size();
        }
    }
    g.roffset.assign(g.cells + 2, 0);
    for (auto s : g.succ)
        ++g.roffset[s + 1];
    for (std::size_t c = 0; c <= g.cells; ++c)
        g.roffset[c + 1] += g.roffset[c];
    g.rpair.resize(g.succ.size());
    auto fill = g.roffset;
    for (std::size_t p = 0; p < pairs; ++p)
        for (auto s : g.successors(p))
            g.rpair[fill[s]++] = p;
    return g;
}

using CellSet = std::vector<bool>;
using Mask = std::uint64_t;

struct Witness {
    /// Per cell; 0 = no obligation at this cell.
    std::vector<Mask> mask;
};

class Solver {
public:
    Solver(const QuotientGame& q) : q_(q), g_(build_round_graph(q))
    {
        if (q.menu_size() > 64)
            throw Error("solver supports at most 64 menu entries");
    }

    const RoundGraph& graph() const { return g_; }
    std::size_t iterations() const { return iterations_; }
    const std::vector<Witness>& witnesses() const { return witnesses_; }

    CellSet atom(const std::string& name) const
    {
        CellSet s(g_.cells, false);
        for (std::size_t c = 0; c < g_.cells; ++c)
            s[c] = q_.game.model.labels[q_.game.state_of(c / q_.regions_per_location)].count(name) != 0;
        return s;
    }

    /// Controller-forced A[a U<=k b]; AF when a is everything.
    CellSet until(const CellSet& a, const CellSet& b, std::optional<std::uint32_t> bound)
    {
        const auto cells = g_.cells;
        const auto k = g_.k;
        std::vector<std::size_t> rank(cells + 1, infinite);
        std::vector<std::size_t> pair_rank(cells * k, infinite);
        std::vector<std::size_t> remaining(cells * k);
        for (std::size_t p = 0; p < cells * k; ++p)
            remaining[p] = g_.successors(p).size();
        std::deque<std::size_t> queue;
        for (std::size_t c = 0; c < cells; ++c)
            if (b[c]) {
                rank[c] = 0;
                queue.push_back(c);
            }
        while (!queue.empty()) {
            const auto s = queue.front();
            queue.pop_front();
            ++iterations_;
            if (bound && rank[s] >= *bound)
                continue;
            for (auto p : g_.predecessors(s)) {
                if (--remaining[p] != 0)
                    continue;
                pair_rank[p] = rank[s] + 1;
                const auto c = p / k;
                if (rank[c] == infinite && a[c]) {
                    rank[c] = rank[s] + 1;
                    queue.push_back(c);
                }
            }
        }
        CellSet win(cells, false);
        Witness w{std::vector<Mask>(cells, 0)};
        for (std::size_t c = 0; c < cells; ++c) {
            win[c] = rank[c] != infinite;
            if (!win[c] || rank[c] == 0)
                continue;
            for (std::size_t j = 0; j < k; ++j)
                if (pair_rank[c * k + j] <= rank[c])
                    w.mask[c] |= Mask{1} << j;
        }
        witnesses_.push_back(std::move(w));
        return win;
    }

    /// Controller-forced AG<=k f.
    CellSet globally(const CellSet& f, std::optional<std::uint32_t> bound)
    {
        const auto cells = g_.cells;
        const auto k = g_.k;
        // Rounds the environment needs to force a violation.
        std::vector<std::size_t> rank(cells + 1, infinite);
        std::vector<std::size_t> pair_rank(cells * k, infinite);
        std::vector<std::size_t> remaining(cells, k);
        std::deque<std::size_t> queue;
        rank[g_.sink()] = 0;
        queue.push_back(g_.sink());
        for (std::size_t c = 0; c < cells; ++c)
            if (!f[c]) {
                rank[c] = 0;
                queue.push_back(c);
            }
        while (!queue.empty()) {
            const auto s = queue.front();
            queue.pop_front();
            ++iterations_;
            if (bound && rank[s] > *bound)
                continue;
            for (auto p : g_.predecessors(s)) {
                if (pair_rank[p] != infinite)
                    continue;
                pair_rank[p] = rank[s] + 1;
                const auto c = p / k;
                if (--remaining[c] == 0 && rank[c] == infinite) {
                    rank[c] = rank[s] + 1;
                    queue.push_back(c);
                }
            }
        }
        CellSet win(cells, false);
        Witness w{std::vector<Mask>(cells, 0)};
        for (std::size_t c = 0; c < cells; ++c) {
            win[c] = bound ? rank[c] > *bound : rank[c] == infinite;
            if (!win[c])
                continue;
            std::size_t best = 0;
            for (std::size_t j = 0; j < k; ++j)
                best = std::max(best, pair_rank[c * k + j]);
            for (std::size_t j = 0; j < k; ++j)
                if (pair_rank[c * k + j] == best)
                    w.mask[c] |= Mask{1} << j;
        }
        witnesses_.push_back(std::move(w));
        return win;
    }

    CellSet next(const CellSet& f)
    {
        CellSet win(g_.cells, false);
        Witness w{std::vector<Mask>(g_.cells, 0)};
        for (std::size_t c = 0; c < g_.cells; ++c) {
            for (std::size_t j = 0; j < g_.k; ++j) {
                const auto succ = g_.successors(c * g_.k + j);
                if (std::all_of(succ.begin(), succ.end(), [&](std::size_t s) { return s != g_.sink() && f[s]; })) {
                    win[c] = true;
                    w.mask[c] |= Mask{1} << j;
                }
            }
        }
        ++iterations_;
        witnesses_.push_back(std::move(w));
        return win;
    }

    /// Cooperative EX f.
    CellSet exists_next(const CellSet& f)
    {
        CellSet win(g_.cells, false);
        Witness w{std::vector<Mask>(g_.cells, 0)};
        for (std::size_t c = 0; c < g_.cells; ++c)
            for (std::size_t j = 0; j < g_.k; ++j)
                for (auto s : g_.successors(c * g_.k + j))
                    if (s != g_.sink() && f[s]) {
                        win[c] = true;
                        w.mask[c] |= Mask{1} << j;
                    }
        ++iterations_;
        witnesses_.push_back(std::move(w));
        return win;
    }

    /// Cooperative EF<=k f.
    CellSet exists_finally(const CellSet& f, std::optional<std::uint32_t> bound)
    {
        std::vector<std::size_t> dist(g_.cells + 1, infinite);
        std::deque<std::size_t> queue;
        for (std::size_t c = 0; c < g_.cells; ++c)
            if (f[c]) {
                dist[c] = 0;
                queue.push_back(c);
            }
        while (!queue.empty()) {
            const auto s = queue.front();
            queue.pop_front();
            ++iterations_;
            if (bound && dist[s] >= *bound)
                continue;
            for (auto p : g_.predecessors(s)) {
                const auto c = p / g_.k;
                if (dist[c] == infinite) {
                    dist[c] = dist[s] + 1;
                    queue.push_back(c);
                }
            }
        }
        CellSet win(g_.cells, false);
        Witness w{std::vector<Mask>(g_.cells, 0)};
        for (std::size_t c = 0; c < g_.cells; ++c) {
            win[c] = dist[c] != infinite;
            if (!win[c] || dist[c] == 0)
                continue;
            for (std::size_t j = 0; j < g_.k; ++j)
                for (auto s : g_.successors(c * g_.k + j))
                    if (s != g_.sink() && dist[s] + 1 == dist[c])
                        w.mask[c] |= Mask{1} << j;
        }
        witnesses_.push_back(std::move(w));
        return win;
    }

    /// Cooperative EG<=k f.
    CellSet exists_globally(const CellSet& f, std::optional<std::uint32_t> bound)
    {
        CellSet z = f;
        for (std::uint64_t i = 0; !bound || i < *bound; ++i) {
            ++iterations_;
            CellSet next(g_.cells, false);
            for (std::size_t c = 0; c < g_.cells; ++c) {
                if (!f[c])
                    continue;
                for (std::size_t p = c * g_.k; p < (c + 1) * g_.k && !next[c]; ++p)
                    for (auto s : g_.successors(p))
                        if (s != g_.sink() && z[s]) {
                            next[c] = true;
                            break;
                        }
            }
            if (next == z)
                break;
            z = std::move(next);
        }
        Witness w{std::vector<Mask>(g_.cells, 0)};
        for (std::size_t c = 0; c < g_.cells; ++c) {
            if (!z[c])
                continue;
            for (std::size_t j = 0; j < g_.k; ++j)
                for (auto s : g_.successors(c * g_.k + j))
                    if (s != g_.sink() && z[s])
                        w.mask[c] |= Mask{1} << j;
        }
        witnesses_.push_back(std::move(w));
        return z;
    }

private:
    const QuotientGame& q_;
    RoundGraph g_;
    std::size_t iterations_ = 0;
    std::vector<Witness> witnesses_;
};

/// Negation normal form; implications and equivalences expanded.
Ctl nnf(const Ctl& f, bool negated)
{
    using namespace ctl;
    switch (f->op) {
    case Op::True: return negated ? falsity() : truth();
    case Op::False: return negated ? truth() : falsity();
    case Op::Atom: return negated ? negation(f) : f;
    case Op::Not: return nnf(f->lhs, !negated);
    case Op::And:
        return negated ? disj(nnf(f->lhs, true), nnf(f->rhs, true)) : conj(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Or:
        return negated ? conj(nnf(f->lhs, true), nnf(f->rhs, true)) : disj(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Implies:
        return negated ? conj(nnf(f->lhs, false), nnf(f->rhs, true)) : disj(nnf(f->lhs, true), nnf(f->rhs, false));
    case Op::Iff:
        if (negated)
            return disj(conj(nnf(f->lhs, false), nnf(f->rhs, true)), conj(nnf(f->lhs, true), nnf(f->rhs, false)));
        return conj(disj(nnf(f->lhs, true), nnf(f->rhs, false)), disj(nnf(f->lhs, false), nnf(f->rhs, true)));
    case Op::EX: return unary(negated ? Op::AX : Op::EX, nnf(f->lhs, negated), f->bound);
    case Op::AX: return unary(negated ? Op::EX : Op::AX, nnf(f->lhs, negated), f->bound);
    case Op::EF: return unary(negated ? Op::AG : Op::EF, nnf(f->lhs, negated), f->bound);
    case Op::AG: return unary(negated ? Op::EF : Op::AG, nnf(f->lhs, negated), f->bound);
    case Op::EG: return unary(negated ? Op::AF : Op::EG, nnf(f->lhs, negated), f->bound);
    case Op::AF: return unary(negated ? Op::EG : Op::AF, nnf(f->lhs, negated), f->bound);
    case Op::EU:
    case Op::AU: {
        if (!negated)
            return until(f->op, nnf(f->lhs, false), nnf(f->rhs, false), f->bound);
        // !Q[a U b] = Q'[!b U (!a & !b)] | Q'G !b with the dual quantifier.
        const auto dual_until = f->op == Op::AU ? Op::EU : Op::AU;
        const auto dual_globally = f->op == Op::AU ? Op::EG : Op::AG;
        auto not_a = nnf(f->lhs, true);
        auto not_b = nnf(f->rhs, true);
        return disj(until(dual_until, not_b, conj(not_a, not_b), f->bound), unary(dual_globally, not_b, f->bound));
    }
    }
    return f;
}

CellSet evaluate(Solver& s, const Ctl& f, const Ctl& original_root)
{
    const auto cells = s.graph().cells;
    switch (f->op) {
    case Op::True: return CellSet(cells, true);
    case Op::False: return CellSet(cells, false);
    case Op::Atom: return s.atom(f->atom);
    case Op::Not: {
        if (f->lhs->op != Op::Atom)
            throw Error("internal: negation not in normal form");
        auto a = s.atom(f->lhs->atom);
        a.flip();
        return a;
    }
    case Op::And:
    case Op::Or: {
        const auto a = evaluate(s, f->lhs, original_root);
        const auto b = evaluate(s, f->rhs, original_root);
        CellSet out(cells);
        for (std::size_t c = 0; c < cells; ++c)
            out[c] = f->op == Op::And ? (a[c] && b[c]) : (a[c] || b[c]);
        return out;
    }
    case Op::AX: return s.next(evaluate(s, f->lhs, original_root));
    case Op::AG: return s.globally(evaluate(s, f->lhs, original_root), f->bound);
    case Op::AF: return s.until(CellSet(cells, true), evaluate(s, f->lhs, original_root), f->bound);
    case Op::AU: {
        const auto a = evaluate(s, f->lhs, original_root);
        return s.until(a, evaluate(s, f->rhs, original_root), f->bound);
    }
    case Op::EX: return s.exists_next(evaluate(s, f->lhs, original_root));
    case Op::EF: return s.exists_finally(evaluate(s, f->lhs, original_root), f->bound);
    case Op::EG: return s.exists_globally(evaluate(s, f->lhs, original_root), f->bound);
    case Op::EU:
        if (f->lhs->op == Op::True)
            return s.exists_finally(evaluate(s, f->rhs, original_root), f->bound);
        throw UnsupportedFragmentError("E[. U .] with a left operand other than true is outside the synthesis "
                                       "fragment: " +
                                       to_string(*f));
    case Op::Implies:
    case Op::Iff: break;
    }
    throw Error("internal: formula not in normal form");
}

void check_atoms(const QuotientGame& q, const CtlFormula& f)
{
    std::set<std::string> known{timelock_label};
    for (const auto& l : q.game.model.labels)
        known.insert(l.begin(), l.end());
    for (const auto& a : f.atoms())
        if (!known.count(a))
            throw UnknownAtomError("unknown atom '" + a + "'");
}

/// Rejects E[f U g] (f not true) before any work, naming the subformula as
/// written by the user where possible.
void check_fragment(const CtlFormula& f, bool negated)
{
    switch (f.op) {
    case Op::Not: check_fragment(*f.lhs, !negated); return;
    case Op::EU:
    case Op::AU: {
        const bool existential = (f.op == Op::EU) != negated;
        if (existential && (negated || f.lhs->op != Op::True))
            throw UnsupportedFragmentError("subformula '" + to_string(f) +
                                           "' needs an existential until with a non-trivial left operand, which "
                                           "is outside the synthesis fragment");
        break;
    }
    default: break;
    }
    if (f.op == Op::Iff) {
        // Both polarities of each side occur after expansion.
        check_fragment(*f.lhs, false);
        check_fragment(*f.lhs, true);
        check_fragment(*f.rhs, false);
        check_fragment(*f.rhs, true);
        return;
    }
    if (f.lhs)
        check_fragment(*f.lhs, f.op == Op::Implies ? !negated : negated);
    if (f.rhs)
        check_fragment(*f.rhs, negated);
}

Trace lasso_from(const Kripke& k, std::vector<std::size_t> path)
{
    std::map<std::size_t, std::size_t> seen;
    for (std::size_t i = 0; i < path.size(); ++i)
        seen.emplace(path[i], i);
    while (true) {
        const auto next = k.successors[path.back()].front();
        if (auto it = seen.find(next); it != seen.end())
            return Trace{path, it->second};
        seen.emplace(next, path.size());
        path.push_back(next);
    }
}

Trace counterexample(const Kripke& k, const CtlFormula& f)
{
    const auto bound = f.bound.value_or(static_cast<std::uint32_t>(k.size()));
    if (f.op == Op::AG) {
        const auto bad = model_check(k, *f.lhs).holds;
        std::vector<std::size_t> parent(k.size(), infinite);
        std::vector<std::size_t> depth(k.size(), infinite);
        std::deque<std::size_t> queue{k.initial};
        depth[k.initial] = 0;
        while (!queue.empty()) {
            const auto n = queue.front();
            queue.pop_front();
            if (!bad[n]) {
                std::vector<std::size_t> path;
                for (auto m = n; m != infinite; m = parent[m])
                    path.push_back(m);
                std::reverse(path.begin(), path.end());
                return lasso_from(k, path);
            }
            if (depth[n] >= bound)
                continue;
            for (auto m : k.successors[n])
                if (depth[m] == infinite) {
                    depth[m] = depth[n] + 1;
                    parent[m] = n;
                    queue.push_back(m);
                }
        }
    }
    if (f.op == Op::AF) {
        const auto avoid = ctl::negation(f.lhs);
        std::vector<std::size_t> path{k.initial};
        const auto steps = std::min<std::size_t>(bound, 10'000);
        for (std::size_t i = 0; i < steps; ++i) {
            const auto rest = ctl::unary(Op::EG, avoid, f.bound ? std::optional<std::uint32_t>(bound - i - 1)
                                                                : std::nullopt);
            const auto ok = model_check(k, *rest).holds;
            std::size_t chosen = infinite;
            for (auto m : k.successors[path.back()])
                if (ok[m]) {
                    chosen = m;
                    break;
                }
            if (chosen == infinite)
                break;
            if (!f.bound && std::find(path.begin(), path.end(), chosen) != path.end()) {
                const auto at = static_cast<std::size_t>(std::find(path.begin(), path.end(), chosen) - path.begin());
                return Trace{path, at};
            }
            path.push_back(chosen);
        }
        return lasso_from(k, path);
    }
    return lasso_from(k, {k.initial});
}

} // namespace

std::vector<bool> round_cpre(const QuotientGame& q, const std::vector<bool>& target)
{
    const auto g = build_round_graph(q);
    std::vector<bool> out(g.cells, false);
    for (std::size_t c = 0; c < g.cells; ++c)
        for (std::size_t j = 0; j < g.k && !out[c]; ++j) {
            const auto succ = g.successors(c * g.k + j);
            out[c] = std::all_of(succ.begin(), succ.end(),
                                 [&](std::size_t s) { return s != g.sink() && bool(target[s]); });
        }
    return out;
}

VerifyResult verify_strategy(const QuotientGame& q, const Strategy& strategy, const CtlFormula& f)
{
    VerifyResult r;
    r.closed = round_kripke(q, &strategy);
    const auto check = model_check(r.closed.kripke, f);
    r.holds = check.initial;
    if (!r.holds) {
        auto trace = counterexample(r.closed.kripke, f);
        for (auto& n : trace.nodes)
            n = r.closed.game_node[n];
        r.counterexample = std::move(trace);
    }
    return r;
}

SynthesisResult solve_ctl(const QuotientGame& q, const CtlFormula& f)
{
    check_atoms(q, f);
    check_fragment(f, false);
    auto root = std::make_shared<const CtlFormula>(f);
    const auto normal = nnf(root, false);

    Solver solver(q);
    SynthesisResult r;
    r.goal = to_string(f);
    r.winning = evaluate(solver, normal, root);

    const auto& g = solver.graph();
    const Mask all = g.k == 64 ? ~Mask{0} : (Mask{1} << g.k) - 1;
    r.strategy.choice.assign(g.cells, 0);
    r.witness_moves.assign(g.cells, {});
    // Witnesses were recorded bottom-up; preorder priority is root first.
    const auto& witnesses = solver.witnesses();
    for (std::size_t c = 0; c < g.cells; ++c) {
        Mask allowed = all;
        bool obligated = false;
        for (auto it = witnesses.rbegin(); it != witnesses.rend(); ++it) {
            const auto m = it->mask[c];
            if (m == 0)
                continue;
            obligated = true;
            if ((allowed & m) != 0)
                allowed &= m;
        }
        r.strategy.choice[c] = static_cast<std::uint16_t>(std::countr_zero(allowed));
        if (obligated)
            for (std::size_t j = 0; j < g.k; ++j)
                if ((allowed >> j) & 1U)
                    r.witness_moves[c].push_back(static_cast<std::uint16_t>(j));
    }

    r.stats.nodes = q.node_count();
    r.stats.controller_cells = g.cells;
    r.stats.iterations = solver.iterations();
    r.stats.scale = q.scale;
    r.stats.regions_per_location = q.regions_per_location;
    r.stats.winning_controller_cells = static_cast<std::size_t>(std::count(r.winning.begin(), r.winning.end(), true));

    const auto init = q.initial / 3;
    const auto verdict = verify_strategy(q, r.strategy, f);
    r.stats.reachable_controller_nodes = verdict.closed.kripke.size();
    if (!r.winning[init]) {
        r.status = SynthesisStatus::Unrealizable;
    } else if (verdict.holds) {
        r.status = SynthesisStatus::Realizable;
    } else {
        r.status = SynthesisStatus::Unverified;
        r.counterexample = verdict.counterexample;
    }
    return r;
}

namespace {

bool label_known(const QuotientGame& q, const std::string& name)
{
    return std::any_of(q.game.model.labels.begin(), q.game.model.labels.end(),
                       [&](const std::set<std::string>& l) { return l.count(name) != 0; });
}

} // namespace

SynthesisResult solve_safety(const QuotientGame& q, const std::string& bad)
{
    // A label nobody carries is never reached: the goal degenerates to AG true.
    const auto f = label_known(q, bad) ? ctl::unary(Op::AG, ctl::negation(ctl::atom(bad)))
                                       : ctl::unary(Op::AG, ctl::truth());
    auto r = solve_ctl(q, *f);
    r.goal = to_string(*ctl::unary(Op::AG, ctl::negation(ctl::atom(bad))));
    return r;
}

SynthesisResult solve_reachability(const QuotientGame& q, const std::string& goal, std::optional<std::uint32_t> bound)
{
    const auto f = ctl::unary(Op::AF, label_known(q, goal) ? ctl::atom(goal) : ctl::falsity(), bound);
    auto r = solve_ctl(q, *f);
    r.goal = to_string(*ctl::unary(Op::AF, ctl::atom(goal), bound));
    return r;
}

CostVector worst_case_cost(const QuotientGame& q, const Strategy& strategy, const CostModel& costs,
                           std::size_t horizon)
{
    const auto closed = round_kripke(q, &strategy);
    const auto& k = closed.kripke;
    const bool untimed = q.game.model.clock_count() == 0 && !q.game.model.environment_may_idle;
    std::vector<CostVector> value(k.size(), CostVector(costs.dimension, 0.0));
    for (std::size_t t = horizon; t-- > 0;) {
        std::vector<CostVector> next(k.size(), CostVector(costs.dimension, 0.0));
        for (std::size_t n = 0; n < k.size(); ++n) {
            const auto node = closed.game_node[n];
            CostVector here(costs.dimension, 0.0);
            if (node != q.sink) {
                const auto c = q.game.menu[strategy.choice[q.cell(node)]];
                if (untimed) {
                    here = costs.state_cost(q.state(node));
                    const auto cc = costs.cocktail_cost(c);
                    const double w = std::pow(costs.discount, static_cast<double>(t));
                    for (std::size_t i = 0; i < here.size(); ++i)
                        here[i] = w * (here[i] + cc[i]);
                } else {
                    here = segment_cost(costs, q.state(node), c, static_cast<double>(t), static_cast<double>(t + 1));
                }
            }
            CostVector worst(costs.dimension, 0.0);
            for (auto m : k.successors[n])
                for (std::size_t i = 0; i < worst.size(); ++i)
                    worst[i] = std::max(worst[i], value[m][i]);
            for (std::size_t i = 0; i < here.size(); ++i)
                next[n][i] = here[i] + worst[i];
        }
        value = std::move(next);
    }
    return value[k.initial];
}

ParetoStrategies pareto_strategies(const QuotientGame& q, const SynthesisResult& result, const CtlFormula& f,
                                   const CostModel& costs, std::size_t horizon, std::size_t cap)
{
    ParetoStrategies out;
    if (result.status != SynthesisStatus::Realizable)
        return out;
    const auto all = round_kripke(q);
    std::vector<std::size_t> free_cells;
    for (auto node : all.game_node)
        if (node != q.sink && result.winning[q.cell(node)] && result.witness_moves[q.cell(node)].size() > 1)
            free_cells.push_back(q.cell(node));
    std::sort(free_cells.begin(), free_cells.end());

    std::vector<std::size_t> digit(free_cells.size(), 0);
    std::vector<ScoredStrategy> scored;
    for (bool more = true; more;) {
        if (out.enumerated == cap) {
            out.capped = true;
            break;
        }
        Strategy s = result.strategy;
        for (std::size_t i = 0; i < free_cells.size(); ++i)
            s.choice[free_cells[i]] = result.witness_moves[free_cells[i]][digit[i]];
        ++out.enumerated;
        if (verify_strategy(q, s, f).holds)
            scored.push_back(ScoredStrategy{s, worst_case_cost(q, s, costs, horizon)});
        more = false;
        for (std::size_t pos = free_cells.size(); pos-- > 0;) {
            if (++digit[pos] < result.witness_moves[free_cells[pos]].size()) {
                more = true;
                break;
            }
            digit[pos] = 0;
        }
    }
    std::vector<CostVector> scores;
    for (const auto& s : scored)
        scores.push_back(s.worst_case);
    for (auto i : pareto_front(scores))
        out.front.push_back(scored[i]);
    return out;
}

} // namespace chakit
