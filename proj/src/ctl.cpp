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

#include "chakit/ctl.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>

namespace chakit {

using Op = CtlFormula::Op;

std::size_t CtlFormula::depth() const
{
    std::size_t d = 0;
    if (lhs)
        d = std::max(d, lhs->depth());
    if (rhs)
        d = std::max(d, rhs->depth());
    return d + (is_temporal() ? 1 : 0);
}

std::set<std::string> CtlFormula::atoms() const
{
    std::set<std::string> out;
    if (op == Op::Atom)
        out.insert(atom);
    if (lhs)
        out.merge(lhs->atoms());
    if (rhs)
        out.merge(rhs->atoms());
    return out;
}

namespace ctl {

namespace {
Ctl make(Op op, Ctl lhs = nullptr, Ctl rhs = nullptr, std::optional<std::uint32_t> bound = std::nullopt)
{
    auto f = std::make_shared<CtlFormula>();
    f->op = op;
    f->lhs = std::move(lhs);
    f->rhs = std::move(rhs);
    f->bound = bound;
    return f;
}
} // namespace

Ctl truth() { return make(Op::True); }
Ctl falsity() { return make(Op::False); }
Ctl atom(std::string name)
{
    auto f = std::make_shared<CtlFormula>();
    f->op = Op::Atom;
    f->atom = std::move(name);
    return f;
}
Ctl negation(Ctl f) { return make(Op::Not, std::move(f)); }
Ctl conj(Ctl a, Ctl b) { return make(Op::And, std::move(a), std::move(b)); }
Ctl disj(Ctl a, Ctl b) { return make(Op::Or, std::move(a), std::move(b)); }
Ctl implies(Ctl a, Ctl b) { return make(Op::Implies, std::move(a), std::move(b)); }
Ctl iff(Ctl a, Ctl b) { return make(Op::Iff, std::move(a), std::move(b)); }
Ctl unary(Op op, Ctl f, std::optional<std::uint32_t> bound) { return make(op, std::move(f), nullptr, bound); }
Ctl until(Op op, Ctl a, Ctl b, std::optional<std::uint32_t> bound)
{
    return make(op, std::move(a), std::move(b), bound);
}

} // namespace ctl

namespace {

const std::map<std::string, Op, std::less<>>& temporal_keywords()
{
    static const std::map<std::string, Op, std::less<>> k{{"EX", Op::EX}, {"AX", Op::AX}, {"EF", Op::EF},
                                                          {"AF", Op::AF}, {"EG", Op::EG}, {"AG", Op::AG}};
    return k;
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool is_keyword(std::string_view s)
{
    return temporal_keywords().count(s) || s == "E" || s == "A" || s == "U" || s == "true" || s == "false";
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Ctl parse()
    {
        auto f = parse_iff();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(std::string_view tok)
    {
        skip_ws();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok)
    {
        if (!accept(tok))
            fail("expected '" + std::string(tok) + "'");
    }

    /// Identifier at the cursor without consuming it. A temporal keyword
    /// directly followed by "_{" or "<=" stops there.
    std::string_view peek_ident()
    {
        skip_ws();
        std::size_t end = pos_;
        while (end < text_.size()) {
            const char c = text_[end];
            if (ident_char(c) || (c == '-' && (end + 1 >= text_.size() || text_[end + 1] != '>'))) {
                if (c == '_' && text_.substr(end, 2) == "_{" && temporal_keywords().count(text_.substr(pos_, end - pos_)))
                    break;
                ++end;
            } else {
                break;
            }
        }
        return text_.substr(pos_, end - pos_);
    }

    std::optional<std::uint32_t> parse_bound()
    {
        skip_ws();
        bool braced = false;
        if (text_.substr(pos_, 2) == "_{") {
            pos_ += 2;
            braced = true;
        }
        if (!accept("<=")) {
            if (braced)
                fail("expected '<=' in bound");
            return std::nullopt;
        }
        skip_ws();
        const auto start = pos_;
        std::uint64_t k = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            k = k * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
            if (k > 1'000'000'000)
                fail("bound too large");
            ++pos_;
        }
        if (pos_ == start)
            fail("expected a step bound");
        if (braced)
            expect("}");
        return static_cast<std::uint32_t>(k);
    }

    Ctl parse_iff()
    {
        auto f = parse_implies();
        while (accept("<->"))
            f = ctl::iff(f, parse_implies());
        return f;
    }

    Ctl parse_implies()
    {
        auto f = parse_or();
        if (accept("->"))
            return ctl::implies(f, parse_implies());
        return f;
    }

    Ctl parse_or()
    {
        auto f = parse_and();
        while (true) {
            if (accept("||") || accept("|"))
                f = ctl::disj(f, parse_and());
            else
                return f;
        }
    }

    Ctl parse_and()
    {
        auto f = parse_unary();
        while (true) {
            if (accept("&&") || accept("&"))
                f = ctl::conj(f, parse_unary());
            else
                return f;
        }
    }

    Ctl parse_until(Op op)
    {
        expect("[");
        auto a = parse_iff();
        skip_ws();
        if (peek_ident() != "U")
            fail("expected 'U'");
        pos_ += 1;
        auto bound = parse_bound();
        auto b = parse_iff();
        expect("]");
        return ctl::until(op, a, b, bound);
    }

    Ctl parse_unary()
    {
        skip_ws();
        if (pos_ >= text_.size())
            fail("unexpected end of formula");
        if (accept("!") || accept("~"))
            return ctl::negation(parse_unary());
        if (accept("(")) {
            auto f = parse_iff();
            expect(")");
            return f;
        }
        if (text_[pos_] == '"') {
            const auto start = ++pos_;
            while (pos_ < text_.size() && text_[pos_] != '"')
                ++pos_;
            if (pos_ >= text_.size())
                fail("unterminated quoted atom");
            auto name = std::string(text_.substr(start, pos_ - start));
            ++pos_;
            return ctl::atom(std::move(name));
        }
        const auto start = pos_;
        const auto id = peek_ident();
        if (id.empty())
            fail("expected a formula");
        if (auto it = temporal_keywords().find(id); it != temporal_keywords().end()) {
            pos_ += id.size();
            auto bound = parse_bound();
            if (bound && (it->second == Op::EX || it->second == Op::AX)) {
                pos_ = start;
                fail("EX and AX take no bound");
            }
            return ctl::unary(it->second, parse_unary(), bound);
        }
        if (id == "E" || id == "A") {
            pos_ += 1;
            return parse_until(id == "E" ? Op::EU : Op::AU);
        }
        if (id == "true" || id == "false") {
            pos_ += id.size();
            return id == "true" ? ctl::truth() : ctl::falsity();
        }
        if (id == "U")
            fail("unexpected 'U'");
        pos_ += id.size();
        return ctl::atom(std::string(id));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

int precedence(Op op)
{
    switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    default: return 5;
    }
}

std::string op_name(Op op)
{
    switch (op) {
    case Op::EX: return "EX";
    case Op::AX: return "AX";
    case Op::EF: return "EF";
    case Op::AF: return "AF";
    case Op::EG: return "EG";
    case Op::AG: return "AG";
    default: return "";
    }
}

std::string atom_text(const std::string& name)
{
    bool plain = !name.empty() && !is_keyword(name);
    for (std::size_t i = 0; i < name.size() && plain; ++i)
        plain = ident_char(name[i]) || (name[i] == '-' && (i + 1 >= name.size() || name[i + 1] != '>'));
    return plain ? name : "\"" + name + "\"";
}

std::string print(const CtlFormula& f, int min_prec)
{
    std::string s;
    const auto bound = f.bound ? "<=" + std::to_string(*f.bound) : std::string();
    switch (f.op) {
    case Op::True: s = "true"; break;
    case Op::False: s = "false"; break;
    case Op::Atom: s = atom_text(f.atom); break;
    case Op::Not: s = "!" + print(*f.lhs, 5); break;
    case Op::And: s = print(*f.lhs, 4) + " & " + print(*f.rhs, 5); break;
    case Op::Or: s = print(*f.lhs, 3) + " | " + print(*f.rhs, 4); break;
    case Op::Implies: s = print(*f.lhs, 3) + " -> " + print(*f.rhs, 2); break;
    case Op::Iff: s = print(*f.lhs, 1) + " <-> " + print(*f.rhs, 2); break;
    case Op::EU:
    case Op::AU:
        s = std::string(f.op == Op::EU ? "E" : "A") + "[" + print(*f.lhs, 1) + " U" + bound + " " + print(*f.rhs, 1) +
            "]";
        break;
    default: s = op_name(f.op) + bound + " " + print(*f.lhs, 5); break;
    }
    return precedence(f.op) < min_prec ? "(" + s + ")" : s;
}

using Set = std::vector<bool>;

Set negate(Set s)
{
    s.flip();
    return s;
}

Set pre_exists(const Kripke& k, const Set& z)
{
    Set out(k.size(), false);
    for (std::size_t n = 0; n < k.size(); ++n)
        for (auto m : k.successors[n])
            if (z[m]) {
                out[n] = true;
                break;
            }
    return out;
}

Set eu(const Kripke& k, const Set& a, const Set& b, std::optional<std::uint32_t> bound)
{
    Set z = b;
    for (std::uint64_t i = 0; !bound || i < *bound; ++i) {
        Set next = pre_exists(k, z);
        for (std::size_t n = 0; n < k.size(); ++n)
            next[n] = b[n] || (a[n] && next[n]);
        if (next == z)
            break;
        z = std::move(next);
    }
    return z;
}

Set eg(const Kripke& k, const Set& a, std::optional<std::uint32_t> bound)
{
    Set z = a;
    for (std::uint64_t i = 0; !bound || i < *bound; ++i) {
        Set next = pre_exists(k, z);
        for (std::size_t n = 0; n < k.size(); ++n)
            next[n] = a[n] && next[n];
        if (next == z)
            break;
        z = std::move(next);
    }
    return z;
}

Set eval(const Kripke& k, const CtlFormula& f)
{
    const auto n = k.size();
    switch (f.op) {
    case Op::True: return Set(n, true);
    case Op::False: return Set(n, false);
    case Op::Atom: {
        Set s(n, false);
        for (std::size_t i = 0; i < n; ++i)
            s[i] = k.labels[i].count(f.atom) != 0;
        return s;
    }
    case Op::Not: return negate(eval(k, *f.lhs));
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Iff: {
        const auto a = eval(k, *f.lhs);
        const auto b = eval(k, *f.rhs);
        Set s(n);
        for (std::size_t i = 0; i < n; ++i) {
            switch (f.op) {
            case Op::And: s[i] = a[i] && b[i]; break;
            case Op::Or: s[i] = a[i] || b[i]; break;
            case Op::Implies: s[i] = !a[i] || b[i]; break;
            default: s[i] = a[i] == b[i]; break;
            }
        }
        return s;
    }
    case Op::EX: return pre_exists(k, eval(k, *f.lhs));
    case Op::AX: return negate(pre_exists(k, negate(eval(k, *f.lhs))));
    case Op::EF: return eu(k, Set(n, true), eval(k, *f.lhs), f.bound);
    case Op::AG: return negate(eu(k, Set(n, true), negate(eval(k, *f.lhs)), f.bound));
    case Op::EG: return eg(k, eval(k, *f.lhs), f.bound);
    case Op::AF: return negate(eg(k, negate(eval(k, *f.lhs)), f.bound));
    case Op::EU: return eu(k, eval(k, *f.lhs), eval(k, *f.rhs), f.bound);
    case Op::AU: {
        const auto a = eval(k, *f.lhs);
        const auto not_b = negate(eval(k, *f.rhs));
        Set stop(n);
        for (std::size_t i = 0; i < n; ++i)
            stop[i] = !a[i] && not_b[i];
        const auto bad_until = eu(k, not_b, stop, f.bound);
        const auto bad_forever = eg(k, not_b, f.bound);
        Set s(n);
        for (std::size_t i = 0; i < n; ++i)
            s[i] = !bad_until[i] && !bad_forever[i];
        return s;
    }
    }
    return Set(n, false);
}

} // namespace

Ctl parse_ctl(std::string_view text)
{
    return Parser(text).parse();
}

std::string to_string(const CtlFormula& f)
{
    return print(f, 0);
}

bool equal(const CtlFormula& a, const CtlFormula& b)
{
    if (a.op != b.op || a.atom != b.atom || a.bound != b.bound)
        return false;
    if (bool(a.lhs) != bool(b.lhs) || bool(a.rhs) != bool(b.rhs))
        return false;
    return (!a.lhs || equal(*a.lhs, *b.lhs)) && (!a.rhs || equal(*a.rhs, *b.rhs));
}

void Kripke::check_total() const
{
    for (std::size_t n = 0; n < successors.size(); ++n)
        if (successors[n].empty())
            throw Error("Kripke node " + std::to_string(n) + " has no successor");
}

CheckResult model_check(const Kripke& k, const CtlFormula& f)
{
    k.check_total();
    if (k.size() == 0 || k.initial >= k.size())
        throw Error("Kripke structure has no valid initial node");
    std::set<std::string> known = k.declared;
    for (const auto& l : k.labels)
        known.insert(l.begin(), l.end());
    for (const auto& a : f.atoms())
        if (!known.count(a))
            throw UnknownAtomError("unknown atom '" + a + "'");
    CheckResult r;
    r.holds = eval(k, f);
    r.initial = r.holds[k.initial];
    return r;
}

std::set<std::string> declared_atoms(const Cha& cha)
{
    std::set<std::string> out;
    for (const auto& l : cha.labels)
        out.insert(l.begin(), l.end());
    return out;
}

Kripke close_system(const Cha& cha, const Therapy& therapy)
{
    Kripke k;
    k.declared = declared_atoms(cha);
    if (std::holds_alternative<TabularTherapy>(therapy))
        throw TherapyError("tabular therapies have unbounded memory; no finite closed system");
    if (const auto* m = std::get_if<MemorylessTherapy>(&therapy)) {
        if (m->by_state.size() != cha.state_count())
            throw TherapyError("memoryless therapy covers " + std::to_string(m->by_state.size()) + " of " +
                               std::to_string(cha.state_count()) + " states");
        k.successors.resize(cha.state_count());
        for (StateId v = 0; v < cha.state_count(); ++v) {
            for (auto w : successors(cha, v, m->by_state[v]))
                k.successors[v].push_back(w);
            if (k.successors[v].empty())
                throw DeadEndError("state '" + cha.states[v] + "' has no transition under " +
                                   cha.drugs.format(m->by_state[v]));
        }
        k.labels = cha.labels;
        k.names = cha.states;
        k.initial = cha.initial;
        return k;
    }
    const auto& fm = std::get<FiniteMemoryTherapy>(therapy);
    const auto window = std::max<std::size_t>(fm.window, 1);
    std::map<std::vector<StateId>, std::size_t> index;
    std::deque<std::vector<StateId>> queue;
    auto node_of = [&](const std::vector<StateId>& h) {
        auto [it, fresh] = index.emplace(h, k.size());
        if (fresh) {
            k.successors.emplace_back();
            k.labels.push_back(cha.labels.at(h.back()));
            std::string name;
            for (auto v : h)
                name += (name.empty() ? "" : ".") + cha.states[v];
            k.names.push_back(name);
            queue.push_back(h);
        }
        return it->second;
    };
    k.initial = node_of({cha.initial});
    while (!queue.empty()) {
        const auto h = queue.front();
        queue.pop_front();
        const auto from = index.at(h);
        const auto c = therapy_at(therapy, h);
        std::vector<std::size_t> succ;
        for (auto w : successors(cha, h.back(), c)) {
            auto next = h;
            next.push_back(w);
            if (next.size() > window)
                next.erase(next.begin(), next.end() - static_cast<std::ptrdiff_t>(window));
            succ.push_back(node_of(next));
        }
        if (succ.empty())
            throw DeadEndError("state '" + cha.states[h.back()] + "' has no transition under " + cha.drugs.format(c));
        k.successors[from] = std::move(succ);
    }
    return k;
}

} // namespace chakit
