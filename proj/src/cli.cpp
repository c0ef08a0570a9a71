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

#include "chakit/cli.hpp"

#include "chakit/cost.hpp"
#include "chakit/ctl.hpp"
#include "chakit/error.hpp"
#include "chakit/execute.hpp"
#include "chakit/game.hpp"
#include "chakit/model_io.hpp"
#include "chakit/service.hpp"
#include "chakit/synthesis.hpp"
#include "chakit/therapy.hpp"
#include "chakit/timed.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chakit {

namespace {

class UsageError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "usage"; }
};

struct Options {
    std::string model;
    std::vector<std::string> models;
    std::string formula;
    std::string goal;
    std::string therapy = "none";
    std::vector<std::string> therapies;
    std::vector<std::string> menu;
    std::optional<std::uint32_t> bound;
    std::optional<std::int64_t> scale;
    bool json = false;
    bool full = false;
    bool discretize = false;
    bool pareto = false;
    std::string run;
    std::optional<std::size_t> loop;
    std::optional<std::size_t> horizon;
    double start_time = 0.0;
    std::string policy = "first-by-order";
    std::uint64_t seed = 0;
    std::size_t steps = 20;
    std::string prune;
    std::size_t cap = 100'000;
    std::size_t pareto_cap = 4096;
    std::string strategy;
    std::string strategy_out;
    std::string host = "127.0.0.1";
    int port = 8080;
};

void write_json(std::ostream& out, const Json& j)
{
    out << j.dump(2) << '\n';
}

std::string fmt(double x)
{
    if (x == 0.0)
        x = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string fmt(const CostVector& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

Json radius_json(const std::optional<double>& r)
{
    return r ? Json(*r) : Json("unbounded");
}

std::string radius_text(const std::optional<double>& r)
{
    return r ? fmt(*r) : "unbounded";
}

bool is_untimed(const ModelFile& m)
{
    return m.model.clock_count() == 0 && !m.model.environment_may_idle;
}

std::vector<Cocktail> menu_from(const ModelFile& m, const std::vector<std::string>& args)
{
    if (args.empty())
        return m.default_menu();
    std::vector<Cocktail> menu;
    for (const auto& a : args)
        menu.push_back(parse_cocktail(m.model.drugs, a));
    return canonical_menu(menu);
}

std::string menu_text(const DrugUniverse& drugs, const std::vector<Cocktail>& menu)
{
    std::string s;
    for (std::size_t i = 0; i < menu.size(); ++i)
        s += (i ? ", " : "") + drugs.format(menu[i]);
    return s;
}

Json menu_json(const DrugUniverse& drugs, const std::vector<Cocktail>& menu)
{
    Json j = Json::array();
    for (auto c : menu)
        j.push_back(cocktail_json(drugs, c));
    return j;
}

QuotientOptions quotient_options(const Options& o)
{
    QuotientOptions q;
    q.bound = o.bound;
    q.scale = o.scale;
    return q;
}

AdversaryPolicy policy_from(const std::string& text)
{
    try {
        return AdversaryPolicy::parse(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return Json::parse(ss.str());
    } catch (const Json::parse_error& e) {
        throw ParseError("malformed JSON in '" + path + "'", e.byte);
    }
}

void print_findings(std::ostream& out, const ValidationReport& r, const TimedCha& tc)
{
    const auto j = to_json(r, tc);
    for (const auto* key : {"errors", "warnings"})
        for (const auto& f : j[key]) {
            out << (std::string(key) == "errors" ? "error" : "warning") << " [" << f["kind"].get<std::string>()
                << "] " << f["message"].get<std::string>();
            if (f.contains("state"))
                out << " (state " << f["state"].get<std::string>() << ")";
            out << '\n';
        }
}

// validate -------------------------------------------------------------------

int cmd_validate(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model, false);
    const auto& tc = m.model;
    if (o.json) {
        Json j{{"format", "cha-validation"}, {"version", report_format_version}, {"model", m.name}};
        j["timed"] = m.timed;
        j["states"] = tc.state_count();
        j["drugs"] = tc.drugs.size();
        j["clocks"] = tc.clocks;
        j["edges"] = tc.edges.size();
        j["report"] = to_json(m.report, tc);
        write_json(out, j);
    } else {
        out << "model: " << m.name << '\n';
        out << "kind: " << (m.timed ? "timed" : "untimed") << '\n';
        out << "states: " << tc.state_count() << '\n';
        out << "drugs: " << tc.drugs.size() << '\n';
        out << "clocks: " << tc.clock_count() << '\n';
        out << "edges: " << tc.edges.size() << '\n';
        print_findings(out, m.report, tc);
        out << (m.report.ok() ? "valid" : "invalid") << '\n';
    }
    return m.report.ok() ? exit_ok : exit_domain_error;
}

// check ----------------------------------------------------------------------

int cmd_check(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    const auto f = parse_ctl(o.formula);
    const auto cha = m.cha();
    const auto therapy = parse_memoryless_therapy(cha, o.therapy);
    bool holds = false;
    if (is_untimed(m)) {
        holds = model_check(close_system(cha, therapy), *f).initial;
    } else {
        const auto menu = canonical_menu(therapy.by_state);
        std::vector<std::size_t> choice;
        for (auto c : therapy.by_state)
            choice.push_back(static_cast<std::size_t>(std::find(menu.begin(), menu.end(), c) - menu.begin()));
        const auto q = build_quotient(m.model, menu, quotient_options(o));
        holds = model_check(round_kripke(q, choice).kripke, *f).initial;
    }
    if (o.json) {
        write_json(out, {{"format", "cha-check"},
                         {"version", report_format_version},
                         {"model", m.name},
                         {"formula", to_string(*f)},
                         {"therapy", format_therapy(cha, therapy)},
                         {"holds", holds}});
    } else {
        out << "model: " << m.name << '\n';
        out << "therapy: " << format_therapy(cha, therapy) << '\n';
        out << to_string(*f) << ": " << (holds ? "true" : "false") << '\n';
    }
    return holds ? exit_ok : exit_negative;
}

// cost -----------------------------------------------------------------------

std::vector<std::string> split(const std::string& s, const std::string& seps)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (seps.find(ch) != std::string::npos) {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

TimedRun parse_timed_run(const TimedCha& tc, const std::string& text)
{
    TimedRun run;
    for (const auto& step : split(text, ";")) {
        const auto words = split(step, " \t");
        if (words.empty())
            continue;
        if ((words[0] == "d" || words[0] == "delay") && (words.size() == 2 || words.size() == 3)) {
            DelayStep d{parse_rational(words[1]), words.size() == 3 ? parse_cocktail(tc.drugs, words[2]) : Cocktail{}};
            run.steps.emplace_back(d);
        } else if ((words[0] == "f" || words[0] == "fire") && words.size() == 2) {
            const auto& w = words[1];
            const auto arrow = w.find("->");
            std::optional<std::size_t> edge;
            if (arrow == std::string::npos) {
                if (w.find_first_not_of("0123456789") != std::string::npos)
                    throw UsageError("fire step needs an edge index or From->To, got '" + w + "'");
                edge = std::stoul(w);
            } else {
                const auto from = tc.state_at(w.substr(0, arrow));
                const auto to = tc.state_at(w.substr(arrow + 2));
                for (std::size_t e = 0; e < tc.edges.size() && !edge; ++e)
                    if (tc.edges[e].source == from && tc.edges[e].target == to)
                        edge = e;
                if (!edge)
                    throw EdgeNotFoundError("no edge " + w);
            }
            run.steps.emplace_back(FireStep{*edge});
        } else {
            throw UsageError("bad timed run step '" + step + "' (use 'd <delay> [cocktail]' or 'f <edge>')");
        }
    }
    return run;
}

int cmd_cost(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    Json j{{"format", "cha-cost"}, {"version", report_format_version}, {"model", m.name}};
    if (is_untimed(m)) {
        const auto cha = m.cha();
        const auto therapy = parse_memoryless_therapy(cha, o.therapy);
        Run run;
        for (const auto& s : split(o.run, " ,\t"))
            run.states.push_back(cha.state_at(s));
        if (run.states.empty())
            throw UsageError("--run needs at least one state");
        for (auto v : run.states)
            run.cocktails.push_back(therapy.by_state[v]);
        run.loop_start = o.loop;
        if (o.loop && *o.loop >= run.states.size())
            throw UsageError("--loop index is past the end of the run");
        if (!is_run_of(cha, run))
            throw ModelError("the run is not a possible execution of the model under the therapy");
        const auto r = untimed_cost(run, Therapy{therapy}, m.costs, o.horizon);
        j["therapy"] = format_therapy(cha, therapy);
        j["run"] = split(o.run, " ,\t");
        j["loop"] = o.loop ? Json(*o.loop) : Json();
        j["horizon"] = o.horizon ? Json(*o.horizon) : Json();
        j["discount"] = m.costs.discount;
        j["cost"] = r.value;
        j["tail_radius"] = radius_json(r.tail_radius);
        if (o.json) {
            write_json(out, j);
        } else {
            out << "model: " << m.name << '\n';
            out << "therapy: " << format_therapy(cha, therapy) << '\n';
            out << "discount: " << fmt(m.costs.discount) << '\n';
            out << "cost: " << fmt(r.value) << '\n';
            out << "tail radius: " << radius_text(r.tail_radius) << '\n';
        }
        return exit_ok;
    }
    auto run = parse_timed_run(m.model, o.run);
    run.loop_start = o.loop;
    if (o.loop && *o.loop >= run.steps.size())
        throw UsageError("--loop index is past the end of the run");
    const auto states = replay(m.model, run);
    const auto cost = timed_cost(m.model, run, m.costs, o.start_time);
    j["run"] = o.run;
    j["loop"] = o.loop ? Json(*o.loop) : Json();
    j["timed_discount"] = m.costs.timed_discount;
    j["duration"] = to_string(duration(run));
    j["final_state"] = m.model.states[states.back().state];
    j["cost"] = cost;
    if (o.json) {
        write_json(out, j);
    } else {
        out << "model: " << m.name << '\n';
        out << "timed discount: " << fmt(m.costs.timed_discount) << '\n';
        out << "duration: " << to_string(duration(run)) << '\n';
        out << "final state: " << m.model.states[states.back().state] << '\n';
        out << "cost: " << fmt(cost) << '\n';
    }
    return exit_ok;
}

// compare --------------------------------------------------------------------

int cmd_compare(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    if (!is_untimed(m))
        throw ModelError("compare works on untimed models");
    if (o.therapies.size() != 2)
        throw UsageError("compare needs exactly two --therapy options");
    const auto cha = m.cha();
    const auto h = o.horizon.value_or(6);
    const auto a = parse_memoryless_therapy(cha, o.therapies[0]);
    const auto b = parse_memoryless_therapy(cha, o.therapies[1]);
    const auto ca = execution_costs(cha, a, m.costs, h);
    const auto cb = execution_costs(cha, b, m.costs, h);
    const auto ab = set_dominates(ca, cb);
    const auto ba = set_dominates(cb, ca);
    const bool conclusive = ab.conclusive && ba.conclusive;
    if (o.json) {
        auto side = [&](const MemorylessTherapy& t, const CostSet& c) {
            return Json{{"therapy", format_therapy(cha, t)}, {"costs", c.costs}, {"tail_radius", radius_json(c.tail_radius)}};
        };
        write_json(out, {{"format", "cha-compare"},
                         {"version", report_format_version},
                         {"model", m.name},
                         {"horizon", h},
                         {"a", side(a, ca)},
                         {"b", side(b, cb)},
                         {"a_dominates_b", ab.dominates},
                         {"b_dominates_a", ba.dominates},
                         {"conclusive", conclusive}});
    } else {
        out << "model: " << m.name << '\n';
        out << "horizon: " << h << '\n';
        out << "A: " << format_therapy(cha, a) << " (" << ca.costs.size() << " execution costs, tail radius "
            << radius_text(ca.tail_radius) << ")\n";
        out << "B: " << format_therapy(cha, b) << " (" << cb.costs.size() << " execution costs, tail radius "
            << radius_text(cb.tail_radius) << ")\n";
        out << "A dominates B: " << (ab.dominates ? "yes" : "no") << '\n';
        out << "B dominates A: " << (ba.dominates ? "yes" : "no") << '\n';
        out << "conclusive: " << (conclusive ? "yes" : "no") << '\n';
    }
    return exit_ok;
}

// candidates -----------------------------------------------------------------

int cmd_candidates(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    if (!is_untimed(m))
        throw ModelError("candidates works on untimed models");
    const auto cha = m.cha();
    const auto h = o.horizon.value_or(6);
    if (h == 0)
        throw UsageError("--horizon must be positive");
    TherapySpace space{menu_from(m, o.menu), o.cap};
    const auto r = candidate_therapies(cha, m.costs, space, h);
    std::optional<std::vector<std::size_t>> pruned;
    if (!o.prune.empty())
        pruned = prune_candidates(r, o.prune == "maximin" ? RiskAttitude::Maximin : RiskAttitude::Maximax);
    if (o.json) {
        Json cands = Json::array();
        for (auto i : r.candidates)
            cands.push_back({{"index", i},
                             {"therapy", format_therapy(cha, r.space[i])},
                             {"costs", r.costs[i].costs},
                             {"tail_radius", radius_json(r.costs[i].tail_radius)}});
        Json j{{"format", "cha-candidates"}, {"version", report_format_version}, {"model", m.name}, {"horizon", h}};
        j["menu"] = menu_json(cha.drugs, space.menu);
        j["space_size"] = r.space.size();
        j["candidates"] = cands;
        j["inconclusive_dominance"] = r.inconclusive.size();
        j["inconclusive_non_dominance"] = r.inconclusive_non_dominance;
        if (pruned) {
            j["prune"] = o.prune;
            Json p = Json::array();
            for (auto i : *pruned)
                p.push_back(format_therapy(cha, r.space[i]));
            j["pruned"] = p;
        }
        write_json(out, j);
    } else {
        out << "model: " << m.name << '\n';
        out << "horizon: " << h << '\n';
        out << "menu: " << menu_text(cha.drugs, space.menu) << '\n';
        out << "candidates: " << r.candidates.size() << " of " << r.space.size() << '\n';
        for (auto i : r.candidates)
            out << "  " << format_therapy(cha, r.space[i]) << '\n';
        out << "inconclusive verdicts: " << r.inconclusive.size() + r.inconclusive_non_dominance << '\n';
        if (pruned) {
            out << o.prune << ": " << pruned->size() << '\n';
            for (auto i : *pruned)
                out << "  " << format_therapy(cha, r.space[i]) << '\n';
        }
    }
    return exit_ok;
}

// cover ----------------------------------------------------------------------

int cmd_cover(const Options& o, std::ostream& out)
{
    std::vector<ModelFile> files;
    files.push_back(load_model(o.model));
    for (const auto& p : o.models)
        files.push_back(load_model(p));
    std::vector<FamilyMember> family;
    for (const auto& f : files) {
        if (!is_untimed(f))
            throw ModelError("cover works on untimed models");
        family.push_back(FamilyMember{f.cha(), f.costs});
    }
    if (o.therapies.empty())
        throw UsageError("cover needs at least one --therapy");
    const auto h = o.horizon.value_or(6);
    if (h == 0)
        throw UsageError("--horizon must be positive");
    const auto& cha = family.front().cha;
    TherapySpace space{menu_from(files.front(), o.menu), o.cap};
    std::vector<MemorylessTherapy> therapies;
    for (const auto& t : o.therapies)
        therapies.push_back(parse_memoryless_therapy(cha, t));
    const auto universal = universal_candidates(family, space, h);
    const bool ok = covers(therapies, family, space, h);
    std::vector<std::vector<std::string>> per_member;
    for (const auto& r : universal.members) {
        std::vector<std::string> names;
        for (auto i : r.candidates)
            names.push_back(format_therapy(cha, universal.space[i]));
        per_member.push_back(names);
    }
    std::vector<std::string> uni;
    for (auto i : universal.universal)
        uni.push_back(format_therapy(cha, universal.space[i]));
    std::vector<std::string> given;
    for (const auto& t : therapies)
        given.push_back(format_therapy(cha, t));
    if (o.json) {
        Json members = Json::array();
        for (std::size_t i = 0; i < files.size(); ++i)
            members.push_back({{"model", files[i].name}, {"candidates", per_member[i]}});
        write_json(out, {{"format", "cha-cover"},
                         {"version", report_format_version},
                         {"horizon", h},
                         {"therapies", given},
                         {"members", members},
                         {"universal", uni},
                         {"covers", ok}});
    } else {
        out << "horizon: " << h << '\n';
        for (std::size_t i = 0; i < files.size(); ++i) {
            out << "member " << files[i].name << ": " << per_member[i].size() << " candidates\n";
            for (const auto& n : per_member[i])
                out << "  " << n << '\n';
        }
        out << "universal candidates: " << uni.size() << '\n';
        for (const auto& n : uni)
            out << "  " << n << '\n';
        out << "therapies:";
        for (const auto& n : given)
            out << ' ' << n;
        out << '\n';
        out << "covers: " << (ok ? "yes" : "no") << '\n';
    }
    return ok ? exit_ok : exit_negative;
}

// simulate -------------------------------------------------------------------

bool absorbing(const TimedCha& tc, StateId v)
{
    return std::all_of(tc.edges.begin(), tc.edges.end(),
                       [&](const TimedEdge& e) { return e.source != v || e.target == v; });
}

int cmd_simulate(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    const auto cha = m.cha();
    const auto therapy = parse_memoryless_therapy(cha, o.therapy);
    const auto policy = policy_from(o.policy);
    Json trace = Json::array();
    std::string outcome = "max-steps";
    if (is_untimed(m)) {
        const auto run = execute(cha, Therapy{therapy}, policy, o.steps, o.seed);
        for (std::size_t i = 0; i < run.states.size(); ++i) {
            const auto v = run.states[i];
            trace.push_back({{"step", i}, {"state", cha.states[v]}, {"cocktail", cocktail_json(cha.drugs, therapy.by_state[v])}});
            if (absorbing(m.model, v)) {
                outcome = "absorbed";
                break;
            }
        }
    } else {
        const auto menu = canonical_menu(therapy.by_state);
        const auto g = discretize(translate(m.model, menu));
        const auto& tc = g.model;
        std::vector<std::vector<StateId>> adjacency(cha.state_count());
        for (const auto& e : cha.edges)
            adjacency[e.source].push_back(e.target);
        std::mt19937_64 rng(o.seed);
        auto s = initial_game_state(g);
        for (std::size_t round = 0;; ++round) {
            const auto v = g.state_of(s.location);
            Json val = Json::object();
            for (ClockId x = 0; x < tc.clock_count(); ++x)
                val[tc.clocks[x]] = to_string(s.valuation[x]);
            Json entry{{"round", round}, {"state", tc.states[v]}, {"valuation", val}};
            if (absorbing(tc, v)) {
                trace.push_back(entry);
                outcome = "absorbed";
                break;
            }
            if (round == o.steps) {
                trace.push_back(entry);
                break;
            }
            const auto c = static_cast<std::size_t>(std::find(menu.begin(), menu.end(), therapy.by_state[v]) -
                                                    menu.begin());
            entry["cocktail"] = cocktail_json(tc.drugs, menu[c]);
            std::vector<std::optional<std::size_t>> moves;
            for (auto e : environment_edges(g, s, c))
                moves.emplace_back(e);
            if (environment_may_pass(g, s, c))
                moves.emplace_back(std::nullopt);
            if (moves.empty()) {
                trace.push_back(entry);
                outcome = "timelock";
                break;
            }
            std::vector<std::size_t> dist(moves.size(), 0);
            if (policy.kind == AdversaryPolicy::Kind::AdversarialToward) {
                const auto d = distances_to_label(adjacency, tc.labels, policy.goal);
                for (std::size_t i = 0; i < moves.size(); ++i)
                    dist[i] = d[moves[i] ? tc.edges[*moves[i]].target : v];
            }
            const auto pick = moves[pick_move(policy, rng, dist)];
            entry["move"] = pick ? Json(tc.states[tc.edges[*pick].source] + "->" + tc.states[tc.edges[*pick].target])
                                 : Json("pass");
            trace.push_back(entry);
            const auto r = play_round(g, s, RoundMove{c, pick});
            if (r.outcome != RoundOutcome::Ok) {
                outcome = "timelock";
                break;
            }
            s = r.next;
        }
    }
    if (o.json) {
        write_json(out, {{"format", "cha-simulation"},
                         {"version", report_format_version},
                         {"model", m.name},
                         {"therapy", format_therapy(cha, therapy)},
                         {"policy", policy.to_string()},
                         {"seed", o.seed},
                         {"trace", trace},
                         {"outcome", outcome}});
        return exit_ok;
    }
    out << "model: " << m.name << '\n';
    out << "therapy: " << format_therapy(cha, therapy) << '\n';
    out << "policy: " << policy.to_string() << '\n';
    out << "seed: " << o.seed << '\n';
    for (const auto& e : trace) {
        if (e.contains("round")) {
            out << "round " << e["round"].get<std::size_t>() << ": " << e["state"].get<std::string>();
            std::string val;
            for (const auto& [x, value] : e["valuation"].items())
                val += (val.empty() ? "" : ",") + x + "=" + value.get<std::string>();
            if (!val.empty())
                out << " [" << val << "]";
            if (e.contains("cocktail"))
                out << " give " << format_cocktail_list(m.model.drugs, cocktail_from_json(m.model.drugs, e["cocktail"]));
            if (e.contains("move"))
                out << " -> " << e["move"].get<std::string>();
        } else {
            out << "step " << e["step"].get<std::size_t>() << ": " << e["state"].get<std::string>() << " give "
                << format_cocktail_list(m.model.drugs, cocktail_from_json(m.model.drugs, e["cocktail"]));
        }
        out << '\n';
    }
    out << "outcome: " << outcome << " in " << trace.back()["state"].get<std::string>() << '\n';
    return exit_ok;
}

// translate / quotient -------------------------------------------------------

int cmd_translate(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    auto g = translate(m.model, menu_from(m, o.menu));
    if (o.discretize)
        g = discretize(g);
    if (o.json) {
        write_json(out, to_json(g));
        return exit_ok;
    }
    std::size_t controllable = 0;
    for (const auto& e : g.edges)
        controllable += e.kind == GameEdge::Kind::Controllable ? 1 : 0;
    out << "model: " << m.name << '\n';
    out << "menu: " << menu_text(g.model.drugs, g.menu) << '\n';
    out << "clocks:";
    for (const auto& c : g.clocks)
        out << ' ' << c;
    out << '\n';
    out << "locations: " << g.location_count() << '\n';
    out << "controllable edges: " << controllable << '\n';
    out << "uncontrollable edges: " << g.edges.size() - controllable << '\n';
    for (std::size_t loc = 0; loc < g.location_count(); ++loc) {
        out << "location " << g.location_name(loc);
        for (ClockId x = 0; x < g.clocks.size(); ++x) {
            out << ' ' << g.clocks[x] << "'=" << to_string(g.rate(loc, x));
            if (auto l = g.invariant(loc, x))
                out << ' ' << g.clocks[x] << "<=" << *l;
        }
        out << '\n';
    }
    for (const auto& e : g.edges) {
        if (e.kind != GameEdge::Kind::Uncontrollable)
            continue;
        out << "edge " << g.location_name(e.from) << " -> " << g.location_name(e.to);
        if (!e.guard.atoms.empty())
            out << " when " << format_constraint(e.guard, g.clocks);
        out << '\n';
    }
    return exit_ok;
}

int cmd_quotient(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    const auto q = build_quotient(m.model, menu_from(m, o.menu), quotient_options(o));
    const auto j = to_json(q, o.full);
    if (o.json) {
        write_json(out, j);
        return exit_ok;
    }
    out << "model: " << m.name << '\n';
    out << "menu: " << menu_text(q.game.model.drugs, q.game.menu) << '\n';
    out << "scale: " << q.scale << '\n';
    for (ClockId x = 0; x < q.bound.size(); ++x)
        out << "bound " << q.game.model.clocks[x] << ": " << q.bound[x] << '\n';
    out << "locations: " << q.game.location_count() << '\n';
    out << "regions per location: " << q.regions_per_location << '\n';
    out << "nodes: " << q.node_count() << '\n';
    out << "reachable round nodes: " << j["reachable_round_nodes"].get<std::size_t>() << '\n';
    out << "every cycle delays: " << (j["zeno_free"].get<bool>() ? "yes" : "no") << '\n';
    out << "initial: " << q.node_name(q.initial) << '\n';
    if (o.full) {
        const auto& rg = j["round_graph"];
        for (const auto& n : rg["nodes"])
            out << "node " << n["id"].get<std::size_t>() << ' ' << n["name"].get<std::string>() << '\n';
        for (const auto& e : rg["edges"])
            out << "round " << e[0].get<std::size_t>() << " -> " << e[1].get<std::size_t>() << '\n';
    }
    return exit_ok;
}

// synthesize / verify --------------------------------------------------------

void print_trace(std::ostream& out, const QuotientGame& q, const Trace& t)
{
    out << "counterexample:\n";
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        out << "  " << (t.loop_start && *t.loop_start == i ? "loop> " : "") << q.node_name(t.nodes[i]) << '\n';
    }
}

int cmd_synthesize(const Options& o, std::ostream& out, std::ostream& err)
{
    const auto m = load_model(o.model);
    const auto f = parse_ctl(o.goal);
    const auto q = build_quotient(m.model, menu_from(m, o.menu), quotient_options(o));
    SynthesisResult r;
    try {
        r = solve_ctl(q, *f);
    } catch (const UnsupportedFragmentError& e) {
        if (o.json)
            write_json(out, {{"format", "cha-synthesis"},
                             {"version", report_format_version},
                             {"goal", to_string(*f)},
                             {"status", "unsupported"},
                             {"message", e.what()}});
        else
            out << "goal: " << to_string(*f) << "\nstatus: unsupported\n" << e.what() << '\n';
        return exit_unsupported;
    }
    std::optional<ParetoStrategies> pareto;
    if (o.pareto)
        pareto = pareto_strategies(q, r, *f, m.costs, o.horizon.value_or(10), o.pareto_cap);
    if (!o.strategy_out.empty() && r.status != SynthesisStatus::Unrealizable) {
        std::ofstream file(o.strategy_out, std::ios::binary);
        if (!file)
            throw Error("cannot write '" + o.strategy_out + "'");
        file << strategy_to_json(q, r.strategy, m.name, to_string(*f)).dump(2) << '\n';
    }
    Json j = to_json(r, q);
    j["model"] = m.name;
    j["menu"] = menu_json(q.game.model.drugs, q.game.menu);
    if (pareto) {
        Json front = Json::array();
        for (const auto& s : pareto->front) {
            Json table = Json::object();
            const auto closed = round_kripke(q, &s.strategy);
            std::vector<std::size_t> nodes(closed.game_node.begin(), closed.game_node.end());
            std::sort(nodes.begin(), nodes.end());
            for (auto n : nodes)
                if (n != q.sink)
                    table[q.node_name(n)] = cocktail_json(q.game.model.drugs, q.game.menu[s.strategy.choice[q.cell(n)]]);
            front.push_back({{"worst_case_cost", s.worst_case}, {"strategy", table}});
        }
        j["pareto"] = {{"horizon", o.horizon.value_or(10)},
                       {"enumerated", pareto->enumerated},
                       {"capped", pareto->capped},
                       {"front", front}};
    }
    if (o.json) {
        write_json(out, j);
    } else {
        out << "model: " << m.name << '\n';
        out << "goal: " << r.goal << '\n';
        out << "menu: " << menu_text(q.game.model.drugs, q.game.menu) << '\n';
        out << "status: " << to_string(r.status) << '\n';
        out << "nodes: " << r.stats.nodes << ", controller cells: " << r.stats.controller_cells
            << ", winning: " << r.stats.winning_controller_cells << ", iterations: " << r.stats.iterations << '\n';
        if (r.status != SynthesisStatus::Unrealizable) {
            out << "strategy:\n";
            std::map<std::string, std::set<std::string>> by_state;
            for (const auto& row : j["strategy_table"]) {
                if (row["state"].is_null())
                    continue;
                const auto choice = format_cocktail_list(q.game.model.drugs,
                                                         cocktail_from_json(q.game.model.drugs, row["choice"]));
                out << "  " << row["node"].get<std::string>() << " -> " << choice << '\n';
                by_state[row["state"].get<std::string>()].insert(choice);
            }
            out << "by state:\n";
            for (StateId v = 0; v < q.game.model.state_count(); ++v) {
                auto it = by_state.find(q.game.model.states[v]);
                if (it == by_state.end())
                    continue;
                out << "  " << it->first << ':';
                for (const auto& c : it->second)
                    out << ' ' << c;
                out << '\n';
            }
        }
        if (r.counterexample)
            print_trace(out, q, *r.counterexample);
        if (pareto) {
            out << "pareto front (" << pareto->front.size() << " of " << pareto->enumerated << " strategies"
                << (pareto->capped ? ", capped" : "") << "):\n";
            for (const auto& s : pareto->front)
                out << "  worst-case cost " << fmt(s.worst_case) << '\n';
        }
    }
    (void)err;
    switch (r.status) {
    case SynthesisStatus::Realizable: return exit_ok;
    case SynthesisStatus::Unrealizable: return exit_negative;
    case SynthesisStatus::Unverified: return exit_unverified;
    }
    return exit_ok;
}

int cmd_verify(const Options& o, std::ostream& out)
{
    const auto m = load_model(o.model);
    const auto sj = read_json_file(o.strategy);
    if (!sj.is_object() || !sj.contains("menu") || !sj["menu"].is_array())
        throw ModelError("'" + o.strategy + "' is not a strategy file");
    std::vector<Cocktail> menu;
    for (const auto& c : sj["menu"])
        menu.push_back(cocktail_from_json(m.model.drugs, c));
    std::string goal = o.goal.empty() ? sj.value("goal", "") : o.goal;
    if (goal.empty())
        throw UsageError("no goal given and the strategy file names none");
    const auto f = parse_ctl(goal);
    auto opts = quotient_options(o);
    if (!opts.scale && sj.contains("scale"))
        opts.scale = sj["scale"].get<std::int64_t>();
    const auto q = build_quotient(m.model, canonical_menu(menu), opts);
    const auto s = strategy_from_json(q, sj);
    const auto v = verify_strategy(q, s, *f);
    if (o.json) {
        Json j{{"format", "cha-verify"}, {"version", report_format_version}, {"model", m.name},
               {"goal", to_string(*f)}, {"holds", v.holds}, {"closed_nodes", v.closed.kripke.size()}};
        if (v.counterexample) {
            Json t = Json::array();
            for (auto n : v.counterexample->nodes)
                t.push_back(q.node_name(n));
            j["counterexample"] = {{"trace", t},
                                   {"loop_start", v.counterexample->loop_start ? Json(*v.counterexample->loop_start)
                                                                               : Json()}};
        }
        write_json(out, j);
    } else {
        out << "model: " << m.name << '\n';
        out << "goal: " << to_string(*f) << '\n';
        out << "closed system nodes: " << v.closed.kripke.size() << '\n';
        out << "holds: " << (v.holds ? "yes" : "no") << '\n';
        if (v.counterexample)
            print_trace(out, q, *v.counterexample);
    }
    return v.holds ? exit_ok : exit_negative;
}

int cmd_serve(const Options& o, std::ostream& err)
{
    auto m = load_model(o.model);
    std::optional<Json> strategy;
    if (!o.strategy.empty())
        strategy = read_json_file(o.strategy);
    Service service(std::move(m), strategy, quotient_options(o));
    serve(service, o.host, o.port, err);
    return exit_ok;
}

int report_error(const Options& o, const Error& e, std::ostream& out, std::ostream& err)
{
    if (o.json) {
        Json j{{"format", "cha-error"}, {"version", report_format_version}, {"error", e.kind()}, {"message", e.what()}};
        if (const auto* p = dynamic_cast<const ParseError*>(&e))
            j["position"] = p->position();
        if (const auto* inv = dynamic_cast<const InvalidModelError*>(&e))
            j["report"] = to_json(inv->report(), TimedCha{});
        write_json(out, j);
    } else {
        err << "error [" << e.kind() << "]: " << e.what() << '\n';
        if (const auto* inv = dynamic_cast<const InvalidModelError*>(&e))
            for (const auto* f : inv->report().errors())
                err << "  " << f->message << '\n';
    }
    return exit_domain_error;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Cancer hybrid automata toolkit", "chakit"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", "chakit 0.1.0");

    auto json_flag = [&](CLI::App* c) { c->add_flag("--json", o.json, "Machine-readable output"); };
    auto model_arg = [&](CLI::App* c) {
        c->add_option("model", o.model, "Model file (JSON)")->required();
    };
    auto menu_opt = [&](CLI::App* c) {
        c->add_option("--menu", o.menu, "Menu cocktail, e.g. Avastin or A+B (repeatable; {} is always added)");
    };
    auto grid_opts = [&](CLI::App* c) {
        c->add_option("--bound", o.bound, "Clock bound m used for every clock");
        c->add_option("--scale", o.scale, "Region grid scale (multiple of the rate denominators)");
    };

    auto* validate = app.add_subcommand("validate", "Load a model and report validation findings");
    model_arg(validate);
    json_flag(validate);

    auto* check = app.add_subcommand("check", "Model-check a CTL formula under a memoryless therapy");
    model_arg(check);
    check->add_option("formula", o.formula, "CTL formula")->required();
    check->add_option("--therapy", o.therapy, "Memoryless therapy, e.g. Avastin@SSG,Avastin@IAG");
    grid_opts(check);
    json_flag(check);

    auto* cost = app.add_subcommand("cost", "Discounted cost of a run");
    model_arg(cost);
    cost->add_option("--run", o.run, "Untimed: states 'A B C'; timed: steps 'd 2 A+B; f 0'")->required();
    cost->add_option("--loop", o.loop, "Lasso loop start index");
    cost->add_option("--therapy", o.therapy, "Memoryless therapy (untimed runs)");
    cost->add_option("--horizon", o.horizon, "Truncation horizon (untimed)");
    cost->add_option("--start", o.start_time, "Start time offset (timed)");
    json_flag(cost);

    auto* compare = app.add_subcommand("compare", "Pareto-compare two therapies over all executions");
    model_arg(compare);
    compare->add_option("--therapy", o.therapies, "Therapy (give twice)")->required();
    compare->add_option("--horizon", o.horizon, "Execution horizon (default 6)");
    json_flag(compare);

    auto* candidates = app.add_subcommand("candidates", "Non-dominated memoryless therapies");
    model_arg(candidates);
    candidates->add_option("--horizon", o.horizon, "Execution horizon (default 6)");
    candidates->add_option("--prune", o.prune, "Risk attitude filter")->check(CLI::IsMember({"maximin", "maximax"}));
    candidates->add_option("--cap", o.cap, "Maximum size of the therapy space");
    menu_opt(candidates);
    json_flag(candidates);

    auto* cover = app.add_subcommand("cover", "Check that therapies meet every member's candidate set");
    model_arg(cover);
    cover->add_option("more", o.models, "Further family members");
    cover->add_option("--therapy", o.therapies, "Therapy of the cover (repeatable)")->required();
    cover->add_option("--horizon", o.horizon, "Execution horizon (default 6)");
    cover->add_option("--cap", o.cap, "Maximum size of the therapy space");
    menu_opt(cover);
    json_flag(cover);

    auto* simulate = app.add_subcommand("simulate", "Simulate a therapy against an adversary policy");
    model_arg(simulate);
    simulate->add_option("--therapy", o.therapy, "Memoryless therapy");
    simulate->add_option("--policy", o.policy, "first-by-order, uniform-random or adversarial:<label>");
    simulate->add_option("--seed", o.seed, "Random seed (echoed)");
    simulate->add_option("--steps", o.steps, "Maximum number of steps or rounds (default 20)");
    json_flag(simulate);

    auto* translate_cmd = app.add_subcommand("translate", "Emit the hybrid game graph");
    model_arg(translate_cmd);
    menu_opt(translate_cmd);
    translate_cmd->add_flag("--discretize", o.discretize, "Add the sampling clock");
    json_flag(translate_cmd);

    auto* quotient_cmd = app.add_subcommand("quotient", "Build the region quotient of the sampling game");
    model_arg(quotient_cmd);
    menu_opt(quotient_cmd);
    grid_opts(quotient_cmd);
    quotient_cmd->add_flag("--full", o.full, "Include the reachable round graph");
    json_flag(quotient_cmd);

    auto* synthesize = app.add_subcommand("synthesize", "Synthesize a therapy strategy for a CTL goal");
    model_arg(synthesize);
    synthesize->add_option("--goal", o.goal, "CTL goal, e.g. \"AG !M\"")->required();
    menu_opt(synthesize);
    grid_opts(synthesize);
    synthesize->add_option("--strategy-out", o.strategy_out, "Write the strategy JSON here");
    synthesize->add_flag("--pareto", o.pareto, "Enumerate the cost Pareto front of winning strategies");
    synthesize->add_option("--horizon", o.horizon, "Rounds costed by --pareto (default 10)");
    synthesize->add_option("--cap", o.pareto_cap, "Maximum strategies enumerated by --pareto");
    json_flag(synthesize);

    auto* verify = app.add_subcommand("verify", "Check a strategy file against a goal");
    model_arg(verify);
    verify->add_option("--strategy", o.strategy, "Strategy JSON")->required();
    verify->add_option("--goal", o.goal, "CTL goal (default: the goal recorded in the file)");
    grid_opts(verify);
    json_flag(verify);

    auto* serve_cmd = app.add_subcommand("serve", "Run the local HTTP/JSON explorer service");
    model_arg(serve_cmd);
    serve_cmd->add_option("--strategy", o.strategy, "Strategy JSON to recommend from");
    serve_cmd->add_option("--host", o.host, "Bind address (default 127.0.0.1)");
    serve_cmd->add_option("--port", o.port, "Port (default 8080)");
    grid_opts(serve_cmd);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (validate->parsed())
            return cmd_validate(o, out);
        if (check->parsed())
            return cmd_check(o, out);
        if (cost->parsed())
            return cmd_cost(o, out);
        if (compare->parsed())
            return cmd_compare(o, out);
        if (candidates->parsed())
            return cmd_candidates(o, out);
        if (cover->parsed())
            return cmd_cover(o, out);
        if (simulate->parsed())
            return cmd_simulate(o, out);
        if (translate_cmd->parsed())
            return cmd_translate(o, out);
        if (quotient_cmd->parsed())
            return cmd_quotient(o, out);
        if (synthesize->parsed())
            return cmd_synthesize(o, out, err);
        if (verify->parsed())
            return cmd_verify(o, out);
        if (serve_cmd->parsed())
            return cmd_serve(o, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        return report_error(o, e, out, err);
    }
    return exit_usage;
}

} // namespace chakit
