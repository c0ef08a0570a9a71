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

#include "chakit/model_io.hpp"

#include "chakit/error.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

namespace chakit {

namespace {

const std::regex& id_pattern()
{
    static const std::regex r("[A-Za-z0-9_-]+");
    return r;
}

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        throw ModelError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw ModelError("unknown key '" + key + "' in " + where);
    }
}

std::string get_string(const Json& j, const std::string& where)
{
    if (!j.is_string())
        throw ModelError(where + " must be a string");
    return j.get<std::string>();
}

std::string get_id(const Json& j, const std::string& where)
{
    auto s = get_string(j, where);
    if (!std::regex_match(s, id_pattern()))
        throw ModelError(where + " '" + s + "' must match [A-Za-z0-9_-]+");
    return s;
}

std::uint32_t get_natural(const Json& j, const std::string& where)
{
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0 || j.get<std::int64_t>() > 1'000'000'000)
        throw ModelError(where + " must be a natural number");
    return static_cast<std::uint32_t>(j.get<std::int64_t>());
}

double get_number(const Json& j, const std::string& where)
{
    if (!j.is_number())
        throw ModelError(where + " must be a number");
    return j.get<double>();
}

CostVector get_cost(const Json& j, const std::string& where)
{
    if (j.is_number())
        return {get_number(j, where)};
    if (!j.is_array())
        throw ModelError(where + " must be a number or an array of numbers");
    CostVector v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

bool get_bool(const Json& j, const std::string& where)
{
    if (!j.is_boolean())
        throw ModelError(where + " must be a boolean");
    return j.get<bool>();
}

Rational get_rational(const Json& j, const std::string& where)
{
    if (j.is_number_integer())
        return Rational(j.get<std::int64_t>());
    if (!j.is_string())
        throw ModelError(where + " must be a \"p/q\" string or an integer");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.message(), e.position());
    }
}

Cocktail get_cocktail(const DrugUniverse& drugs, const Json& j, const std::string& where)
{
    if (!j.is_array())
        throw ModelError(where + " must be an array of drug ids");
    Cocktail c;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto name = get_string(j[i], where + "[" + std::to_string(i) + "]");
        auto d = drugs.find(name);
        if (!d)
            throw ModelError("unknown drug '" + name + "' in " + where);
        c = c.with(*d);
    }
    return c;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void apply_transforms(ModelFile& m)
{
    m.model = m.declared;
    if (m.implicit_self_loops)
        for (StateId v = 0; v < m.model.state_count(); ++v)
            m.model.edges.push_back(TimedEdge{v, {}, v, {}, true});
    if (m.emulate_inhibitors) {
        std::set<std::tuple<StateId, StateId, DrugId>> done;
        const auto edges = m.model.edges;
        for (const auto& e : edges)
            for (auto d : e.inhibitors.drugs())
                if (done.emplace(e.source, e.target, d).second)
                    m.model = emulate_inhibitor_edge(m.model, e.source, e.target, d, m.emulation_threshold);
        for (auto& e : m.model.edges)
            e.inhibitors = Cocktail{};
        m.model.environment_may_idle = true;
    }
    m.model.normalize_tables();
    if (m.clock_bound)
        for (auto& b : m.model.clock_bounds)
            if (!b)
                b = m.clock_bound;
}

} // namespace

std::vector<Cocktail> ModelFile::default_menu() const
{
    if (!menu.empty())
        return canonical_menu(menu);
    std::vector<Cocktail> out;
    const auto n = model.drugs.size();
    if (n <= 6) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits)
            out.push_back(Cocktail(bits));
        return out;
    }
    out.push_back(Cocktail{});
    for (DrugId d = 0; d < n; ++d)
        out.push_back(Cocktail{}.with(d));
    return out;
}

ModelFile parse_model(const std::string& text, bool require_valid)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("malformed JSON (line " + std::to_string(line) + ", column " + std::to_string(col) + ")",
                         e.byte);
    }
    check_keys(doc, "model",
               {"format", "version", "name", "description", "timed", "implicit_self_loops", "drugs", "states",
                "initial", "clocks", "edges", "rates", "costs", "menu", "clock_bound", "emulate_inhibitors",
                "emulation_threshold"});
    if (!doc.contains("format") || doc["format"] != "cha-model")
        throw ModelError("model.format must be \"cha-model\"");
    if (!doc.contains("version") || !doc["version"].is_number_integer() || doc["version"] != model_format_version)
        throw ModelError("unsupported model version (expected " + std::to_string(model_format_version) + ")");

    ModelFile m;
    m.name = doc.contains("name") ? get_string(doc["name"], "model.name") : "";
    m.description = doc.contains("description") ? get_string(doc["description"], "model.description") : "";
    m.timed = doc.contains("timed") && get_bool(doc["timed"], "model.timed");
    m.implicit_self_loops = doc.contains("implicit_self_loops") &&
                            get_bool(doc["implicit_self_loops"], "model.implicit_self_loops");
    m.emulate_inhibitors = doc.contains("emulate_inhibitors") &&
                           get_bool(doc["emulate_inhibitors"], "model.emulate_inhibitors");
    if (doc.contains("emulation_threshold")) {
        m.emulation_threshold = get_natural(doc["emulation_threshold"], "model.emulation_threshold");
        if (m.emulation_threshold == 0)
            throw ModelError("model.emulation_threshold must be positive");
    }
    if (doc.contains("clock_bound"))
        m.clock_bound = get_natural(doc["clock_bound"], "model.clock_bound");

    auto& tc = m.declared;
    tc.environment_may_idle = m.timed;

    // Drugs.
    std::vector<std::optional<CostVector>> drug_costs;
    if (doc.contains("drugs")) {
        if (!doc["drugs"].is_array())
            throw ModelError("model.drugs must be an array");
        for (std::size_t i = 0; i < doc["drugs"].size(); ++i) {
            const auto& d = doc["drugs"][i];
            const auto where = "drugs[" + std::to_string(i) + "]";
            if (d.is_string()) {
                tc.drugs.add(get_id(d, where));
                drug_costs.emplace_back();
                continue;
            }
            check_keys(d, where, {"id", "cost", "description"});
            if (!d.contains("id"))
                throw ModelError(where + " needs an id");
            tc.drugs.add(get_id(d["id"], where + ".id"));
            drug_costs.push_back(d.contains("cost") ? std::optional(get_cost(d["cost"], where + ".cost"))
                                                    : std::nullopt);
        }
    }

    // Clocks.
    if (doc.contains("clocks")) {
        if (!doc["clocks"].is_array())
            throw ModelError("model.clocks must be an array");
        for (std::size_t i = 0; i < doc["clocks"].size(); ++i) {
            const auto& c = doc["clocks"][i];
            const auto where = "clocks[" + std::to_string(i) + "]";
            if (c.is_string()) {
                tc.clocks.push_back(get_id(c, where));
                tc.clock_bounds.emplace_back();
                continue;
            }
            check_keys(c, where, {"id", "bound"});
            if (!c.contains("id"))
                throw ModelError(where + " needs an id");
            tc.clocks.push_back(get_id(c["id"], where + ".id"));
            tc.clock_bounds.push_back(c.contains("bound") ? std::optional(get_natural(c["bound"], where + ".bound"))
                                                          : std::nullopt);
        }
    }
    for (std::size_t i = 0; i < tc.clocks.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (tc.clocks[i] == tc.clocks[j])
                throw ModelError("duplicate clock id '" + tc.clocks[i] + "'");
    if (!m.timed && !tc.clocks.empty())
        throw ModelError("untimed model declares clocks; set \"timed\": true");

    // States.
    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
        throw ModelError("model.states must be a non-empty array");
    std::vector<std::optional<CostVector>> state_costs;
    std::vector<Json> invariants;
    for (std::size_t i = 0; i < doc["states"].size(); ++i) {
        const auto& s = doc["states"][i];
        const auto where = "states[" + std::to_string(i) + "]";
        if (s.is_string()) {
            tc.states.push_back(get_id(s, where));
            tc.labels.push_back({tc.states.back()});
            state_costs.emplace_back();
            invariants.emplace_back();
            continue;
        }
        check_keys(s, where, {"id", "labels", "cost", "invariant", "description"});
        if (!s.contains("id"))
            throw ModelError(where + " needs an id");
        tc.states.push_back(get_id(s["id"], where + ".id"));
        std::set<std::string> labels;
        if (s.contains("labels")) {
            if (!s["labels"].is_array())
                throw ModelError(where + ".labels must be an array");
            for (std::size_t k = 0; k < s["labels"].size(); ++k)
                labels.insert(get_string(s["labels"][k], where + ".labels[" + std::to_string(k) + "]"));
        } else {
            labels.insert(tc.states.back());
        }
        tc.labels.push_back(std::move(labels));
        state_costs.push_back(s.contains("cost") ? std::optional(get_cost(s["cost"], where + ".cost")) : std::nullopt);
        invariants.push_back(s.contains("invariant") ? s["invariant"] : Json());
    }
    tc.normalize_tables();
    for (std::size_t v = 0; v < invariants.size(); ++v) {
        const auto& inv = invariants[v];
        if (inv.is_null())
            continue;
        const auto where = "states[" + std::to_string(v) + "].invariant";
        if (!inv.is_object())
            throw ModelError(where + " must map clock ids to limits");
        for (const auto& [clock, limit] : inv.items()) {
            auto x = tc.find_clock(clock);
            if (!x)
                throw ModelError("unknown clock '" + clock + "' in " + where);
            tc.invariants[v][*x] = get_natural(limit, where + "." + clock);
        }
    }

    if (!doc.contains("initial"))
        throw ModelError("model.initial is required");
    {
        const auto name = get_string(doc["initial"], "model.initial");
        auto v = tc.find_state(name);
        if (!v)
            throw ModelError("initial state '" + name + "' is not declared");
        tc.initial = *v;
    }

    // Edges.
    if (doc.contains("edges")) {
        if (!doc["edges"].is_array())
            throw ModelError("model.edges must be an array");
        for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
            const auto& e = doc["edges"][i];
            const auto where = "edges[" + std::to_string(i) + "]";
            check_keys(e, where, {"from", "to", "inhibitors", "guard"});
            if (!e.contains("from") || !e.contains("to"))
                throw ModelError(where + " needs from and to");
            TimedEdge edge;
            for (const auto* end : {"from", "to"}) {
                const auto name = get_string(e[end], where + "." + end);
                auto v = tc.find_state(name);
                if (!v)
                    throw ModelError("unknown state '" + name + "' in " + where + "." + end);
                (std::string(end) == "from" ? edge.source : edge.target) = *v;
            }
            if (e.contains("inhibitors"))
                edge.inhibitors = get_cocktail(tc.drugs, e["inhibitors"], where + ".inhibitors");
            if (e.contains("guard")) {
                if (!m.timed)
                    throw ModelError(where + ".guard needs a timed model");
                const auto g = get_string(e["guard"], where + ".guard");
                try {
                    edge.guard = parse_constraint(g, tc.clocks);
                } catch (const ParseError& err) {
                    throw ParseError(where + ".guard: " + err.message(), err.position());
                }
            }
            tc.edges.push_back(std::move(edge));
        }
    }

    // Rates.
    if (doc.contains("rates")) {
        if (!m.timed)
            throw ModelError("rates need a timed model");
        if (!doc["rates"].is_array())
            throw ModelError("model.rates must be an array");
        for (std::size_t i = 0; i < doc["rates"].size(); ++i) {
            const auto& r = doc["rates"][i];
            const auto where = "rates[" + std::to_string(i) + "]";
            check_keys(r, where, {"state", "drug", "clock", "rate"});
            for (const auto* key : {"state", "drug", "clock", "rate"})
                if (!r.contains(key))
                    throw ModelError(where + " needs " + key);
            const auto sv = tc.find_state(get_string(r["state"], where + ".state"));
            const auto dv = tc.drugs.find(get_string(r["drug"], where + ".drug"));
            const auto xv = tc.find_clock(get_string(r["clock"], where + ".clock"));
            if (!sv || !dv || !xv)
                throw ModelError(where + " refers to an unknown state, drug or clock");
            const auto rate = get_rational(r["rate"], where + ".rate");
            if (rate < Rational(0))
                throw ModelError(where + ".rate must be non-negative");
            tc.rates[{*sv, *dv, *xv}] = rate;
        }
    }

    // Costs.
    std::size_t dimension = 1;
    for (const auto& c : state_costs)
        if (c)
            dimension = c->size();
    for (const auto& c : drug_costs)
        if (c)
            dimension = c->size();
    Json costs = doc.contains("costs") ? doc["costs"] : Json::object();
    check_keys(costs, "model.costs", {"dimension", "discount", "timed_discount", "cocktails"});
    if (costs.contains("dimension")) {
        dimension = get_natural(costs["dimension"], "costs.dimension");
        if (dimension == 0)
            throw ModelError("costs.dimension must be positive");
    }
    m.costs = CostModel::zero(dimension, tc.state_count(), tc.drugs.size());
    for (std::size_t v = 0; v < state_costs.size(); ++v)
        if (state_costs[v])
            m.costs.state_costs[v] = *state_costs[v];
    for (std::size_t d = 0; d < drug_costs.size(); ++d)
        if (drug_costs[d])
            m.costs.drug_costs[d] = *drug_costs[d];
    if (costs.contains("discount"))
        m.costs.discount = get_number(costs["discount"], "costs.discount");
    if (costs.contains("timed_discount"))
        m.costs.timed_discount = get_number(costs["timed_discount"], "costs.timed_discount");
    if (costs.contains("cocktails")) {
        if (!costs["cocktails"].is_array())
            throw ModelError("costs.cocktails must be an array");
        for (std::size_t i = 0; i < costs["cocktails"].size(); ++i) {
            const auto& c = costs["cocktails"][i];
            const auto where = "costs.cocktails[" + std::to_string(i) + "]";
            check_keys(c, where, {"drugs", "cost"});
            if (!c.contains("drugs") || !c.contains("cost"))
                throw ModelError(where + " needs drugs and cost");
            m.costs.cocktail_costs[get_cocktail(tc.drugs, c["drugs"], where + ".drugs")] =
                get_cost(c["cost"], where + ".cost");
        }
    }
    m.costs.check(tc.state_count(), tc.drugs.size());

    if (doc.contains("menu")) {
        if (!doc["menu"].is_array())
            throw ModelError("model.menu must be an array of cocktails");
        for (std::size_t i = 0; i < doc["menu"].size(); ++i)
            m.menu.push_back(get_cocktail(tc.drugs, doc["menu"][i], "menu[" + std::to_string(i) + "]"));
    }

    apply_transforms(m);
    if (m.timed || m.emulate_inhibitors) {
        m.report = validate(m.model, m.clock_bound);
    } else {
        m.report = validate(m.cha());
    }
    if (require_valid && !m.report.ok())
        throw InvalidModelError("model '" + m.name + "' is invalid: " + m.report.errors().front()->message,
                                m.report);
    return m;
}

ModelFile load_model(const std::filesystem::path& path, bool require_valid)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open model file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), require_valid);
}

Json cocktail_json(const DrugUniverse& drugs, Cocktail c)
{
    return Json(drugs.names_of(c));
}

Cocktail cocktail_from_json(const DrugUniverse& drugs, const Json& j)
{
    return get_cocktail(drugs, j, "cocktail");
}

std::string format_cocktail_list(const DrugUniverse& drugs, Cocktail c)
{
    return drugs.format(c);
}

Cocktail parse_cocktail(const DrugUniverse& drugs, std::string_view text)
{
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}')
        s = s.substr(1, s.size() - 2);
    if (s.empty() || s == "none")
        return {};
    Cocktail c;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto end = s.find_first_of("+,", start);
        if (end == std::string::npos)
            end = s.size();
        c = c.with(drugs.at(s.substr(start, end - start)));
        start = end + 1;
    }
    return c;
}

Json to_json(const ModelFile& m)
{
    const auto& tc = m.declared;
    Json j;
    j["format"] = "cha-model";
    j["version"] = model_format_version;
    j["name"] = m.name;
    j["description"] = m.description;
    j["timed"] = m.timed;
    j["implicit_self_loops"] = m.implicit_self_loops;
    j["emulate_inhibitors"] = m.emulate_inhibitors;
    j["emulation_threshold"] = m.emulation_threshold;
    if (m.clock_bound)
        j["clock_bound"] = *m.clock_bound;
    j["drugs"] = Json::array();
    for (DrugId d = 0; d < tc.drugs.size(); ++d)
        j["drugs"].push_back({{"id", tc.drugs.name(d)}, {"cost", m.costs.drug_costs.at(d)}});
    j["clocks"] = Json::array();
    for (ClockId x = 0; x < tc.clock_count(); ++x) {
        Json c{{"id", tc.clocks[x]}};
        if (tc.clock_bounds.size() > x && tc.clock_bounds[x])
            c["bound"] = *tc.clock_bounds[x];
        j["clocks"].push_back(c);
    }
    j["states"] = Json::array();
    for (StateId v = 0; v < tc.state_count(); ++v) {
        Json s{{"id", tc.states[v]}, {"labels", tc.labels[v]}, {"cost", m.costs.state_costs.at(v)}};
        Json inv = Json::object();
        for (ClockId x = 0; x < tc.clock_count(); ++x)
            if (auto l = tc.invariant(v, x))
                inv[tc.clocks[x]] = *l;
        if (!inv.empty())
            s["invariant"] = inv;
        j["states"].push_back(s);
    }
    j["initial"] = tc.states.at(tc.initial);
    j["edges"] = Json::array();
    for (const auto& e : tc.edges) {
        Json edge{{"from", tc.states[e.source]}, {"to", tc.states[e.target]}};
        edge["inhibitors"] = cocktail_json(tc.drugs, e.inhibitors);
        if (m.timed)
            edge["guard"] = format_constraint(e.guard, tc.clocks);
        j["edges"].push_back(edge);
    }
    if (m.timed) {
        j["rates"] = Json::array();
        for (const auto& [key, r] : tc.rates) {
            const auto& [v, d, x] = key;
            j["rates"].push_back(
                {{"state", tc.states[v]}, {"drug", tc.drugs.name(d)}, {"clock", tc.clocks[x]}, {"rate", to_string(r)}});
        }
    }
    Json costs{{"dimension", m.costs.dimension},
               {"discount", m.costs.discount},
               {"timed_discount", m.costs.timed_discount}};
    costs["cocktails"] = Json::array();
    for (const auto& [c, v] : m.costs.cocktail_costs)
        costs["cocktails"].push_back({{"drugs", cocktail_json(tc.drugs, c)}, {"cost", v}});
    j["costs"] = costs;
    if (!m.menu.empty()) {
        j["menu"] = Json::array();
        for (auto c : m.menu)
            j["menu"].push_back(cocktail_json(tc.drugs, c));
    }
    return j;
}

Json to_json(const ValidationReport& report, const TimedCha& tc)
{
    auto kind_name = [](Finding::Kind k) {
        switch (k) {
        case Finding::Kind::DuplicateState: return "duplicate-id";
        case Finding::Kind::DanglingState: return "dangling-id";
        case Finding::Kind::UnknownDrug: return "unknown-drug";
        case Finding::Kind::BadInitial: return "bad-initial";
        case Finding::Kind::Totality: return "totality";
        case Finding::Kind::Guard: return "guard";
        case Finding::Kind::Invariant: return "invariant-exit";
        case Finding::Kind::Rate: return "rate";
        case Finding::Kind::Bound: return "bound";
        case Finding::Kind::Warning: return "warning";
        }
        return "?";
    };
    auto entry = [&](const Finding& f) {
        Json e{{"kind", kind_name(f.kind)}, {"message", f.message}};
        if (f.state && *f.state < tc.state_count())
            e["state"] = tc.states[*f.state];
        if (f.cocktail)
            e["cocktail"] = cocktail_json(tc.drugs, *f.cocktail);
        return e;
    };
    Json j{{"ok", report.ok()}, {"errors", Json::array()}, {"warnings", Json::array()}};
    for (const auto* f : report.errors())
        j["errors"].push_back(entry(*f));
    for (const auto* f : report.warnings())
        j["warnings"].push_back(entry(*f));
    return j;
}

Json to_json(const GameGraph& g)
{
    const auto& tc = g.model;
    Json j{{"format", "cha-game"}, {"version", report_format_version}};
    j["menu"] = Json::array();
    for (auto c : g.menu)
        j["menu"].push_back(cocktail_json(tc.drugs, c));
    j["clocks"] = g.clocks;
    j["sampling_clock"] = g.sampling_clock ? Json(g.clocks[*g.sampling_clock]) : Json();
    j["locations"] = Json::array();
    for (std::size_t loc = 0; loc < g.location_count(); ++loc) {
        Json inv = Json::object();
        Json rates = Json::object();
        for (ClockId x = 0; x < g.clocks.size(); ++x) {
            if (auto l = g.invariant(loc, x))
                inv[g.clocks[x]] = *l;
            rates[g.clocks[x]] = to_string(g.rate(loc, x));
        }
        j["locations"].push_back({{"id", loc},
                                  {"name", g.location_name(loc)},
                                  {"state", tc.states[g.state_of(loc)]},
                                  {"cocktail", cocktail_json(tc.drugs, g.menu[g.cocktail_of(loc)])},
                                  {"invariant", inv},
                                  {"rates", rates},
                                  {"labels", tc.labels[g.state_of(loc)]}});
    }
    j["edges"] = Json::array();
    for (const auto& e : g.edges) {
        Json edge{{"kind", e.kind == GameEdge::Kind::Controllable ? "controllable" : "uncontrollable"},
                  {"from", e.from},
                  {"to", e.to},
                  {"guard", format_constraint(e.guard, g.clocks)},
                  {"resets_clocks", e.resets_clocks},
                  {"resets_sampling", e.resets_sampling}};
        if (e.kind == GameEdge::Kind::Uncontrollable)
            edge["model_edge"] = e.model_edge;
        j["edges"].push_back(edge);
    }
    j["initial"] = g.initial;
    std::size_t controllable = 0;
    for (const auto& e : g.edges)
        controllable += e.kind == GameEdge::Kind::Controllable ? 1 : 0;
    j["summary"] = {{"locations", g.location_count()},
                    {"controllable_edges", controllable},
                    {"uncontrollable_edges", g.edges.size() - controllable}};
    return j;
}

namespace {

Json region_json(const QuotientGame& q, std::size_t region_index)
{
    const auto r = q.region(region_index);
    Json out = Json::array();
    for (std::size_t x = 0; x < r.code.size(); ++x)
        out.push_back({{"clock", q.game.model.clocks[x]},
                       {"floor", to_string(Rational(r.floor(x), q.scale))},
                       {"ceil", to_string(Rational(r.ceil(x), q.scale))},
                       {"saturated", r.code[x] == 2 * q.scaled_bound[x]}});
    return out;
}

Json node_json(const QuotientGame& q, std::size_t node)
{
    if (node == q.sink)
        return {{"name", timelock_label}, {"state", nullptr}, {"labels", {timelock_label}}};
    const auto loc = q.location(node);
    return {{"name", q.node_name(node)},
            {"state", q.game.model.states[q.state(node)]},
            {"cocktail", cocktail_json(q.game.model.drugs, q.game.menu[q.game.cocktail_of(loc)])},
            {"region", region_json(q, q.region_index(node))},
            {"region_codes", q.region(q.region_index(node)).code},
            {"labels", q.labels(node)}};
}

} // namespace

Json to_json(const QuotientGame& q, bool full)
{
    const auto& tc = q.game.model;
    Json j{{"format", "cha-quotient"}, {"version", report_format_version}};
    j["scale"] = q.scale;
    j["bound"] = Json::object();
    for (ClockId x = 0; x < tc.clock_count(); ++x)
        j["bound"][tc.clocks[x]] = q.bound[x];
    j["menu"] = Json::array();
    for (auto c : q.game.menu)
        j["menu"].push_back(cocktail_json(tc.drugs, c));
    j["locations"] = q.game.location_count();
    j["regions_per_location"] = q.regions_per_location;
    j["nodes"] = q.node_count();
    j["initial"] = q.node_name(q.initial);
    j["region_encoding"] = "per clock 2j = point j/scale, 2j+1 = open interval (j/scale, (j+1)/scale); "
                           "2*scale*bound = saturated";
    j["zeno_free"] = every_cycle_has_delay(q);
    const auto rk = round_kripke(q);
    j["reachable_round_nodes"] = rk.kripke.size();
    if (full) {
        Json nodes = Json::array();
        Json edges = Json::array();
        for (std::size_t i = 0; i < rk.kripke.size(); ++i) {
            auto n = node_json(q, rk.game_node[i]);
            n["id"] = i;
            nodes.push_back(n);
            for (auto t : rk.kripke.successors[i])
                edges.push_back({i, t});
        }
        j["round_graph"] = {{"nodes", nodes}, {"edges", edges}, {"initial", rk.kripke.initial}};
    }
    return j;
}

Json strategy_to_json(const QuotientGame& q, const Strategy& s, const std::string& model_name,
                      const std::string& goal)
{
    const auto& tc = q.game.model;
    Json j{{"format", "cha-strategy"}, {"version", report_format_version}, {"model", model_name}, {"goal", goal}};
    j["menu"] = Json::array();
    for (auto c : q.game.menu)
        j["menu"].push_back(cocktail_json(tc.drugs, c));
    j["scale"] = q.scale;
    j["bound"] = q.bound;
    j["choices"] = Json::array();
    const auto rk = round_kripke(q);
    std::vector<std::size_t> nodes;
    for (auto n : rk.game_node)
        if (n != q.sink && s.defined(q.cell(n)))
            nodes.push_back(n);
    std::sort(nodes.begin(), nodes.end());
    for (auto n : nodes) {
        const auto loc = q.location(n);
        j["choices"].push_back({{"node", q.node_name(n)},
                                {"state", tc.states[q.state(n)]},
                                {"cocktail", cocktail_json(tc.drugs, q.game.menu[q.game.cocktail_of(loc)])},
                                {"region", q.region(q.region_index(n)).code},
                                {"choice", cocktail_json(tc.drugs, q.game.menu[s.choice[q.cell(n)]])}});
    }
    return j;
}

Strategy strategy_from_json(const QuotientGame& q, const Json& j)
{
    const auto& tc = q.game.model;
    if (!j.is_object() || j.value("format", "") != "cha-strategy")
        throw ModelError("not a strategy file");
    if (j.value("version", 0) != report_format_version)
        throw ModelError("unsupported strategy version");
    auto menu_index = [&](Cocktail c) {
        auto it = std::find(q.game.menu.begin(), q.game.menu.end(), c);
        if (it == q.game.menu.end())
            throw ModelError("strategy uses cocktail " + tc.drugs.format(c) + " outside the menu");
        return static_cast<std::size_t>(it - q.game.menu.begin());
    };
    if (!j.contains("menu") || !j["menu"].is_array() || j["menu"].size() != q.game.menu.size())
        throw ModelError("strategy menu does not match the game menu");
    for (std::size_t i = 0; i < q.game.menu.size(); ++i)
        if (cocktail_from_json(tc.drugs, j["menu"][i]) != q.game.menu[i])
            throw ModelError("strategy menu does not match the game menu");
    if (j.value("scale", std::int64_t{0}) != q.scale || j.value("bound", std::vector<std::uint32_t>{}) != q.bound)
        throw ModelError("strategy was computed for a different clock bound or grid");
    Strategy s;
    s.choice.assign(q.sink / 3, Strategy::unset);
    for (const auto& c : j.at("choices")) {
        const auto v = tc.state_at(c.at("state").get<std::string>());
        const auto loc = q.game.location(v, menu_index(cocktail_from_json(tc.drugs, c.at("cocktail"))));
        Region r{c.at("region").get<std::vector<std::int64_t>>()};
        if (r.code.size() != q.scaled_bound.size())
            throw ModelError("strategy region has the wrong number of clocks");
        for (std::size_t x = 0; x < r.code.size(); ++x)
            if (r.code[x] < 0 || r.code[x] > 2 * q.scaled_bound[x])
                throw ModelError("strategy region code out of range");
        const auto cell = loc * q.regions_per_location + q.region_index(r);
        s.choice[cell] = static_cast<std::uint16_t>(menu_index(cocktail_from_json(tc.drugs, c.at("choice"))));
    }
    return s;
}

Json to_json(const SynthesisResult& r, const QuotientGame& q)
{
    const auto& tc = q.game.model;
    Json j{{"format", "cha-synthesis"}, {"version", report_format_version}, {"goal", r.goal},
           {"status", to_string(r.status)}};
    j["stats"] = {{"nodes", r.stats.nodes},
                  {"controller_cells", r.stats.controller_cells},
                  {"winning_controller_cells", r.stats.winning_controller_cells},
                  {"reachable_controller_nodes", r.stats.reachable_controller_nodes},
                  {"iterations", r.stats.iterations},
                  {"scale", r.stats.scale},
                  {"regions_per_location", r.stats.regions_per_location}};
    j["initial_winning"] = r.winning.at(q.initial / 3);
    Json table = Json::array();
    const auto closed = round_kripke(q, &r.strategy);
    std::vector<std::size_t> nodes(closed.game_node.begin(), closed.game_node.end());
    std::sort(nodes.begin(), nodes.end());
    for (auto n : nodes) {
        if (n == q.sink) {
            table.push_back({{"node", timelock_label}, {"state", nullptr}, {"choice", nullptr}, {"winning", false}});
            continue;
        }
        table.push_back({{"node", q.node_name(n)},
                         {"state", tc.states[q.state(n)]},
                         {"choice", cocktail_json(tc.drugs, q.game.menu[r.strategy.choice[q.cell(n)]])},
                         {"winning", bool(r.winning[q.cell(n)])}});
    }
    j["strategy_table"] = table;
    if (r.counterexample) {
        Json trace = Json::array();
        for (auto n : r.counterexample->nodes)
            trace.push_back(q.node_name(n));
        j["counterexample"] = {{"trace", trace},
                               {"loop_start", r.counterexample->loop_start ? Json(*r.counterexample->loop_start)
                                                                           : Json()}};
    }
    return j;
}

} // namespace chakit
