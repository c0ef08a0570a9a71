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

#include "chakit/service.hpp"

#include "chakit/cost.hpp"
#include "chakit/error.hpp"

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

namespace chakit {

namespace {

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : path.substr(0, path.find('?'))) {
        if (ch == '/') {
            if (!cur.empty())
                parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        parts.push_back(cur);
    return parts;
}

Json parse_body(const std::string& body)
{
    if (body.empty())
        return Json::object();
    auto j = Json::parse(body);
    if (!j.is_object())
        throw ModelError("request body must be a JSON object");
    return j;
}

} // namespace

Service::Service(ModelFile model, std::optional<Json> strategy, QuotientOptions options) : model_(std::move(model))
{
    std::vector<Cocktail> menu;
    if (strategy) {
        if (!strategy->contains("menu") || !(*strategy)["menu"].is_array())
            throw ModelError("strategy file has no menu");
        for (const auto& c : (*strategy)["menu"])
            menu.push_back(cocktail_from_json(model_.model.drugs, c));
    } else {
        menu = model_.default_menu();
    }
    q_ = build_quotient(model_.model, canonical_menu(menu), options);
    if (strategy) {
        strategy_ = strategy_from_json(q_, *strategy);
        goal_ = strategy->value("goal", "");
    }
    const auto cha = model_.cha();
    adjacency_.resize(cha.state_count());
    for (const auto& e : cha.edges)
        adjacency_[e.source].push_back(e.target);
}

SessionMove Service::advance(SessionState& s, std::size_t cocktail) const
{
    const auto& g = q_.game;
    const auto& tc = g.model;
    SessionMove m;
    m.round = s.history.size();
    m.cocktail = cocktail;
    m.cost = CostVector(model_.costs.dimension, 0.0);

    const auto v = g.state_of(s.state.location);
    std::vector<std::optional<std::size_t>> moves;
    for (auto e : environment_edges(g, s.state, cocktail))
        moves.emplace_back(e);
    if (environment_may_pass(g, s.state, cocktail))
        moves.emplace_back(std::nullopt);
    if (moves.empty()) {
        m.delay = Rational(0);
        s.terminated = true;
        s.outcome = "timelock";
        s.history.push_back(m);
        return m;
    }
    std::vector<std::size_t> dist(moves.size(), 0);
    if (s.policy.kind == AdversaryPolicy::Kind::AdversarialToward) {
        const auto d = distances_to_label(adjacency_, tc.labels, s.policy.goal);
        for (std::size_t i = 0; i < moves.size(); ++i)
            dist[i] = d[moves[i] ? tc.edges[*moves[i]].target : v];
    }
    const auto pick = pick_move(s.policy, s.rng, dist);
    m.edge = moves[pick];
    const auto r = play_round(g, s.state, RoundMove{cocktail, m.edge});
    if (r.outcome != RoundOutcome::Ok) {
        m.delay = Rational(0);
        s.terminated = true;
        s.outcome = r.outcome == RoundOutcome::Timelock ? "timelock" : "illegal-move";
        s.history.push_back(m);
        return m;
    }
    const auto c = g.menu[cocktail];
    const auto t = static_cast<double>(m.round);
    if (tc.clock_count() == 0 && !tc.environment_may_idle) {
        const auto sc = model_.costs.state_cost(v);
        const auto cc = model_.costs.cocktail_cost(c);
        const double w = std::pow(model_.costs.discount, t);
        for (std::size_t i = 0; i < m.cost.size(); ++i)
            m.cost[i] = w * (sc[i] + cc[i]);
    } else {
        m.cost = segment_cost(model_.costs, v, c, t, t + 1);
    }
    for (std::size_t i = 0; i < s.cost.size(); ++i)
        s.cost[i] += m.cost[i];
    s.state = r.next;
    s.history.push_back(m);
    if (s.history.size() >= s.max_rounds) {
        s.terminated = true;
        s.outcome = "max-rounds";
    }
    return m;
}

SessionState Service::replay(const std::string& id, const AdversaryPolicy& policy, std::uint64_t seed,
                             std::size_t max_rounds, const std::vector<std::size_t>& cocktails) const
{
    SessionState s;
    s.id = id;
    s.policy = policy;
    s.seed = seed;
    s.max_rounds = max_rounds;
    s.rng.seed(seed);
    s.state = initial_game_state(q_.game);
    s.cost = CostVector(model_.costs.dimension, 0.0);
    s.outcome = "running";
    for (auto c : cocktails) {
        if (s.terminated)
            break;
        advance(s, c);
    }
    return s;
}

Json Service::session_json(const SessionState& s) const
{
    const auto& g = q_.game;
    const auto& tc = g.model;
    const auto& drugs = tc.drugs;
    const auto v = g.state_of(s.state.location);
    Json j{{"format", "cha-session"}, {"version", service_format_version}, {"id", s.id}};
    j["policy"] = s.policy.to_string();
    j["seed"] = s.seed;
    j["max_rounds"] = s.max_rounds;
    j["round"] = s.history.size();
    j["time"] = s.history.size();
    j["terminated"] = s.terminated;
    j["outcome"] = s.outcome;
    j["state"] = tc.states[v];
    j["labels"] = tc.labels[v];
    j["location"] = g.location_name(s.state.location);
    j["cocktail"] = cocktail_json(drugs, g.menu[g.cocktail_of(s.state.location)]);
    Json val = Json::object();
    for (ClockId x = 0; x < g.clocks.size(); ++x)
        val[g.clocks[x]] = to_string(s.state.valuation[x]);
    j["valuation"] = val;
    j["node"] = q_.node_name(q_.controller_node(s.state));
    j["cost"] = s.cost;
    Json options = Json::array();
    for (std::size_t c = 0; c < g.menu.size(); ++c) {
        Json edges = Json::array();
        for (auto e : environment_edges(g, s.state, c))
            edges.push_back({{"edge", e}, {"from", tc.states[tc.edges[e].source]}, {"to", tc.states[tc.edges[e].target]}});
        options.push_back({{"cocktail", cocktail_json(drugs, g.menu[c])},
                           {"enabled_edges", edges},
                           {"may_pass", environment_may_pass(g, s.state, c)}});
    }
    j["options"] = options;
    Json history = Json::array();
    for (const auto& m : s.history) {
        Json edge;
        if (m.edge)
            edge = {{"edge", *m.edge}, {"from", tc.states[tc.edges[*m.edge].source]},
                    {"to", tc.states[tc.edges[*m.edge].target]}};
        history.push_back({{"round", m.round},
                           {"cocktail", cocktail_json(drugs, g.menu[m.cocktail])},
                           {"edge", edge},
                           {"delay", to_string(m.delay)},
                           {"cost", m.cost}});
    }
    j["history"] = history;
    j["strategy_loaded"] = strategy_.has_value();
    return j;
}

ServiceResponse Service::error(int status, const std::string& kind, const std::string& message) const
{
    return {status, Json{{"format", "cha-error"}, {"version", service_format_version}, {"error", kind},
                         {"message", message}}};
}

std::shared_ptr<Service::Slot> Service::find(const std::string& id)
{
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse Service::create_session(const Json& body)
{
    auto policy = AdversaryPolicy::parse(body.value("policy", std::string("first-by-order")));
    const auto seed = body.value("seed", std::uint64_t{0});
    const auto max_rounds = body.value("max_rounds", std::size_t{1000});
    if (max_rounds == 0)
        throw ModelError("max_rounds must be positive");
    auto slot = std::make_shared<Slot>();
    std::string id;
    {
        std::lock_guard lock(sessions_mutex_);
        id = "s" + std::to_string(next_id_++);
        sessions_[id] = slot;
    }
    std::lock_guard lock(slot->mutex);
    slot->state = replay(id, policy, seed, max_rounds, {});
    return {201, session_json(slot->state)};
}

ServiceResponse Service::step(Slot& slot, const Json& body)
{
    auto& s = slot.state;
    if (s.terminated)
        return error(409, "session-terminated", "session " + s.id + " has terminated (" + s.outcome + ")");
    const auto& g = q_.game;
    Cocktail c;
    if (!body.contains("cocktail"))
        c = Cocktail{};
    else if (body["cocktail"].is_string())
        c = parse_cocktail(g.model.drugs, body["cocktail"].get<std::string>());
    else
        c = cocktail_from_json(g.model.drugs, body["cocktail"]);
    auto it = std::find(g.menu.begin(), g.menu.end(), c);
    if (it == g.menu.end())
        return error(400, "not-on-menu", "cocktail " + g.model.drugs.format(c) + " is not on the menu");
    const auto index = static_cast<std::size_t>(it - g.menu.begin());
    const bool dry_run = body.value("dry_run", false);
    SessionState scratch;
    SessionState& target = dry_run ? (scratch = s) : s;
    const auto move = advance(target, index);
    Json edge;
    if (move.edge)
        edge = {{"edge", *move.edge}, {"from", g.model.states[g.model.edges[*move.edge].source]},
                {"to", g.model.states[g.model.edges[*move.edge].target]}};
    Json out{{"format", "cha-step"}, {"version", service_format_version}, {"dry_run", dry_run}};
    out["move"] = {{"round", move.round},
                   {"cocktail", cocktail_json(g.model.drugs, g.menu[move.cocktail])},
                   {"edge", edge},
                   {"delay", to_string(move.delay)}};
    out["cost_delta"] = move.cost;
    out["session"] = session_json(target);
    return {200, out};
}

ServiceResponse Service::recommend(const SessionState& s) const
{
    Json out{{"format", "cha-recommendation"}, {"version", service_format_version}, {"session", s.id}};
    out["node"] = q_.node_name(q_.controller_node(s.state));
    if (!strategy_) {
        out["recommendation"] = nullptr;
        out["message"] = "no strategy loaded";
        return {200, out};
    }
    out["goal"] = goal_;
    const auto cell = q_.cell(q_.controller_node(s.state));
    if (!strategy_->defined(cell)) {
        out["recommendation"] = nullptr;
        out["message"] = "strategy has no choice at this node";
        return {200, out};
    }
    out["recommendation"] = cocktail_json(q_.game.model.drugs, q_.game.menu[strategy_->choice[cell]]);
    return {200, out};
}

ServiceResponse Service::handle(const std::string& method, const std::string& path, const std::string& body)
{
    try {
        const auto parts = split_path(path);
        if (parts.size() == 1 && parts[0] == "model") {
            if (method != "GET")
                return error(405, "method-not-allowed", method + " " + path);
            Json out{{"format", "cha-service-model"}, {"version", service_format_version}};
            out["model"] = to_json(model_);
            out["menu"] = Json::array();
            for (auto c : q_.game.menu)
                out["menu"].push_back(cocktail_json(q_.game.model.drugs, c));
            out["strategy_loaded"] = strategy_.has_value();
            out["goal"] = strategy_ ? Json(goal_) : Json();
            return {200, out};
        }
        if (parts.size() == 1 && parts[0] == "quotient") {
            if (method != "GET")
                return error(405, "method-not-allowed", method + " " + path);
            return {200, to_json(q_, true)};
        }
        if (parts.empty() || parts[0] != "session" || parts.size() > 3)
            return error(404, "not-found", "no endpoint " + method + " " + path);
        if (parts.size() == 1) {
            if (method != "POST")
                return error(405, "method-not-allowed", method + " " + path);
            return create_session(parse_body(body));
        }
        auto slot = find(parts[1]);
        if (!slot)
            return error(404, "unknown-session", "no session '" + parts[1] + "'");
        std::lock_guard lock(slot->mutex);
        const std::string action = parts.size() == 3 ? parts[2] : "";
        if (action.empty() && method == "GET")
            return {200, session_json(slot->state)};
        if (action == "step" && method == "POST")
            return step(*slot, parse_body(body));
        if (action == "recommend" && method == "GET")
            return recommend(slot->state);
        if (action == "reset" && method == "POST") {
            const auto& s = slot->state;
            slot->state = replay(s.id, s.policy, s.seed, s.max_rounds, {});
            return {200, session_json(slot->state)};
        }
        if (action.empty() || action == "step" || action == "recommend" || action == "reset")
            return error(405, "method-not-allowed", method + " " + path);
        return error(404, "not-found", "no endpoint " + method + " " + path);
    } catch (const Json::exception& e) {
        return error(400, "parse", e.what());
    } catch (const Error& e) {
        return error(400, e.kind(), e.what());
    }
}

void serve(Service& service, const std::string& host, int port, std::ostream& log, ServeControl* control)
{
    httplib::Server server;
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        const auto r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body.dump(2) + "\n", "application/json");
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Put(".*", handler);
    server.Delete(".*", handler);
    const int requested = port;
    if (port == 0)
        port = server.bind_to_any_port(host);
    else if (!server.bind_to_port(host, port))
        port = -1;
    if (port <= 0)
        throw Error("cannot listen on " + host + ":" + std::to_string(requested) + " (port in use?)");
    log << "serving on http://" << host << ":" << port << std::endl;
    if (!control) {
        server.listen_after_bind();
        return;
    }
    std::thread watcher([&] {
        while (!control->stop.load())
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        server.stop();
    });
    if (control->on_listening)
        control->on_listening(port);
    server.listen_after_bind();
    control->stop = true;
    watcher.join();
}

} // namespace chakit
