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

#include "chakit/execute.hpp"
#include "chakit/game.hpp"
#include "chakit/model_io.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace chakit {

inline constexpr int service_format_version = 1;

struct ServiceResponse {
    int status = 200;
    Json body;
};

/// One move of a session: the controller's cocktail, the environment's
/// edge (none for a pass) and the unit delay that closed the round.
struct SessionMove {
    std::size_t round = 0;
    std::size_t cocktail = 0;
    std::optional<std::size_t> edge;
    Rational delay{1};
    CostVector cost;
};

struct SessionState {
    std::string id;
    AdversaryPolicy policy;
    std::uint64_t seed = 0;
    std::size_t max_rounds = 1000;
    GameState state;
    std::vector<SessionMove> history;
    CostVector cost;
    bool terminated = false;
    std::string outcome;
    std::mt19937_64 rng;
};

/// Request handling for the explorer service, independent of the transport.
/// The model, the quotient and the optional strategy are immutable; each
/// session is guarded by its own mutex.
class Service {
public:
    /// `strategy` is a strategy file as written by `synthesize
    /// --strategy-out`; its menu is used for the sessions.
    Service(ModelFile model, std::optional<Json> strategy = std::nullopt, QuotientOptions options = {});

    ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body);

    [[nodiscard]] const QuotientGame& game() const { return q_; }

    /// Fresh session state with this policy and seed; `moves` are replayed
    /// on top. Used by the replay check.
    [[nodiscard]] SessionState replay(const std::string& id, const AdversaryPolicy& policy, std::uint64_t seed,
                                      std::size_t max_rounds, const std::vector<std::size_t>& cocktails) const;

    /// Applies one round; returns the move (with `outcome` updated).
    SessionMove advance(SessionState& s, std::size_t cocktail) const;

    [[nodiscard]] Json session_json(const SessionState& s) const;

private:
    struct Slot {
        std::mutex mutex;
        SessionState state;
    };

    ServiceResponse create_session(const Json& body);
    ServiceResponse step(Slot& slot, const Json& body);
    ServiceResponse recommend(const SessionState& s) const;
    ServiceResponse error(int status, const std::string& kind, const std::string& message) const;
    std::shared_ptr<Slot> find(const std::string& id);

    ModelFile model_;
    QuotientGame q_;
    std::optional<Strategy> strategy_;
    std::string goal_;
    std::vector<std::vector<StateId>> adjacency_;

    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::size_t next_id_ = 1;
};

/// Optional hooks for embedding the server (tests, tools).
struct ServeControl {
    /// Called with the bound port once the socket is listening.
    std::function<void(int)> on_listening;
    /// Set to stop serving; checked every few milliseconds.
    std::atomic<bool> stop{false};
};

/// Serves `service` over HTTP until the process is stopped (or `control`
/// asks to stop). Port 0 picks a free port. Throws Error when the port
/// cannot be bound.
void serve(Service& service, const std::string& host, int port, std::ostream& log, ServeControl* control = nullptr);

} // namespace chakit
