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
#include "chakit/error.hpp"
#include "chakit/game.hpp"
#include "chakit/model.hpp"
#include "chakit/synthesis.hpp"
#include "chakit/timed.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace chakit {

using Json = nlohmann::json;

inline constexpr int model_format_version = 1;
inline constexpr int report_format_version = 1;

/// The model failed validation; the report lists every finding.
class InvalidModelError : public Error {
public:
    InvalidModelError(const std::string& what, ValidationReport report)
        : Error(what), report_(std::move(report))
    {
    }
    [[nodiscard]] const char* kind() const noexcept override { return "invalid-model"; }
    [[nodiscard]] const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

/// A loaded model file. `declared` is the model as written; `model` has the
/// format-level transforms applied (implicit self-loops, inhibitor
/// emulation). Untimed models are zero-clock timed models whose
/// environment must move every round.
struct ModelFile {
    std::string name;
    std::string description;
    bool timed = false;
    bool implicit_self_loops = false;
    bool emulate_inhibitors = false;
    std::uint32_t emulation_threshold = 1;
    std::optional<std::uint32_t> clock_bound;
    TimedCha declared;
    TimedCha model;
    CostModel costs;
    /// Declared menu (may be empty); see default_menu.
    std::vector<Cocktail> menu;
    ValidationReport report;

    /// Untimed view (meaningful for untimed files).
    [[nodiscard]] Cha cha() const { return skeleton(model); }
    /// Declared menu, else every cocktail when there are at most 6 drugs,
    /// else ∅ and the single drugs; canonical order.
    [[nodiscard]] std::vector<Cocktail> default_menu() const;
};

/// Parses and validates. Throws ParseError (with line and column in the
/// message) for malformed JSON or values, ModelError for schema violations
/// and InvalidModelError when validation finds errors.
/// With `require_valid` false, validation errors are left in the report.
ModelFile parse_model(const std::string& text, bool require_valid = true);
ModelFile load_model(const std::filesystem::path& path, bool require_valid = true);

/// Canonical serialization of the declared model.
Json to_json(const ModelFile& m);

Json to_json(const ValidationReport& report, const TimedCha& tc);

std::string format_cocktail_list(const DrugUniverse& drugs, Cocktail c);
/// "A+B", "{A,B}", "none", "{}" or "" (empty). Throws UnknownIdError.
Cocktail parse_cocktail(const DrugUniverse& drugs, std::string_view text);
Json cocktail_json(const DrugUniverse& drugs, Cocktail c);
Cocktail cocktail_from_json(const DrugUniverse& drugs, const Json& j);

/// Game graph (translate/discretize output).
Json to_json(const GameGraph& g);
/// Quotient summary plus, when `full`, every reachable round node and edge.
Json to_json(const QuotientGame& q, bool full);

/// Strategy over the controller nodes reachable in the quotient.
Json strategy_to_json(const QuotientGame& q, const Strategy& s, const std::string& model_name,
                      const std::string& goal);
/// Inverse of strategy_to_json for the same model, menu and bound. Throws
/// ModelError on a mismatch.
Strategy strategy_from_json(const QuotientGame& q, const Json& j);

Json to_json(const SynthesisResult& r, const QuotientGame& q);

} // namespace chakit
