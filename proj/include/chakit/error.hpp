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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chakit {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1 with a structured message.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    /// Short machine-readable category, used as the `error` field in JSON.
    [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

#define CHAKIT_DEFINE_ERROR(Name, Kind)                                     \
    class Name : public Error {                                             \
    public:                                                                 \
        using Error::Error;                                                 \
        [[nodiscard]] const char* kind() const noexcept override { return Kind; } \
    }

CHAKIT_DEFINE_ERROR(UnknownIdError, "unknown-id");
CHAKIT_DEFINE_ERROR(DeadEndError, "dead-end");
CHAKIT_DEFINE_ERROR(ExplosionError, "explosion-guard");
CHAKIT_DEFINE_ERROR(DivergenceError, "divergence");
CHAKIT_DEFINE_ERROR(DimensionMismatchError, "dimension-mismatch");
CHAKIT_DEFINE_ERROR(DomainMismatchError, "domain-mismatch");
CHAKIT_DEFINE_ERROR(InvariantViolationError, "invariant-violation");
CHAKIT_DEFINE_ERROR(GuardUnsatisfiedError, "guard-unsatisfied");
CHAKIT_DEFINE_ERROR(EdgeNotFoundError, "edge-not-found");
CHAKIT_DEFINE_ERROR(UnknownAtomError, "unknown-atom");
CHAKIT_DEFINE_ERROR(UnsupportedFragmentError, "fragment-unsupported");
CHAKIT_DEFINE_ERROR(PartialStrategyError, "partial-strategy");
CHAKIT_DEFINE_ERROR(UnboundedClockError, "unbounded-clock");
CHAKIT_DEFINE_ERROR(RegionSplitError, "region-split");
CHAKIT_DEFINE_ERROR(TherapyError, "therapy");
CHAKIT_DEFINE_ERROR(ModelError, "model");

#undef CHAKIT_DEFINE_ERROR

/// Syntax error in a formula, rational, guard or model file. `position` is a
/// 0-based character offset (or JSON byte offset) into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position), message_(message) {}
    [[nodiscard]] const char* kind() const noexcept override { return "parse"; }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    std::size_t position_;
    std::string message_;
};

} // namespace chakit
