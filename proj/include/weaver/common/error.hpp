/*
 * Copyright (C) 2026 The Weaver Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace weaver {

// Broad error classes; the api layer maps each to an HTTP status.
enum class ErrorKind {
    invalid,          // malformed or rule-violating input
    not_found,
    conflict,         // duplicate edge, superseded request
    stale,            // facts invalidated by a newer callout
    upstream,         // remote generator / backend failure
    not_implemented,
    internal,
};

// Engine error with a stable machine code ("unknown_column", "facts_stale", ...)
// and an optional field path naming the offending input.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message, std::string field = {})
        : std::runtime_error(message), kind_(kind), code_(std::move(code)), field_(std::move(field)) {}

    [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }
    [[nodiscard]] auto code() const noexcept -> const std::string& { return code_; }
    [[nodiscard]] auto field() const noexcept -> const std::string& { return field_; }

private:
    ErrorKind kind_;
    std::string code_;
    std::string field_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message, std::string field = {}) {
    throw Error(ErrorKind::invalid, std::move(code), message, std::move(field));
}

[[noreturn]] inline void fail_not_found(std::string code, const std::string& message) {
    throw Error(ErrorKind::not_found, std::move(code), message);
}

}  // namespace weaver
