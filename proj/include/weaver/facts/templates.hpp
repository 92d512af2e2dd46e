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

#include "weaver/facts/fact.hpp"

#include <map>
#include <string>
#include <string_view>

namespace weaver::facts {

// Sentence templates keyed "<family>.<variant>". Placeholders are {name} and
// are filled from a fact payload; numbers are formatted by key name.
class TemplateSet {
public:
    // The set compiled in from data/fact_templates.json.
    static auto builtin() -> const TemplateSet&;
    // Errors: malformed_templates.
    static auto from_json(std::string_view text) -> TemplateSet;

    [[nodiscard]] auto has(std::string_view key) const -> bool;
    [[nodiscard]] auto pattern(std::string_view key) const -> const std::string&;
    // Errors (internal): unknown template key, placeholder missing from payload.
    [[nodiscard]] auto render(std::string_view key, const std::map<std::string, PayloadValue>& payload) const
        -> std::string;
    [[nodiscard]] auto size() const -> std::size_t { return patterns_.size(); }

private:
    std::map<std::string, std::string, std::less<>> patterns_;
};

auto render_payload_value(std::string_view key, const PayloadValue& value) -> std::string;

}  // namespace weaver::facts
