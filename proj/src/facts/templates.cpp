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

#include "weaver/facts/templates.hpp"

#include "weaver/common/error.hpp"
#include "weaver/common/format.hpp"

#include <nlohmann/json.hpp>

namespace weaver::facts {

namespace detail {
extern const char* const kBuiltinTemplates;
}

auto render_payload_value(std::string_view key, const PayloadValue& value) -> std::string {
    if (const auto* number = std::get_if<double>(&value)) return format_payload_number(key, *number);
    return std::get<std::string>(value);
}

auto TemplateSet::builtin() -> const TemplateSet& {
    static const TemplateSet set = from_json(detail::kBuiltinTemplates);
    return set;
}

auto TemplateSet::from_json(std::string_view text) -> TemplateSet {
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail("malformed_templates", "template file must be a JSON object");
    TemplateSet set;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string()) fail("malformed_templates", "template " + key + " is not a string", key);
        set.patterns_.emplace(key, value.get<std::string>());
    }
    return set;
}

auto TemplateSet::has(std::string_view key) const -> bool { return patterns_.find(key) != patterns_.end(); }

auto TemplateSet::pattern(std::string_view key) const -> const std::string& {
    auto it = patterns_.find(key);
    if (it == patterns_.end()) {
        throw Error(ErrorKind::internal, "unknown_template", "no template named " + std::string(key));
    }
    return it->second;
}

auto TemplateSet::render(std::string_view key, const std::map<std::string, PayloadValue>& payload) const
    -> std::string {
    const std::string& pattern = this->pattern(key);
    std::string out;
    out.reserve(pattern.size() + 32);
    std::size_t pos = 0;
    while (pos < pattern.size()) {
        std::size_t open = pattern.find('{', pos);
        if (open == std::string::npos) {
            out.append(pattern, pos);
            break;
        }
        std::size_t close = pattern.find('}', open);
        if (close == std::string::npos) {
            throw Error(ErrorKind::internal, "bad_template", "unterminated placeholder in " + std::string(key));
        }
        out.append(pattern, pos, open - pos);
        std::string name = pattern.substr(open + 1, close - open - 1);
        auto it = payload.find(name);
        if (it == payload.end()) {
            throw Error(ErrorKind::internal, "missing_placeholder",
                        "template " + std::string(key) + " needs payload value " + name);
        }
        out += render_payload_value(name, it->second);
        pos = close + 1;
    }
    return out;
}

}  // namespace weaver::facts
