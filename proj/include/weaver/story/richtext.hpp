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

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace weaver::story {

struct Run {
    std::string text;
    bool bold = false;
    bool italic = false;
    std::vector<std::string> fact_ids;  // fact anchor mark
    friend auto operator==(const Run&, const Run&) -> bool = default;
};

struct Paragraph {
    std::vector<Run> runs;
    friend auto operator==(const Paragraph&, const Paragraph&) -> bool = default;
};

// Minimal block format: paragraphs of styled runs with inline fact anchors.
struct RichText {
    std::vector<Paragraph> paragraphs;

    [[nodiscard]] auto plain_text() const -> std::string;  // paragraphs joined by "\n\n"
    [[nodiscard]] auto empty() const -> bool { return paragraphs.empty(); }
    friend auto operator==(const RichText&, const RichText&) -> bool = default;
};

auto plain(std::string_view text) -> RichText;

auto richtext_to_json(const RichText& text) -> nlohmann::json;
// Errors: malformed_richtext (shape, empty runs, empty anchor ids).
auto richtext_from_json(const nlohmann::json& doc) -> RichText;

// HTML with <p>, <strong>, <em> and <span data-facts="id id">; text is escaped.
auto richtext_to_html(const RichText& text) -> std::string;

}  // namespace weaver::story
