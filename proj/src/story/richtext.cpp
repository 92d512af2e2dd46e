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

#include "weaver/story/richtext.hpp"

#include "weaver/common/error.hpp"

namespace weaver::story {

using nlohmann::json;

auto RichText::plain_text() const -> std::string {
    std::string out;
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
        if (p > 0) out += "\n\n";
        for (const auto& run : paragraphs[p].runs) out += run.text;
    }
    return out;
}

auto plain(std::string_view text) -> RichText {
    RichText rt;
    if (!text.empty()) rt.paragraphs.push_back(Paragraph{{Run{std::string(text), false, false, {}}}});
    return rt;
}

auto richtext_to_json(const RichText& text) -> json {
    json paragraphs = json::array();
    for (const auto& p : text.paragraphs) {
        json runs = json::array();
        for (const auto& r : p.runs) {
            json run{{"text", r.text}};
            if (r.bold) run["bold"] = true;
            if (r.italic) run["italic"] = true;
            if (!r.fact_ids.empty()) run["facts"] = r.fact_ids;
            runs.push_back(std::move(run));
        }
        paragraphs.push_back({{"runs", std::move(runs)}});
    }
    return {{"paragraphs", std::move(paragraphs)}};
}

auto richtext_from_json(const json& doc) -> RichText {
    try {
        RichText rt;
        for (const auto& p : doc.at("paragraphs")) {
            Paragraph para;
            for (const auto& r : p.at("runs")) {
                Run run{r.at("text").get<std::string>(), r.value("bold", false), r.value("italic", false),
                        r.value("facts", std::vector<std::string>{})};
                if (run.text.empty()) fail("malformed_richtext", "runs must carry text", "paragraphs");
                for (const auto& id : run.fact_ids) {
                    if (id.empty()) fail("malformed_richtext", "fact anchors must name a fact", "paragraphs");
                }
                para.runs.push_back(std::move(run));
            }
            rt.paragraphs.push_back(std::move(para));
        }
        return rt;
    } catch (const json::exception& e) {
        fail("malformed_richtext", e.what(), "paragraphs");
    }
}

namespace {

auto escape(std::string_view text) -> std::string {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

auto richtext_to_html(const RichText& text) -> std::string {
    std::string out;
    for (const auto& p : text.paragraphs) {
        out += "<p>";
        for (const auto& r : p.runs) {
            std::string inner = escape(r.text);
            if (r.italic) inner = "<em>" + inner + "</em>";
            if (r.bold) inner = "<strong>" + inner + "</strong>";
            if (!r.fact_ids.empty()) {
                std::string ids;
                for (const auto& id : r.fact_ids) ids += (ids.empty() ? "" : " ") + escape(id);
                inner = "<span data-facts=\"" + ids + "\">" + inner + "</span>";
            }
            out += inner;
        }
        out += "</p>\n";
    }
    return out;
}

}  // namespace weaver::story
