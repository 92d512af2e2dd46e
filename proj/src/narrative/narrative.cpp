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

#include "weaver/narrative/narrative.hpp"

#include "weaver/common/format.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace weaver::narrative {

namespace {

using callout::CalloutKind;

auto bound_text(const callout::Bound& bound) -> std::string {
    if (const auto* number = std::get_if<double>(&bound)) return format_number(*number);
    return std::get<std::string>(bound);
}

auto range_line(std::string_view axis, const std::optional<std::string>& column, const callout::AxisRange& brushed,
                const std::optional<chart::NumericRange>& full) -> std::string {
    std::string line = fmt::format("Brushed {} ({}) range: [{}, {}]", axis, column.value_or("?"),
                                   bound_text(brushed.low), bound_text(brushed.high));
    if (full) {
        line += fmt::format(" of full axis range [{}, {}]", format_number(full->min), format_number(full->max));
    } else {
        line += " of the full categorical axis";
    }
    return line;
}

auto join(const std::vector<std::string>& parts, std::string_view sep) -> std::string {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += sep;
        out += p;
    }
    return out;
}

auto chart_block(const chart::ChartSpec& spec, const chart::ChartMetadata& meta) -> std::string {
    std::string out = fmt::format("Chart type: {}", chart::display_name(meta.chart_type));
    if (!spec.title.empty()) out += fmt::format("\nTitle: {}", spec.title);
    std::vector<std::string> encodings;
    for (const auto& [channel, column] : meta.encodings) encodings.push_back(channel + " = " + column);
    out += "\nEncodings: " + join(encodings, ", ");
    if (meta.x_range) {
        out += fmt::format("\nX axis range: {} to {}", format_number(meta.x_range->min), format_number(meta.x_range->max));
    } else if (meta.x_domain_size > 0) {
        out += fmt::format("\nX axis categories: {}", meta.x_domain_size);
    }
    if (meta.y_range) {
        out += fmt::format("\nY axis range: {} to {}", format_number(meta.y_range->min), format_number(meta.y_range->max));
    }
    out += fmt::format("\nData points: {}", meta.row_count);
    return out;
}

auto interaction_block(const std::optional<callout::Callout>& c, const chart::ChartSpec& spec,
                       const chart::ChartMetadata& meta) -> std::string {
    if (!c) return "(no interaction)";
    std::string out = fmt::format("Callout: {}", callout::to_wire(c->kind));
    switch (c->kind) {
        case CalloutKind::brush2d:
        case CalloutKind::brush1d_x:
        case CalloutKind::timeframe_brush:
            if (c->x_range) out += "\n" + range_line("x", spec.x_attr, *c->x_range, meta.x_range);
            if (c->y_range) out += "\n" + range_line("y", spec.y_attr, *c->y_range, meta.y_range);
            if (c->x_pixels) {
                out += fmt::format("\nBrush coordinates x: {} to {}", format_number(c->x_pixels->from),
                                   format_number(c->x_pixels->to));
            }
            if (c->y_pixels) {
                out += fmt::format("\nBrush coordinates y: {} to {}", format_number(c->y_pixels->from),
                                   format_number(c->y_pixels->to));
            }
            break;
        case CalloutKind::discrete_click:
        case CalloutKind::temporal_point_click:
            out += fmt::format("\nClicked marks: {}", c->row_keys.size());
            break;
        case CalloutKind::legend_click:
        case CalloutKind::line_select:
            out += "\nSelected categories: " + join(c->categories, ", ");
            break;
        case CalloutKind::add_trendline:
            out += "\nA trendline was added over the selected points";
            break;
        case CalloutKind::segment_select: {
            std::vector<std::string> parts;
            for (const auto& s : c->segments) parts.push_back(s.segment + " in " + s.bar);
            out += "\nSelected segments: " + join(parts, ", ");
            break;
        }
        case CalloutKind::sunburst_click: {
            std::vector<std::string> parts;
            for (const auto& p : c->paths) parts.push_back(join(p, " > "));
            out += "\nSelected nodes: " + join(parts, ", ");
            break;
        }
        case CalloutKind::sunburst_chain:
            out += "\nChained path: " + join(c->path, " > ");
            break;
    }
    return out;
}

auto lead_in(const chart::ChartSpec& spec, const chart::ChartMetadata& meta) -> std::string {
    std::string subject = fmt::format("This {}", chart::display_name(meta.chart_type));
    if (!spec.title.empty()) subject += fmt::format(" (\"{}\")", spec.title);
    if (!spec.hierarchy_attrs.empty()) {
        return fmt::format("{} shows {} by {}.", subject, spec.y_attr.value_or("values"),
                           join(spec.hierarchy_attrs, " > "));
    }
    if (spec.x_attr && spec.y_attr) return fmt::format("{} shows {} against {}.", subject, *spec.y_attr, *spec.x_attr);
    return subject + " shows the selected data.";
}

auto stat_sentence(const facts::StatTable& table, std::size_t fact_count) -> std::string {
    if (table.rows.empty()) return fmt::format("These observations rest on {} data facts.", fact_count);
    const auto& row = table.rows.front();
    return fmt::format("Across the {} selected data points, {} has a mean of {}, a median of {} and a standard "
                       "deviation of {}.",
                       format_number(static_cast<double>(row.selection.count)), row.attribute,
                       format_number(row.selection.mean), format_number(row.selection.median),
                       format_number(row.selection.std));
}

auto sentence(const std::string& text) -> std::string {
    if (!text.empty() && (text.back() == '.' || text.back() == '!' || text.back() == '?')) return text;
    return text + ".";
}

void collapse_spaces(std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == ' ' && !out.empty() && out.back() == ' ') continue;
        out += ch;
    }
    while (!out.empty() && out.front() == ' ') out.erase(out.begin());
    s = std::move(out);
}

auto is_boundary(const std::string& text, std::size_t pos) -> bool {
    return pos >= text.size() || (static_cast<unsigned char>(text[pos]) & 0xC0) != 0x80;
}

}  // namespace

auto NarrativePrompt::render() const -> std::string {
    std::string facts_text;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        facts_text += fmt::format("{}. {}\n", i + 1, facts[i].template_text);
    }
    return fmt::format("## Visualization\n{}\n\n## Context\n{}\n\n## Interaction\n{}\n\n## Data Facts\n{}\n## Task\n{}\n",
                       chart_block, context_block, interaction_block, facts_text, instruction_block);
}

auto assemble_prompt(std::vector<facts::DataFact> facts, const chart::ChartSpec& spec,
                     const chart::ChartMetadata& metadata, const std::optional<callout::Callout>& interaction,
                     std::string_view preceding_text, const facts::StatTable& stat_table) -> NarrativePrompt {
    if (facts.empty()) fail("empty_facts", "select at least one data fact before generating");
    NarrativePrompt prompt;
    prompt.chart_block = chart_block(spec, metadata);
    if (preceding_text.empty()) {
        prompt.context_block = std::string(kStoryBegins);
    } else {
        std::size_t start = preceding_text.size() > kContextLimit ? preceding_text.size() - kContextLimit : 0;
        while (start < preceding_text.size() && (static_cast<unsigned char>(preceding_text[start]) & 0xC0) == 0x80) {
            ++start;
        }
        prompt.context_block = std::string(preceding_text.substr(start));
    }
    prompt.interaction_block = interaction_block(interaction, spec, metadata);
    prompt.instruction_block = std::string(kSynthesize);
    prompt.lead_in = lead_in(spec, metadata);
    prompt.stat_sentence = stat_sentence(stat_table, facts.size());
    prompt.facts = std::move(facts);
    return prompt;
}

auto to_wire(RevisionMode mode) -> std::string_view {
    switch (mode) {
        case RevisionMode::shorten: return "shorten";
        case RevisionMode::expand: return "expand";
        case RevisionMode::regenerate: return "regenerate";
        case RevisionMode::custom: return "custom";
    }
    return "";
}

auto parse_revision_mode(std::string_view wire) -> std::optional<RevisionMode> {
    for (auto mode : {RevisionMode::shorten, RevisionMode::expand, RevisionMode::regenerate, RevisionMode::custom}) {
        if (to_wire(mode) == wire) return mode;
    }
    return std::nullopt;
}

auto to_wire(Acceptance state) -> std::string_view {
    switch (state) {
        case Acceptance::pending: return "pending";
        case Acceptance::accepted: return "accepted";
        case Acceptance::rejected: return "rejected";
    }
    return "";
}

auto parse_acceptance(std::string_view wire) -> std::optional<Acceptance> {
    for (auto s : {Acceptance::pending, Acceptance::accepted, Acceptance::rejected}) {
        if (to_wire(s) == wire) return s;
    }
    return std::nullopt;
}

auto DeterministicGenerator::compose(const NarrativePrompt& prompt, int variant) -> std::string {
    std::string text = prompt.lead_in;
    const int n = static_cast<int>(std::size(kConnectors));
    for (std::size_t i = 0; i < prompt.facts.size(); ++i) {
        int slot = ((static_cast<int>(i) + variant) % n + n) % n;
        text += fmt::format(" {} {}", kConnectors[slot], sentence(prompt.facts[i].template_text));
    }
    return text;
}

auto DeterministicGenerator::revise(const GenerationRequest& request) -> std::string {
    const auto& rev = *request.revision;
    const std::string& text = request.current_text;
    std::string before = text.substr(0, rev.target_span.begin);
    std::string span = text.substr(rev.target_span.begin, rev.target_span.end - rev.target_span.begin);
    std::string after = text.substr(rev.target_span.end);
    switch (rev.mode) {
        case RevisionMode::shorten: {
            const auto& lead = request.prompt->lead_in;
            if (auto pos = span.find(lead); !lead.empty() && pos != std::string::npos) span.erase(pos, lead.size());
            for (auto connector : kConnectors) {
                std::string needle = std::string(connector) + " ";
                for (auto pos = span.find(needle); pos != std::string::npos; pos = span.find(needle, pos)) {
                    span.erase(pos, needle.size());
                }
            }
            bool leading_space = !span.empty() && span.front() == ' ';
            collapse_spaces(span);
            if (leading_space && !span.empty()) span.insert(span.begin(), ' ');
            if (!before.empty() && before.back() == ' ' && !span.empty() && span.front() == ' ') span.erase(0, 1);
            break;
        }
        case RevisionMode::expand: {
            // Insert after the sentence the span ends in.
            std::size_t at = rev.target_span.end;
            while (at < text.size() && !(at > 0 && text[at - 1] == '.' && text[at] == ' ')) ++at;
            span = text.substr(rev.target_span.begin, at - rev.target_span.begin) + " " + request.prompt->stat_sentence;
            after = text.substr(at);
            break;
        }
        case RevisionMode::regenerate: {
            std::string out;
            std::size_t pos = 0;
            while (pos < span.size()) {
                bool replaced = false;
                for (std::size_t c = 0; c < std::size(kConnectors); ++c) {
                    if (span.compare(pos, kConnectors[c].size(), kConnectors[c]) == 0) {
                        out += kConnectors[(c + 1) % std::size(kConnectors)];
                        pos += kConnectors[c].size();
                        replaced = true;
                        break;
                    }
                }
                if (!replaced) out += span[pos++];
            }
            span = std::move(out);
            break;
        }
        case RevisionMode::custom:
            break;
    }
    return before + span + after;
}

auto DeterministicGenerator::generate(const GenerationRequest& request) -> std::string {
    if (request.revision) return revise(request);
    return compose(*request.prompt, request.variant);
}

auto generate(const NarrativePrompt& prompt, TextGenerator& generator) -> NarrativeResult {
    if (prompt.facts.empty()) fail("empty_facts", "select at least one data fact before generating");
    GenerationRequest request{&prompt, prompt.render(), 0, std::nullopt, {}};
    std::string text;
    try {
        text = generator.generate(request);
    } catch (const GenerationError&) {
        throw;
    } catch (const std::exception& e) {
        throw GenerationError(e.what(), prompt);
    }
    return NarrativeResult{std::move(text), prompt.facts, generator.id(), Acceptance::pending, prompt, 0};
}

auto revision_prompt(const NarrativePrompt& prompt, const std::string& current_text, const RevisionRequest& request)
    -> std::string {
    std::string directive;
    switch (request.mode) {
        case RevisionMode::shorten: directive = "Shorten the marked passage. Keep every number exactly as written."; break;
        case RevisionMode::expand:
            directive = "Expand the marked passage using only the data facts above. Keep every number exactly as written.";
            break;
        case RevisionMode::regenerate:
            directive = "Rewrite the marked passage with different wording. Keep every number exactly as written.";
            break;
        case RevisionMode::custom: directive = request.custom_instruction; break;
    }
    std::string marked = current_text.substr(request.target_span.begin, request.target_span.end - request.target_span.begin);
    return fmt::format("{}\n## Current Narrative\n{}\n\n## Revision\nMarked passage: \"{}\"\n{}\nReturn the full "
                       "narrative with only the marked passage changed.\n",
                       prompt.render(), current_text, marked, directive);
}

auto revise(const NarrativeResult& result, const RevisionRequest& request, TextGenerator& generator)
    -> NarrativeResult {
    if (result.accepted == Acceptance::rejected) fail("not_accepted", "a rejected narrative cannot be revised");
    if (result.accepted != Acceptance::accepted) fail("not_accepted", "accept the narrative before revising it");
    const auto& span = request.target_span;
    if (span.begin > span.end || span.end > result.text.size() || !is_boundary(result.text, span.begin) ||
        !is_boundary(result.text, span.end)) {
        fail("span_out_of_bounds", "the revision span lies outside the narrative", "targetSpan");
    }
    bool has_instruction = request.custom_instruction.find_first_not_of(" \t\r\n") != std::string::npos;
    if (request.mode == RevisionMode::custom && !has_instruction) {
        fail("empty_instruction", "a custom revision needs an instruction", "customInstruction");
    }
    if (request.mode != RevisionMode::custom && !request.custom_instruction.empty()) {
        fail("unexpected_instruction", "only custom revisions take an instruction", "customInstruction");
    }
    int variant = result.variant + (request.mode == RevisionMode::regenerate ? 1 : 0);
    GenerationRequest gen{&result.prompt, revision_prompt(result.prompt, result.text, request), variant, request,
                          result.text};
    std::string text;
    try {
        text = generator.generate(gen);
    } catch (const GenerationError&) {
        throw;
    } catch (const std::exception& e) {
        throw GenerationError(e.what(), result.prompt);
    }
    return NarrativeResult{std::move(text), result.anchored_facts, generator.id(), Acceptance::pending, result.prompt,
                           variant};
}

auto prompt_to_json(const NarrativePrompt& prompt) -> nlohmann::json {
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& f : prompt.facts) facts.push_back(facts::fact_to_json(f));
    return {{"chartBlock", prompt.chart_block},
            {"contextBlock", prompt.context_block},
            {"interactionBlock", prompt.interaction_block},
            {"facts", std::move(facts)},
            {"instructionBlock", prompt.instruction_block},
            {"leadIn", prompt.lead_in},
            {"statSentence", prompt.stat_sentence}};
}

auto prompt_from_json(const nlohmann::json& doc) -> NarrativePrompt {
    try {
        NarrativePrompt p;
        p.chart_block = doc.at("chartBlock").get<std::string>();
        p.context_block = doc.at("contextBlock").get<std::string>();
        p.interaction_block = doc.at("interactionBlock").get<std::string>();
        for (const auto& f : doc.at("facts")) p.facts.push_back(facts::fact_from_json(f));
        p.instruction_block = doc.at("instructionBlock").get<std::string>();
        p.lead_in = doc.at("leadIn").get<std::string>();
        p.stat_sentence = doc.at("statSentence").get<std::string>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        fail("malformed_prompt", e.what());
    }
}

auto result_to_json(const NarrativeResult& result) -> nlohmann::json {
    nlohmann::json anchored = nlohmann::json::array();
    for (const auto& f : result.anchored_facts) anchored.push_back(facts::fact_to_json(f));
    return {{"text", result.text},
            {"anchoredFacts", std::move(anchored)},
            {"generatorId", result.generator_id},
            {"accepted", to_wire(result.accepted)},
            {"prompt", prompt_to_json(result.prompt)},
            {"variant", result.variant}};
}

auto result_from_json(const nlohmann::json& doc) -> NarrativeResult {
    try {
        NarrativeResult r;
        r.text = doc.at("text").get<std::string>();
        for (const auto& f : doc.at("anchoredFacts")) r.anchored_facts.push_back(facts::fact_from_json(f));
        r.generator_id = doc.at("generatorId").get<std::string>();
        auto state = parse_acceptance(doc.at("accepted").get<std::string>());
        if (!state) fail("malformed_narrative", "unknown acceptance state");
        r.accepted = *state;
        r.prompt = prompt_from_json(doc.at("prompt"));
        r.variant = doc.value("variant", 0);
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail("malformed_narrative", e.what());
    }
}

auto revision_to_json(const RevisionRequest& request) -> nlohmann::json {
    nlohmann::json doc = {{"targetSpan", {{"begin", request.target_span.begin}, {"end", request.target_span.end}}},
                          {"mode", to_wire(request.mode)}};
    if (!request.custom_instruction.empty()) doc["customInstruction"] = request.custom_instruction;
    return doc;
}

auto revision_from_json(const nlohmann::json& doc) -> RevisionRequest {
    try {
        if (!doc.is_object()) fail("malformed_revision", "revision request must be an object");
        for (const auto& [key, _] : doc.items()) {
            if (key != "targetSpan" && key != "mode" && key != "customInstruction")
                fail("unknown_field", "unknown revision field '" + key + "'", key);
        }
        RevisionRequest r;
        const auto& span = doc.at("targetSpan");
        r.target_span = {span.at("begin").get<std::size_t>(), span.at("end").get<std::size_t>()};
        auto mode = parse_revision_mode(doc.at("mode").get<std::string>());
        if (!mode) fail("malformed_revision", "unknown revision mode", "mode");
        r.mode = *mode;
        r.custom_instruction = doc.value("customInstruction", std::string{});
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail("malformed_revision", e.what());
    }
}

}  // namespace weaver::narrative
