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

#include "weaver/callout/callout.hpp"
#include "weaver/common/error.hpp"
#include "weaver/facts/fact.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace weaver::narrative {

inline constexpr std::size_t kContextLimit = 2000;
inline constexpr std::string_view kStoryBegins = "(story begins here)";
inline constexpr std::string_view kSynthesize = "Synthesize information and write a narrative based on the data facts.";

struct NarrativePrompt {
    std::string chart_block;
    std::string context_block;
    std::string interaction_block;
    std::vector<facts::DataFact> facts;  // facts block source, in cart order
    std::string instruction_block;
    // Deterministic backend inputs: the lead-in and the expansion sentence.
    std::string lead_in;
    std::string stat_sentence;

    // Plain text with "## Visualization", "## Context", "## Interaction",
    // "## Data Facts" and "## Task" sections.
    [[nodiscard]] auto render() const -> std::string;
    friend auto operator==(const NarrativePrompt&, const NarrativePrompt&) -> bool = default;
};

// Errors: empty_facts.
auto assemble_prompt(std::vector<facts::DataFact> facts, const chart::ChartSpec& spec,
                     const chart::ChartMetadata& metadata, const std::optional<callout::Callout>& interaction,
                     std::string_view preceding_text, const facts::StatTable& stat_table = {}) -> NarrativePrompt;

enum class RevisionMode { shorten, expand, regenerate, custom };

auto to_wire(RevisionMode mode) -> std::string_view;
auto parse_revision_mode(std::string_view wire) -> std::optional<RevisionMode>;

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive
    friend auto operator==(const Span&, const Span&) -> bool = default;
};

struct RevisionRequest {
    Span target_span;
    RevisionMode mode = RevisionMode::regenerate;
    std::string custom_instruction;
};

struct GenerationRequest {
    const NarrativePrompt* prompt = nullptr;
    std::string prompt_text;  // rendered prompt, plus the revision block for revisions
    int variant = 0;
    // Revisions only.
    std::optional<RevisionRequest> revision;
    std::string current_text;
};

class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    [[nodiscard]] virtual auto id() const -> std::string = 0;
    // Errors: generator failures as Error{upstream}.
    virtual auto generate(const GenerationRequest& request) -> std::string = 0;
};

// Offline backend: lead-in, then each fact verbatim behind a rotating connector.
class DeterministicGenerator final : public TextGenerator {
public:
    [[nodiscard]] auto id() const -> std::string override { return "deterministic"; }
    auto generate(const GenerationRequest& request) -> std::string override;

    static auto compose(const NarrativePrompt& prompt, int variant) -> std::string;
    static auto revise(const GenerationRequest& request) -> std::string;
};

inline constexpr std::string_view kConnectors[] = {"Notably,", "In addition,", "Overall,"};

enum class Acceptance { pending, accepted, rejected };

auto to_wire(Acceptance state) -> std::string_view;
auto parse_acceptance(std::string_view wire) -> std::optional<Acceptance>;

struct NarrativeResult {
    std::string text;
    std::vector<facts::DataFact> anchored_facts;
    std::string generator_id;
    Acceptance accepted = Acceptance::pending;
    NarrativePrompt prompt;
    int variant = 0;

    friend auto operator==(const NarrativeResult&, const NarrativeResult&) -> bool = default;
};

// Generation failure carrying the prompt so the caller can retry.
class GenerationError : public Error {
public:
    GenerationError(const std::string& message, NarrativePrompt prompt)
        : Error(ErrorKind::upstream, "generator_failed", message), prompt_(std::move(prompt)) {}
    [[nodiscard]] auto prompt() const -> const NarrativePrompt& { return prompt_; }

private:
    NarrativePrompt prompt_;
};

auto generate(const NarrativePrompt& prompt, TextGenerator& generator) -> NarrativeResult;

// Errors: not_accepted, span_out_of_bounds, empty_instruction, unexpected_instruction.
auto revise(const NarrativeResult& result, const RevisionRequest& request, TextGenerator& generator)
    -> NarrativeResult;

// Revision prompt: the original prompt, the current text and the mode directive.
auto revision_prompt(const NarrativePrompt& prompt, const std::string& current_text, const RevisionRequest& request)
    -> std::string;

auto prompt_to_json(const NarrativePrompt& prompt) -> nlohmann::json;
auto prompt_from_json(const nlohmann::json& doc) -> NarrativePrompt;
auto result_to_json(const NarrativeResult& result) -> nlohmann::json;
auto result_from_json(const nlohmann::json& doc) -> NarrativeResult;
// {targetSpan: {begin, end}, mode, customInstruction?}. Errors: malformed_revision, unknown_field.
auto revision_to_json(const RevisionRequest& request) -> nlohmann::json;
auto revision_from_json(const nlohmann::json& doc) -> RevisionRequest;

}  // namespace weaver::narrative
