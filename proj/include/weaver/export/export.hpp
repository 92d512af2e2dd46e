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

#include "weaver/story/graph.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace weaver::exporting {

struct Segment {
    std::string text;
    std::string html;
    std::vector<std::string> fact_ids;
    friend auto operator==(const Segment&, const Segment&) -> bool = default;
};

struct Block {
    std::string text_node;
    std::vector<Segment> segments;     // one per paragraph
    std::vector<std::string> vis_ids;  // in-edge sources, sorted
    friend auto operator==(const Block&, const Block&) -> bool = default;
};

struct StoryOutline {
    std::string story_id;
    std::vector<Block> blocks;
    friend auto operator==(const StoryOutline&, const StoryOutline&) -> bool = default;
};

// Blocks in text-node creation order. Errors: no_text_nodes.
auto build_outline(const story::StoryGraph& graph) -> StoryOutline;

// Block i of the result is block permutation[i] of the input. Errors: invalid_permutation.
auto reorder(const StoryOutline& outline, const std::vector<std::size_t>& permutation) -> StoryOutline;

enum class Format { continuous, scrollytelling, stepper };

// "continuous", "scrolly", "stepper".
auto to_wire(Format format) -> std::string_view;
auto parse_format(std::string_view wire) -> std::optional<Format>;

struct ChartRef {
    std::string node_id;
    nlohmann::json spec;     // chart-spec JSON
    std::string dataset_id;
    std::string data_file;   // bundle-relative CSV path
    nlohmann::json callout;  // replay data, null without a callout
    std::vector<std::size_t> highlighted_rows;
    friend auto operator==(const ChartRef&, const ChartRef&) -> bool = default;
};

struct Section {
    std::string block_id;  // text-node id
    std::string html;
    std::vector<Segment> segments;
    std::vector<ChartRef> charts;
    std::string hash;  // sha256 of the section content
    friend auto operator==(const Section&, const Section&) -> bool = default;
};

struct StoryRender {
    Format format = Format::continuous;
    std::string story_id;
    std::string title;
    std::vector<Section> sections;
    friend auto operator==(const StoryRender&, const StoryRender&) -> bool = default;
};

auto section_hash(const Section& section) -> std::string;

// Errors: dangling_reference.
auto render(const StoryOutline& outline, Format format, const story::StoryGraph& graph) -> StoryRender;

auto render_to_json(const StoryRender& render) -> nlohmann::json;
auto render_from_json(const nlohmann::json& doc) -> StoryRender;

// story.json, index.html and data/<dataset>.csv, keyed by relative path.
struct Bundle {
    std::map<std::string, std::string> files;
};

auto make_bundle(const StoryRender& render, const story::StoryGraph& graph) -> Bundle;
// Reads the embedded render back out of index.html. Errors: malformed_bundle.
auto render_from_html(std::string_view html) -> StoryRender;
void write_bundle(const Bundle& bundle, const std::filesystem::path& directory);

}  // namespace weaver::exporting
