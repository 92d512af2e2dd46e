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

#include "weaver/export/export.hpp"

#include "weaver/common/error.hpp"
#include "weaver/common/hash.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>

namespace weaver::exporting {

namespace {

using nlohmann::json;

constexpr std::string_view kScriptOpen = "<script type=\"application/json\" id=\"weaver-story\">";
constexpr std::string_view kScriptClose = "</script>";

auto escape_html(std::string_view text) -> std::string {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += ch;
        }
    }
    return out;
}

// Keeps "</script>" out of embedded JSON; "\/" is a valid JSON escape.
auto embed_json(const json& doc) -> std::string {
    auto text = doc.dump();
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '<' && i + 1 < text.size() && text[i + 1] == '/') {
            out += "<\\/";
            ++i;
        } else {
            out += text[i];
        }
    }
    return out;
}

auto segment_json(const Segment& s) -> json { return {{"text", s.text}, {"html", s.html}, {"factIds", s.fact_ids}}; }

auto segment_from(const json& j) -> Segment {
    return Segment{j.at("text").get<std::string>(), j.at("html").get<std::string>(),
                   j.at("factIds").get<std::vector<std::string>>()};
}

auto chart_json(const ChartRef& c) -> json {
    return {{"nodeId", c.node_id},   {"spec", c.spec},       {"datasetId", c.dataset_id},
            {"dataFile", c.data_file}, {"callout", c.callout}, {"highlightedRows", c.highlighted_rows}};
}

auto chart_from(const json& j) -> ChartRef {
    return ChartRef{j.at("nodeId").get<std::string>(),   j.at("spec"),
                    j.at("datasetId").get<std::string>(), j.at("dataFile").get<std::string>(),
                    j.at("callout"),                      j.at("highlightedRows").get<std::vector<std::size_t>>()};
}

// Content without the hash; the hash covers exactly this.
auto section_content(const Section& s) -> json {
    json segments = json::array();
    for (const auto& seg : s.segments) segments.push_back(segment_json(seg));
    json charts = json::array();
    for (const auto& c : s.charts) charts.push_back(chart_json(c));
    return {{"blockId", s.block_id}, {"html", s.html}, {"segments", std::move(segments)}, {"charts", std::move(charts)}};
}

auto data_file(const std::string& dataset_id) -> std::string {
    std::string safe;
    for (char ch : dataset_id) safe += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ? ch : '_';
    return "data/" + safe + ".csv";
}

}  // namespace

auto build_outline(const story::StoryGraph& graph) -> StoryOutline {
    StoryOutline outline{graph.id(), {}};
    for (const auto& id : graph.node_order()) {
        const auto& n = graph.node(id);
        if (n.kind != story::NodeKind::text) continue;
        Block block{id, {}, {}};
        for (const auto& p : n.content.paragraphs) {
            Segment seg;
            std::set<std::string> seen;
            for (const auto& r : p.runs) {
                seg.text += r.text;
                for (const auto& f : r.fact_ids) {
                    if (seen.insert(f).second) seg.fact_ids.push_back(f);
                }
            }
            seg.html = story::richtext_to_html(story::RichText{{p}});
            block.segments.push_back(std::move(seg));
        }
        for (const auto& [from, to] : graph.edges()) {
            if (to == id) block.vis_ids.push_back(from);
        }
        outline.blocks.push_back(std::move(block));
    }
    if (outline.blocks.empty()) fail("no_text_nodes", "the story has no text-nodes to export");
    return outline;
}

auto reorder(const StoryOutline& outline, const std::vector<std::size_t>& permutation) -> StoryOutline {
    const auto n = outline.blocks.size();
    if (permutation.size() != n) {
        fail("invalid_permutation", fmt::format("permutation has {} entries for {} blocks", permutation.size(), n),
             "permutation");
    }
    std::vector<bool> used(n, false);
    StoryOutline out{outline.story_id, {}};
    for (auto index : permutation) {
        if (index >= n || used[index]) fail("invalid_permutation", "permutation must use every block exactly once", "permutation");
        used[index] = true;
        out.blocks.push_back(outline.blocks[index]);
    }
    return out;
}

auto to_wire(Format format) -> std::string_view {
    switch (format) {
        case Format::continuous: return "continuous";
        case Format::scrollytelling: return "scrolly";
        case Format::stepper: return "stepper";
    }
    return "continuous";
}

auto parse_format(std::string_view wire) -> std::optional<Format> {
    for (auto f : {Format::continuous, Format::scrollytelling, Format::stepper}) {
        if (to_wire(f) == wire) return f;
    }
    return std::nullopt;
}

auto section_hash(const Section& section) -> std::string { return sha256_hex(section_content(section).dump()); }

auto render(const StoryOutline& outline, Format format, const story::StoryGraph& graph) -> StoryRender {
    StoryRender out{format, outline.story_id, graph.title(), {}};
    for (const auto& block : outline.blocks) {
        auto it = graph.nodes().find(block.text_node);
        if (it == graph.nodes().end() || it->second.kind != story::NodeKind::text) {
            fail("dangling_reference", "outline block references missing text-node '" + block.text_node + "'");
        }
        Section s;
        s.block_id = block.text_node;
        s.segments = block.segments;
        for (const auto& seg : block.segments) s.html += seg.html;
        for (const auto& vis : block.vis_ids) {
            auto v = graph.nodes().find(vis);
            if (v == graph.nodes().end() || v->second.kind != story::NodeKind::vis) {
                fail("dangling_reference", "outline block references missing vis-node '" + vis + "'");
            }
            const auto& n = v->second;
            ChartRef c;
            c.node_id = vis;
            c.spec = n.spec ? chart::serialize_spec(*n.spec) : json(nullptr);
            c.dataset_id = n.dataset_id;
            c.data_file = data_file(n.dataset_id);
            c.callout = n.package ? callout::callout_to_json(n.package->interaction) : json(nullptr);
            if (n.package) c.highlighted_rows = n.package->selection;
            s.charts.push_back(std::move(c));
        }
        s.hash = section_hash(s);
        out.sections.push_back(std::move(s));
    }
    return out;
}

auto render_to_json(const StoryRender& render) -> json {
    json sections = json::array();
    for (const auto& s : render.sections) {
        auto doc = section_content(s);
        doc["hash"] = s.hash;
        sections.push_back(std::move(doc));
    }
    return {{"storyId", render.story_id},
            {"title", render.title},
            {"navigation", {{"mode", to_wire(render.format)}}},
            {"sections", std::move(sections)}};
}

auto render_from_json(const json& doc) -> StoryRender {
    try {
        StoryRender r;
        auto mode = parse_format(doc.at("navigation").at("mode").get<std::string>());
        if (!mode) fail("malformed_bundle", "unknown navigation mode");
        r.format = *mode;
        r.story_id = doc.at("storyId").get<std::string>();
        r.title = doc.at("title").get<std::string>();
        for (const auto& s : doc.at("sections")) {
            Section sec;
            sec.block_id = s.at("blockId").get<std::string>();
            sec.html = s.at("html").get<std::string>();
            for (const auto& seg : s.at("segments")) sec.segments.push_back(segment_from(seg));
            for (const auto& c : s.at("charts")) sec.charts.push_back(chart_from(c));
            sec.hash = s.at("hash").get<std::string>();
            r.sections.push_back(std::move(sec));
        }
        return r;
    } catch (const json::exception& e) {
        fail("malformed_bundle", e.what());
    }
}

auto make_bundle(const StoryRender& render, const story::StoryGraph& graph) -> Bundle {
    Bundle b;
    auto doc = render_to_json(render);
    b.files["story.json"] = doc.dump(2) + "\n";
    std::string body;
    for (const auto& s : render.sections) {
        body += fmt::format("<section class=\"block\" data-block=\"{}\" data-hash=\"{}\">\n<div class=\"narrative\">\n{}</div>\n",
                            escape_html(s.block_id), s.hash, s.html);
        for (const auto& c : s.charts) {
            body += fmt::format("<figure class=\"chart\" data-node=\"{}\" data-file=\"{}\"></figure>\n",
                                escape_html(c.node_id), escape_html(c.data_file));
            if (!b.files.count(c.data_file)) {
                b.files[c.data_file] = tabular::write_csv(*graph.dataset(c.dataset_id));
            }
        }
        body += "</section>\n";
    }
    b.files["index.html"] = fmt::format(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n</head>\n"
        "<body data-mode=\"{}\">\n<main>\n{}</main>\n{}{}{}\n</body>\n</html>\n",
        escape_html(render.title.empty() ? render.story_id : render.title), to_wire(render.format), body, kScriptOpen,
        embed_json(doc), kScriptClose);
    return b;
}

auto render_from_html(std::string_view html) -> StoryRender {
    auto open = html.find(kScriptOpen);
    if (open == std::string_view::npos) fail("malformed_bundle", "index.html carries no embedded story");
    auto start = open + kScriptOpen.size();
    auto close = html.find(kScriptClose, start);
    if (close == std::string_view::npos) fail("malformed_bundle", "unterminated story script");
    auto doc = json::parse(html.substr(start, close - start), nullptr, false);
    if (doc.is_discarded()) fail("malformed_bundle", "embedded story is not JSON");
    return render_from_json(doc);
}

void write_bundle(const Bundle& bundle, const std::filesystem::path& directory) {
    for (const auto& [path, content] : bundle.files) {
        auto target = directory / path;
        std::filesystem::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        if (!out) throw Error(ErrorKind::internal, "write_failed", "cannot write " + target.string());
        out << content;
    }
}

}  // namespace weaver::exporting
