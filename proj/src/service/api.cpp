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

#include "weaver/service/api.hpp"

#include "weaver/export/export.hpp"
#include "weaver/service/remote.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace weaver::service {

namespace {

using nlohmann::json;
using story::StoryGraph;

using Params = std::map<std::string, std::string>;

// "/stories/{sid}/nodes/{nid}" against a concrete path.
auto match(std::string_view pattern, std::string_view path, Params& params) -> bool {
    params.clear();
    auto next = [](std::string_view& s) {
        if (!s.empty() && s.front() == '/') s.remove_prefix(1);
        const auto slash = s.find('/');
        auto head = s.substr(0, slash);
        s = slash == std::string_view::npos ? std::string_view{} : s.substr(slash);
        return head;
    };
    while (!pattern.empty() || !path.empty()) {
        if (pattern.empty() || path.empty()) return false;
        const auto want = next(pattern);
        const auto have = next(path);
        if (have.empty()) return false;
        if (want.size() > 2 && want.front() == '{' && want.back() == '}') {
            params[std::string(want.substr(1, want.size() - 2))] = std::string(have);
        } else if (want != have) {
            return false;
        }
    }
    return true;
}

auto parse_body(const Request& request) -> json {
    if (request.body.empty()) return json::object();
    json doc = json::parse(request.body, nullptr, false);
    if (doc.is_discarded()) fail("malformed_json", "request body is not valid JSON");
    return doc;
}

auto split_list(const std::string& text) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

auto query(const Request& request, const std::string& key) -> std::optional<std::string> {
    auto it = request.query.find(key);
    if (it == request.query.end()) return std::nullopt;
    return it->second;
}

auto rect_from_json(const json& doc, story::Rect fallback = {}) -> story::Rect {
    if (doc.is_null()) return fallback;
    if (!doc.is_object()) fail("invalid_rect", "rect must be an object", "rect");
    try {
        return {doc.value("x", fallback.x), doc.value("y", fallback.y), doc.value("width", fallback.width),
                doc.value("height", fallback.height)};
    } catch (const json::exception& e) {
        fail("invalid_rect", e.what(), "rect");
    }
}

auto rect_to_json(const story::Rect& r) -> json {
    return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

auto events_json(const std::vector<story::Event>& events) -> json {
    json out = json::array();
    for (const auto& e : events) out.push_back({{"kind", e.kind}, {"node", e.node}, {"detail", e.detail}});
    return out;
}

auto streamed_json(const story::Node& node) -> json {
    json out = json::array();
    for (const auto& g : node.text_cart.streamed) out.push_back(story::stream_group_to_json(g));
    return out;
}

auto node_view(const StoryGraph& graph, const std::string& id) -> json {
    const auto& node = graph.node(id);
    json doc = story::node_to_json(node);
    if (node.kind == story::NodeKind::text) doc["streamed"] = streamed_json(node);
    doc["rect"] = rect_to_json(graph.layout().at(id));
    return doc;
}

using CartSnapshot = std::map<std::string, json>;

auto snapshot(const StoryGraph& graph) -> CartSnapshot {
    CartSnapshot out;
    for (const auto& [id, node] : graph.nodes()) {
        if (node.kind == story::NodeKind::text) out[id] = streamed_json(node);
    }
    return out;
}

// Text-node carts that differ between two snapshots; removed nodes map to null.
auto cart_delta(const CartSnapshot& before, const StoryGraph& graph) -> json {
    json delta = json::object();
    const auto after = snapshot(graph);
    for (const auto& [id, cart] : after) {
        auto it = before.find(id);
        if (it == before.end() || it->second != cart) delta[id] = cart;
    }
    for (const auto& [id, _] : before) {
        if (!after.contains(id)) delta[id] = nullptr;
    }
    return delta;
}

auto json_response(const json& body, int status = 200) -> Response {
    return {status, body.dump(), "application/json"};
}

auto valid_story_id(std::string_view id) -> bool {
    return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '_';
    });
}

// Preceding story text: earlier text-nodes in creation order, then this node's
// own content without the paragraph holding its current narrative.
auto preceding_text(const StoryGraph& graph, const std::string& text_id) -> std::string {
    std::vector<std::string> parts;
    for (const auto& id : graph.node_order()) {
        const auto& node = graph.node(id);
        if (node.kind != story::NodeKind::text) continue;
        if (id == text_id) {
            story::RichText own = node.content;
            if (node.narrative_paragraph && *node.narrative_paragraph < own.paragraphs.size())
                own.paragraphs.erase(own.paragraphs.begin() + static_cast<std::ptrdiff_t>(*node.narrative_paragraph));
            if (!own.empty()) parts.push_back(own.plain_text());
            break;
        }
        if (!node.content.empty()) parts.push_back(node.content.plain_text());
    }
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "\n\n";
        out += p;
    }
    return out;
}

auto build_prompt(const StoryGraph& graph, const std::string& text_id) -> narrative::NarrativePrompt {
    const auto& node = graph.node(text_id);
    if (node.kind != story::NodeKind::text) fail("wrong_node_kind", fmt::format("{} is not a text node", text_id));
    auto facts = graph.cart_facts(text_id);
    if (facts.empty()) fail("empty_facts", "the node's cart holds no facts; select facts on a connected chart first");
    const auto& source = graph.node(node.text_cart.streamed.front().source);
    if (!source.package || !source.spec) fail("no_chart", fmt::format("{} has no callout", source.id));
    return narrative::assemble_prompt(std::move(facts), *source.spec, source.package->chart_metadata,
                                      source.package->interaction, preceding_text(graph, text_id),
                                      source.vis_cart.hierarchy.stat_table);
}

auto recommendation_datasets(const StoryGraph& graph, const std::string& text_id) -> std::vector<recommender::DatasetPtr> {
    std::vector<recommender::DatasetPtr> out;
    for (const auto& [from, to] : graph.edges()) {
        if (to == text_id) out.push_back(graph.dataset(graph.node(from).dataset_id));
    }
    if (out.empty()) {
        for (const auto& [id, ds] : graph.datasets()) out.push_back(ds);
    }
    return out;
}

}  // namespace

auto status_of(ErrorKind kind) -> int {
    switch (kind) {
        case ErrorKind::invalid: return 400;
        case ErrorKind::not_found: return 404;
        case ErrorKind::conflict: return 409;
        case ErrorKind::stale: return 409;
        case ErrorKind::upstream: return 502;
        case ErrorKind::not_implemented: return 501;
        case ErrorKind::internal: return 500;
    }
    return 500;
}

auto error_body(const Error& error) -> json {
    json e = {{"code", error.code()}, {"message", error.what()}};
    if (!error.field().empty()) e["field"] = error.field();
    json body = {{"error", std::move(e)}};
    if (const auto* gen = dynamic_cast<const narrative::GenerationError*>(&error))
        body["prompt"] = narrative::prompt_to_json(gen->prompt());
    return body;
}

Api::Api(ServiceConfig config) : Api(std::move(config), nullptr, nullptr) {}

Api::Api(ServiceConfig config, GeneratorFactory generators, RecommenderFactory recommenders)
    : config_(std::move(config)), generators_(std::move(generators)), recommenders_(std::move(recommenders)) {
    config_.validate();
    const bool remote = config_.backend == Backend::remote;
    auto client = [cfg = config_] {
        return ChatClient(cfg.remote_url, read_key_file(cfg.remote_key_file), cfg.remote_model, cfg.timeout_seconds);
    };
    if (!generators_) {
        generators_ = [remote, client]() -> std::unique_ptr<narrative::TextGenerator> {
            if (remote) return std::make_unique<RemoteGenerator>(client());
            return std::make_unique<narrative::DeterministicGenerator>();
        };
    }
    if (!recommenders_) {
        recommenders_ = [remote, client](const recommender::DatasetLookup& lookup)
            -> std::unique_ptr<recommender::RecommenderBackend> {
            if (remote) return std::make_unique<RemoteRecommender>(client());
            return std::make_unique<recommender::HeuristicBackend>(lookup);
        };
    }
    if (!config_.store_dir.empty()) load_store();
}

auto Api::entry(const std::string& story_id) -> std::shared_ptr<Entry> {
    std::lock_guard lock(store_mutex_);
    auto it = stories_.find(story_id);
    if (it == stories_.end()) fail_not_found("story_not_found", fmt::format("no story '{}'", story_id));
    return it->second;
}

auto Api::create_story(std::string title) -> std::shared_ptr<Entry> {
    std::lock_guard lock(store_mutex_);
    std::string id;
    do {
        id = fmt::format("s{}", ++story_counter_);
    } while (stories_.contains(id));
    auto e = std::make_shared<Entry>(StoryGraph(id, std::move(title)));
    stories_.emplace(id, e);
    return e;
}

void Api::persist(const Entry& e) const {
    if (config_.store_dir.empty()) return;
    namespace fs = std::filesystem;
    const fs::path dir(config_.store_dir);
    fs::create_directories(dir);
    const auto target = dir / (e.graph.id() + ".json");
    const auto temp = dir / (e.graph.id() + ".json.tmp");
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << story::save_story(e.graph).dump();
        if (!out) throw Error(ErrorKind::internal, "store_failed", fmt::format("cannot write {}", temp.string()));
    }
    fs::rename(temp, target);
}

void Api::load_store() {
    namespace fs = std::filesystem;
    const fs::path dir(config_.store_dir);
    if (!fs::exists(dir)) return;
    for (const auto& item : fs::directory_iterator(dir)) {
        if (item.path().extension() != ".json") continue;
        std::ifstream in(item.path(), std::ios::binary);
        const json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) {
            fmt::print(stderr, "weaver: skipping unreadable story file {}\n", item.path().string());
            continue;
        }
        try {
            auto graph = story::load_story(doc);
            const auto id = graph.id();
            if (id.size() > 1 && id[0] == 's' &&
                std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; }))
                story_counter_ = std::max(story_counter_, std::stoi(id.substr(1)));
            stories_.emplace(id, std::make_shared<Entry>(std::move(graph)));
        } catch (const Error& e) {
            fmt::print(stderr, "weaver: skipping story file {}: {}\n", item.path().string(), e.what());
        }
    }
}

auto Api::handle(const Request& request) -> Response {
    try {
        return route(request);
    } catch (const Error& e) {
        return json_response(error_body(e), status_of(e.kind()));
    } catch (const json::exception& e) {
        return json_response(error_body(Error(ErrorKind::invalid, "malformed_json", e.what())), 400);
    } catch (const std::exception& e) {
        return json_response(error_body(Error(ErrorKind::internal, "internal", e.what())), 500);
    }
}

auto Api::route(const Request& request) -> Response {
    Params p;
    const auto& m = request.method;
    const auto& path = request.path;
    auto is = [&](std::string_view method, std::string_view pattern) { return m == method && match(pattern, path, p); };

    if (is("GET", "/health")) {
        return json_response({{"status", "ok"},
                              {"generator", config_.backend == Backend::remote ? "remote" : "deterministic"}});
    }
    if (is("GET", "/openapi.json")) return json_response(openapi_document());

    // Stories.
    if (is("GET", "/stories")) {
        json list = json::array();
        std::lock_guard lock(store_mutex_);
        for (const auto& [id, e] : stories_) {
            std::lock_guard inner(e->mutex);
            list.push_back({{"id", id}, {"title", e->graph.title()}});
        }
        return json_response({{"stories", std::move(list)}});
    }
    if (is("POST", "/stories")) {
        const json body = parse_body(request);
        if (body.contains("version")) {
            auto graph = story::load_story(body);
            if (!valid_story_id(graph.id())) fail("invalid_story_id", "story ids use letters, digits, - and _", "story.id");
            std::lock_guard lock(store_mutex_);
            if (stories_.contains(graph.id()))
                throw Error(ErrorKind::conflict, "story_exists", fmt::format("story '{}' exists", graph.id()));
            auto e = std::make_shared<Entry>(std::move(graph));
            stories_.emplace(e->graph.id(), e);
            std::lock_guard inner(e->mutex);
            persist(*e);
            return json_response(story::save_story(e->graph), 201);
        }
        auto e = create_story(body.value("title", std::string{}));
        std::lock_guard lock(e->mutex);
        persist(*e);
        return json_response(story::save_story(e->graph), 201);
    }
    if (is("GET", "/stories/{sid}")) {
        auto e = entry(p["sid"]);
        std::lock_guard lock(e->mutex);
        return json_response(story::save_story(e->graph));
    }
    if (is("PUT", "/stories/{sid}")) {
        auto e = entry(p["sid"]);
        auto graph = story::load_story(parse_body(request));
        if (graph.id() != p["sid"])
            fail("story_id_mismatch", fmt::format("container holds story '{}'", graph.id()), "story.id");
        std::lock_guard lock(e->mutex);
        e->graph = std::move(graph);
        e->tickets.clear();
        persist(*e);
        return json_response(story::save_story(e->graph));
    }
    if (is("DELETE", "/stories/{sid}")) {
        auto e = entry(p["sid"]);
        std::lock_guard lock(store_mutex_);
        stories_.erase(p["sid"]);
        if (!config_.store_dir.empty())
            std::filesystem::remove(std::filesystem::path(config_.store_dir) / (p["sid"] + ".json"));
        return json_response({{"deleted", p["sid"]}});
    }

    // Everything below is scoped to one story and serialized on its mutex,
    // except the generator and recommender calls.
    Params scoped;
    if (!match("/stories/{sid}", path.substr(0, std::min(path.size(), path.find('/', path.find('/', 1) + 1))), scoped))
        fail_not_found("no_route", fmt::format("no route for {} {}", m, path));
    auto e = entry(scoped["sid"]);

    if (is("GET", "/stories/{sid}/export")) {
        auto format = exporting::Format::continuous;
        if (auto f = query(request, "format")) {
            auto parsed = exporting::parse_format(*f);
            if (!parsed) fail("unknown_format", fmt::format("unknown export format '{}'", *f), "format");
            format = *parsed;
        }
        std::lock_guard lock(e->mutex);
        auto outline = exporting::build_outline(e->graph);
        if (auto order = query(request, "order")) {
            std::vector<std::size_t> perm;
            for (const auto& item : split_list(*order)) {
                const auto n = tabular::parse_number(item);
                if (!n || *n < 0 || *n != static_cast<double>(static_cast<std::size_t>(*n)))
                    fail("invalid_permutation", fmt::format("bad order entry '{}'", item), "order");
                perm.push_back(static_cast<std::size_t>(*n));
            }
            outline = exporting::reorder(outline, perm);
        }
        const auto rendered = exporting::render(outline, format, e->graph);
        const auto bundle = exporting::make_bundle(rendered, e->graph);
        return json_response({{"render", exporting::render_to_json(rendered)}, {"files", bundle.files}});
    }

    // Datasets.
    if (is("POST", "/stories/{sid}/datasets")) {
        tabular::LoadOptions options;
        if (auto id = query(request, "id")) options.id = *id;
        if (auto types = query(request, "types")) {
            for (const auto& item : split_list(*types)) {
                const auto colon = item.find(':');
                const auto type = colon == std::string::npos ? std::nullopt : tabular::parse_attr_type(item.substr(colon + 1));
                if (!type) fail("invalid_type_override", fmt::format("bad type override '{}'", item), "types");
                options.forced_types[item.substr(0, colon)] = *type;
            }
        }
        auto ds = std::make_shared<const tabular::Dataset>(
            tabular::load_dataset(request.body, query(request, "name").value_or("dataset"), options));
        std::lock_guard lock(e->mutex);
        e->graph.add_dataset(ds);
        persist(*e);
        return json_response(recommender::summary_to_json(recommender::summarize_dataset(*e->graph.dataset(ds->id()))),
                             201);
    }
    if (is("GET", "/stories/{sid}/datasets")) {
        std::lock_guard lock(e->mutex);
        json list = json::array();
        for (const auto& [id, ds] : e->graph.datasets())
            list.push_back(recommender::summary_to_json(recommender::summarize_dataset(*ds)));
        return json_response({{"datasets", std::move(list)}});
    }
    if (is("GET", "/stories/{sid}/datasets/{did}/summary")) {
        std::lock_guard lock(e->mutex);
        return json_response(recommender::summary_to_json(recommender::summarize_dataset(*e->graph.dataset(p["did"]))));
    }

    // Nodes.
    if (is("GET", "/stories/{sid}/nodes")) {
        std::lock_guard lock(e->mutex);
        json list = json::array();
        for (const auto& id : e->graph.node_order()) list.push_back(node_view(e->graph, id));
        return json_response({{"nodes", std::move(list)}});
    }
    if (is("POST", "/stories/{sid}/nodes")) {
        const json body = parse_body(request);
        const auto kind = body.value("kind", std::string{});
        const auto rect = rect_from_json(body.value("rect", json(nullptr)));
        std::lock_guard lock(e->mutex);
        const auto before = snapshot(e->graph);
        std::string id;
        if (kind == "vis") {
            std::optional<chart::ChartSpec> spec;
            if (body.contains("spec") && !body["spec"].is_null()) spec = chart::parse_spec(body["spec"]);
            std::string dataset_id = body.value("datasetId", std::string{});
            if (dataset_id.empty() && spec) dataset_id = spec->dataset_id;
            if (dataset_id.empty()) fail("missing_dataset", "vis nodes need a datasetId", "datasetId");
            id = e->graph.add_vis_node(std::move(spec), dataset_id, rect);
        } else if (kind == "text") {
            story::RichText content;
            if (body.contains("content") && !body["content"].is_null())
                content = story::richtext_from_json(body["content"]);
            id = e->graph.add_text_node(std::move(content), rect);
        } else {
            fail("unknown_node_kind", "kind must be \"vis\" or \"text\"", "kind");
        }
        persist(*e);
        return json_response({{"nodeId", id}, {"node", node_view(e->graph, id)}, {"carts", cart_delta(before, e->graph)}},
                             201);
    }
    if (is("GET", "/stories/{sid}/nodes/{nid}")) {
        std::lock_guard lock(e->mutex);
        return json_response(node_view(e->graph, p["nid"]));
    }
    if (is("DELETE", "/stories/{sid}/nodes/{nid}")) {
        std::lock_guard lock(e->mutex);
        const auto before = snapshot(e->graph);
        const auto mark = e->graph.events().size();
        e->graph.remove_node(p["nid"]);
        e->tickets.erase(p["nid"]);
        persist(*e);
        const std::vector<story::Event> events(e->graph.events().begin() + static_cast<std::ptrdiff_t>(mark),
                                               e->graph.events().end());
        return json_response({{"events", events_json(events)}, {"carts", cart_delta(before, e->graph)}});
    }
    if (is("POST", "/stories/{sid}/nodes/{nid}/duplicate")) {
        std::lock_guard lock(e->mutex);
        const auto before = snapshot(e->graph);
        const auto id = e->graph.duplicate_node(p["nid"]);
        persist(*e);
        return json_response({{"nodeId", id}, {"node", node_view(e->graph, id)}, {"carts", cart_delta(before, e->graph)}},
                             201);
    }
    if (is("PUT", "/stories/{sid}/nodes/{nid}/layout")) {
        const json body = parse_body(request);
        std::lock_guard lock(e->mutex);
        (void)e->graph.node(p["nid"]);
        e->graph.move_resize(p["nid"], rect_from_json(body, e->graph.layout().at(p["nid"])));
        persist(*e);
        return json_response(node_view(e->graph, p["nid"]));
    }
    if (is("PUT", "/stories/{sid}/nodes/{nid}/content")) {
        auto content = story::richtext_from_json(parse_body(request));
        std::lock_guard lock(e->mutex);
        e->graph.set_text(p["nid"], std::move(content));
        persist(*e);
        return json_response(node_view(e->graph, p["nid"]));
    }

    // Edges.
    if (is("POST", "/stories/{sid}/edges") || is("DELETE", "/stories/{sid}/edges")) {
        std::string from;
        std::string to;
        if (m == "POST") {
            const json body = parse_body(request);
            from = body.value("from", std::string{});
            to = body.value("to", std::string{});
        } else {
            from = query(request, "from").value_or("");
            to = query(request, "to").value_or("");
        }
        if (from.empty() || to.empty()) fail("missing_endpoint", "edges need from and to", from.empty() ? "from" : "to");
        std::lock_guard lock(e->mutex);
        const auto before = snapshot(e->graph);
        if (m == "POST") e->graph.connect(from, to);
        else e->graph.disconnect(from, to);
        persist(*e);
        return json_response({{"from", from}, {"to", to}, {"carts", cart_delta(before, e->graph)}}, m == "POST" ? 201 : 200);
    }

    // Facts.
    if (is("POST", "/stories/{sid}/nodes/{nid}/callout")) {
        const auto callout = callout::callout_from_json(parse_body(request));
        std::vector<std::string> attrs;
        if (auto a = query(request, "attrs")) attrs = split_list(*a);
        std::lock_guard lock(e->mutex);
        const auto before = snapshot(e->graph);
        const auto events = e->graph.apply_callout(p["nid"], callout, attrs);
        persist(*e);
        const auto& node = e->graph.node(p["nid"]);
        return json_response({{"nodeId", p["nid"]},
                              {"epoch", node.epoch},
                              {"hierarchy", json::parse(organizer::hierarchy_to_json(node.vis_cart.hierarchy).dump())},
                              {"events", events_json(events)},
                              {"carts", cart_delta(before, e->graph)}});
    }
    if (is("POST", "/stories/{sid}/nodes/{nid}/facts/select")) {
        const json body = parse_body(request);
        if (!body.contains("factIds") || !body["factIds"].is_array())
            fail("malformed_selection", "body needs a factIds array", "factIds");
        std::set<std::string> ids;
        for (const auto& id : body["factIds"]) ids.insert(id.get<std::string>());
        std::lock_guard lock(e->mutex);
        const auto before = snapshot(e->graph);
        e->graph.select_facts(p["nid"], ids);
        persist(*e);
        return json_response({{"nodeId", p["nid"]},
                              {"selected", e->graph.node(p["nid"]).vis_cart.selected},
                              {"carts", cart_delta(before, e->graph)}});
    }

    // Narrative. Generation runs outside the story lock; a newer request for
    // the same node supersedes an older one, whose result is discarded.
    const bool generate_call = is("POST", "/stories/{sid}/nodes/{nid}/narrative");
    const bool revise_call = !generate_call && is("POST", "/stories/{sid}/nodes/{nid}/narrative/revise");
    if (generate_call || revise_call) {
        const auto nid = p["nid"];
        std::optional<narrative::RevisionRequest> revision;
        if (revise_call) revision = narrative::revision_from_json(parse_body(request));
        const auto ticket = ++next_ticket_;
        narrative::NarrativePrompt prompt;
        std::optional<narrative::NarrativeResult> current;
        {
            std::lock_guard lock(e->mutex);
            const auto& node = e->graph.node(nid);
            if (node.kind != story::NodeKind::text) fail("wrong_node_kind", fmt::format("{} is not a text node", nid));
            if (revise_call) {
                if (!node.narrative) fail("no_narrative", fmt::format("{} has no narrative to revise", nid));
                current = node.narrative;
            } else {
                prompt = build_prompt(e->graph, nid);
            }
            e->tickets[nid] = ticket;
        }
        auto generator = generators_();
        auto result = revise_call ? narrative::revise(*current, *revision, *generator)
                                  : narrative::generate(prompt, *generator);
        std::lock_guard lock(e->mutex);
        auto it = e->tickets.find(nid);
        if (it == e->tickets.end() || it->second != ticket)
            throw Error(ErrorKind::conflict, "superseded", "a newer request for this node replaced this one");
        e->tickets.erase(it);
        e->graph.set_narrative(nid, result);
        persist(*e);
        return json_response(narrative::result_to_json(result));
    }
    if (is("POST", "/stories/{sid}/nodes/{nid}/narrative/accept") ||
        is("POST", "/stories/{sid}/nodes/{nid}/narrative/reject")) {
        const bool accept = path.ends_with("/accept");
        std::lock_guard lock(e->mutex);
        if (accept) e->graph.accept_narrative(p["nid"]);
        else e->graph.reject_narrative(p["nid"]);
        persist(*e);
        const auto& node = e->graph.node(p["nid"]);
        return json_response({{"narrative", narrative::result_to_json(*node.narrative)},
                              {"content", story::richtext_to_json(node.content)}});
    }

    // Recommendations.
    if (is("POST", "/stories/{sid}/nodes/{nid}/recommend")) {
        const json body = parse_body(request);
        const auto text = body.value("selectedText", std::string{});
        const auto nid = p["nid"];
        const auto ticket = ++next_ticket_;
        std::vector<recommender::DatasetSummary> summaries;
        recommender::DatasetLookup lookup;
        {
            std::lock_guard lock(e->mutex);
            if (e->graph.node(nid).kind != story::NodeKind::text)
                fail("wrong_node_kind", fmt::format("{} is not a text node", nid));
            const auto datasets = recommendation_datasets(e->graph, nid);
            summaries = recommender::summarize_datasets(datasets);
            lookup = e->graph.datasets();
            e->tickets[nid] = ticket;
        }
        auto backend = recommenders_(lookup);
        auto outcome = recommender::recommend(text, summaries, *backend, lookup);
        std::lock_guard lock(e->mutex);
        auto it = e->tickets.find(nid);
        if (it == e->tickets.end() || it->second != ticket)
            throw Error(ErrorKind::conflict, "superseded", "a newer request for this node replaced this one");
        e->tickets.erase(it);
        e->graph.set_recommendations(nid, outcome.recommendations);
        e->selected_text[nid] = text;
        persist(*e);
        json recs = json::array();
        for (const auto& r : outcome.recommendations) recs.push_back(recommender::recommendation_to_json(r));
        json out = {{"recommendations", std::move(recs)}, {"dropped", outcome.dropped}};
        out["reason"] = outcome.reason ? json(*outcome.reason) : json(nullptr);
        return json_response(out);
    }
    if (is("POST", "/stories/{sid}/nodes/{nid}/recommend/materialize")) {
        const json body = parse_body(request);
        if (!body.contains("index") || !body["index"].is_number_unsigned())
            fail("malformed_request", "body needs a non-negative index", "index");
        const auto index = body["index"].get<std::size_t>();
        const auto nid = p["nid"];
        std::lock_guard lock(e->mutex);
        const auto& node = e->graph.node(nid);
        const auto& recs = node.text_cart.recommendations;
        if (index >= recs.size())
            fail_not_found("recommendation_not_found", fmt::format("no recommendation {} on {}", index, nid));
        const auto& layout = e->graph.layout().at(nid);
        const story::Rect fallback{layout.x + layout.width + 40.0, layout.y, 400.0, 300.0};
        const auto rect = rect_from_json(body.value("rect", json(nullptr)), fallback);
        const auto text_it = e->selected_text.find(nid);
        auto materialized = recommender::materialize(recs[index], e->graph.datasets(),
                                                     text_it == e->selected_text.end() ? std::string{} : text_it->second);
        const auto before = snapshot(e->graph);
        const auto id = e->graph.add_recommended_node(materialized, rect);
        e->graph.connect(id, nid);
        persist(*e);
        return json_response({{"nodeId", id},
                              {"node", node_view(e->graph, id)},
                              {"plan", tabular::plan_to_json(materialized.plan)},
                              {"carts", cart_delta(before, e->graph)}},
                             201);
    }

    fail_not_found("no_route", fmt::format("no route for {} {}", m, path));
}

}  // namespace weaver::service
