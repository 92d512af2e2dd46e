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

#include "weaver/story/graph.hpp"

#include "weaver/common/error.hpp"
#include "weaver/common/hash.hpp"
#include "weaver/facts/engine.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace weaver::story {

namespace {

using nlohmann::json;

void stale_error(const std::string& message) { throw Error(ErrorKind::stale, "facts_stale", message); }

template <typename F>
void for_each_fact(organizer::FactHierarchy& h, F&& f) {
    for (auto& fact : h.stat_facts) f(fact);
    for (auto& group : h.groups) {
        for (auto& attr : group.attributes) {
            for (auto& fact : attr.facts) f(fact);
        }
    }
}

template <typename F>
void for_each_fact(const organizer::FactHierarchy& h, F&& f) {
    for (const auto& fact : h.stat_facts) f(fact);
    for (const auto& group : h.groups) {
        for (const auto& attr : group.attributes) {
            for (const auto& fact : attr.facts) f(fact);
        }
    }
}

// Parses "<node>:<epoch>:..." prefixes.
auto id_epoch(const std::string& id, const std::string& node) -> std::optional<int> {
    std::string prefix = node + ":";
    if (id.rfind(prefix, 0) != 0) return std::nullopt;
    auto rest = id.substr(prefix.size());
    auto colon = rest.find(':');
    if (colon == std::string::npos || colon == 0) return std::nullopt;
    try {
        std::size_t used = 0;
        int epoch = std::stoi(rest.substr(0, colon), &used);
        if (used != colon) return std::nullopt;
        return epoch;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

auto to_wire(NodeKind kind) -> std::string_view { return kind == NodeKind::vis ? "vis" : "text"; }

auto fact_id(std::string_view node, int epoch, std::string_view local) -> std::string {
    return fmt::format("{}:{}:{}", node, epoch, local);
}

auto type_group_id(std::string_view node, int epoch, facts::FactType type) -> std::string {
    return fmt::format("{}:{}:type:{}", node, epoch, facts::to_wire(type));
}

auto attribute_group_id(std::string_view node, int epoch, facts::FactType type, std::string_view attribute)
    -> std::string {
    return fmt::format("{}:{}:group:{}:{}", node, epoch, facts::to_wire(type), attribute);
}

auto stat_group_id(std::string_view node, int epoch) -> std::string { return fmt::format("{}:{}:stat", node, epoch); }

StoryGraph::StoryGraph(std::string id, std::string title) : id_(std::move(id)), title_(std::move(title)) {}

void StoryGraph::add_dataset(DatasetPtr dataset) {
    if (!dataset) fail("missing_dataset", "dataset is null");
    datasets_.emplace(dataset->id(), std::move(dataset));
}

auto StoryGraph::dataset(std::string_view id) const -> DatasetPtr {
    auto it = datasets_.find(id);
    if (it == datasets_.end()) fail_not_found("dataset_not_found", "no dataset '" + std::string(id) + "' in this story");
    return it->second;
}

auto StoryGraph::next_id() -> std::string {
    std::string id;
    do {
        id = fmt::format("n{}", ++counter_);
    } while (nodes_.count(id));
    return id;
}

void StoryGraph::emit(std::string kind, std::string node, std::string detail) {
    events_.push_back(Event{std::move(kind), std::move(node), std::move(detail)});
}

auto StoryGraph::node(const std::string& id) const -> const Node& {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail_not_found("node_not_found", "no node '" + id + "'");
    return it->second;
}

auto StoryGraph::mutable_node(const std::string& id) -> Node& {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail_not_found("node_not_found", "no node '" + id + "'");
    return it->second;
}

auto StoryGraph::add_vis_node(std::optional<chart::ChartSpec> spec, const std::string& dataset_id, Rect rect)
    -> std::string {
    auto ds = dataset(dataset_id);
    std::string id = next_id();
    if (spec) {
        spec->id = id;
        if (spec->dataset_id.empty()) spec->dataset_id = dataset_id;
        auto report = chart::validate_spec(*spec, *ds);
        if (!report.ok()) {
            --counter_;
            fail("invalid_spec", "chart spec does not validate: " + report.violations.front().message(),
                 report.violations.front().field);
        }
    }
    Node n;
    n.id = id;
    n.kind = NodeKind::vis;
    n.spec = std::move(spec);
    n.dataset_id = dataset_id;
    nodes_.emplace(id, std::move(n));
    order_.push_back(id);
    layout_[id] = rect;
    return id;
}

auto StoryGraph::add_text_node(RichText content, Rect rect) -> std::string {
    std::string id = next_id();
    Node n;
    n.id = id;
    n.kind = NodeKind::text;
    n.content = std::move(content);
    nodes_.emplace(id, std::move(n));
    order_.push_back(id);
    layout_[id] = rect;
    return id;
}

auto StoryGraph::add_recommended_node(const recommender::Materialized& m, Rect rect) -> std::string {
    add_dataset(m.dataset);
    auto spec = m.spec;
    spec.dataset_id = m.dataset->id();
    return add_vis_node(std::move(spec), m.dataset->id(), rect);
}

void StoryGraph::remove_node(const std::string& id) {
    (void)node(id);
    std::vector<std::string> affected;
    for (auto it = edges_.begin(); it != edges_.end();) {
        if (it->first == id || it->second == id) {
            if (it->first == id) affected.push_back(it->second);
            it = edges_.erase(it);
        } else {
            ++it;
        }
    }
    nodes_.erase(id);
    layout_.erase(id);
    order_.erase(std::remove(order_.begin(), order_.end(), id), order_.end());
    emit("node_removed", id);
    for (const auto& t : affected) restream(t);
}

auto StoryGraph::duplicate_node(const std::string& id) -> std::string {
    const Node original = node(id);
    Rect rect = layout_.at(id);
    rect.x += 24;
    rect.y += 24;
    if (original.kind == NodeKind::vis) return add_vis_node(original.spec, original.dataset_id, rect);
    return add_text_node(original.content, rect);
}

void StoryGraph::move_resize(const std::string& id, Rect rect) {
    (void)node(id);
    if (rect.width < 0 || rect.height < 0) fail("invalid_rect", "node size must be non-negative", "rect");
    layout_[id] = rect;
}

void StoryGraph::connect(const std::string& from, const std::string& to) {
    const auto& a = node(from);
    const auto& b = node(to);
    if (a.kind != NodeKind::vis || b.kind != NodeKind::text) {
        fail("wrong_node_kind", "edges run from a vis-node to a text-node");
    }
    if (!edges_.emplace(from, to).second) {
        throw Error(ErrorKind::conflict, "duplicate_edge", "nodes '" + from + "' and '" + to + "' are already connected");
    }
    restream(to);
}

void StoryGraph::disconnect(const std::string& from, const std::string& to) {
    if (edges_.erase({from, to}) == 0) fail_not_found("unknown_edge", "no edge from '" + from + "' to '" + to + "'");
    restream(to);
}

auto StoryGraph::apply_callout(const std::string& vis_id, const callout::Callout& c,
                               std::vector<std::string> attrs_of_interest) -> std::vector<Event> {
    auto& n = mutable_node(vis_id);
    if (n.kind != NodeKind::vis) fail("wrong_node_kind", "callouts apply to vis-nodes");
    if (!n.spec) fail("no_chart", "node '" + vis_id + "' shows a data table, not a chart");
    auto call = c;
    if (call.chart_id.empty()) call.chart_id = n.spec->id;
    auto resolution = callout::resolve_callout(call, *n.spec, dataset(n.dataset_id));
    if (const auto* empty = std::get_if<callout::EmptySelection>(&resolution)) {
        fail("empty_selection", "the callout selects no rows: " + empty->reason);
    }
    auto pkg = std::get<callout::CalloutPackage>(std::move(resolution));
    auto result = facts::compute_facts(pkg, attrs_of_interest);
    organizer::score_facts(result.facts);
    organizer::OrganizeContext ctx{n.spec->chart_type, call.kind, {}};
    for (const auto& col : pkg.dataset->columns()) ctx.column_order.push_back(col.name());
    auto hierarchy = organizer::truncate(organizer::organize(std::move(result.facts), std::move(result.stat_table), ctx),
                                         organizer::ScoringConfig{}.top_k);

    // Everything above may throw; state changes start here.
    std::size_t first_event = events_.size();
    int epoch = n.epoch + 1;
    for_each_fact(hierarchy, [&](facts::DataFact& f) {
        f.id = fact_id(vis_id, epoch, f.id);
        f.source_node = vis_id;
    });
    bool had_selection = !n.vis_cart.selected.empty();
    n.epoch = epoch;
    n.package = std::move(pkg);
    n.attrs_of_interest = std::move(attrs_of_interest);
    n.vis_cart = VisCart{std::move(hierarchy), {}};
    n.stale = false;
    emit("facts_computed", vis_id, fmt::format("epoch {}", epoch));
    if (had_selection) emit("selection_cleared", vis_id, "new callout");
    restream_from(vis_id);
    return {events_.begin() + static_cast<std::ptrdiff_t>(first_event), events_.end()};
}

void StoryGraph::select_facts(const std::string& vis_id, const std::set<std::string>& ids) {
    auto& n = mutable_node(vis_id);
    if (n.kind != NodeKind::vis) fail("wrong_node_kind", "facts are selected on vis-nodes");
    if (n.stale) stale_error("the dataset changed; re-run the callout on '" + vis_id + "'");
    const auto& h = n.vis_cart.hierarchy;
    std::set<std::string> leaves;
    for_each_fact(h, [&](const facts::DataFact& f) { leaves.insert(f.id); });
    std::set<std::string> chosen;
    for (const auto& id : ids) {
        if (leaves.count(id)) {
            chosen.insert(id);
            continue;
        }
        bool matched = false;
        if (id == stat_group_id(vis_id, n.epoch)) {
            for (const auto& f : h.stat_facts) chosen.insert(f.id);
            matched = true;
        }
        for (const auto& group : h.groups) {
            bool whole = id == type_group_id(vis_id, n.epoch, group.type);
            for (const auto& attr : group.attributes) {
                if (whole || id == attribute_group_id(vis_id, n.epoch, group.type, attr.attribute)) {
                    for (const auto& f : attr.facts) chosen.insert(f.id);
                    matched = true;
                }
            }
        }
        if (matched) continue;
        auto epoch = id_epoch(id, vis_id);
        if (epoch && *epoch < n.epoch) stale_error("fact '" + id + "' belongs to an earlier callout");
        fail("unknown_fact", "no fact or group '" + id + "' on node '" + vis_id + "'", "factIds");
    }
    n.vis_cart.selected = std::move(chosen);
    restream_from(vis_id);
}

void StoryGraph::set_text(const std::string& text_id, RichText content) {
    auto& n = mutable_node(text_id);
    if (n.kind != NodeKind::text) fail("wrong_node_kind", "text content belongs to text-nodes");
    n.content = std::move(content);
    if (n.narrative_paragraph && *n.narrative_paragraph >= n.content.paragraphs.size()) n.narrative_paragraph.reset();
}

void StoryGraph::set_narrative(const std::string& text_id, std::optional<narrative::NarrativeResult> result) {
    auto& n = mutable_node(text_id);
    if (n.kind != NodeKind::text) fail("wrong_node_kind", "narratives belong to text-nodes");
    n.narrative = std::move(result);
}

void StoryGraph::accept_narrative(const std::string& text_id) {
    auto& n = mutable_node(text_id);
    if (n.kind != NodeKind::text) fail("wrong_node_kind", "narratives belong to text-nodes");
    if (!n.narrative || n.narrative->accepted == narrative::Acceptance::rejected) {
        fail("no_narrative", "there is no narrative to accept on '" + text_id + "'");
    }
    n.narrative->accepted = narrative::Acceptance::accepted;
    Run run{n.narrative->text, false, false, {}};
    for (const auto& f : n.narrative->anchored_facts) run.fact_ids.push_back(f.id);
    Paragraph para{{std::move(run)}};
    if (n.narrative_paragraph && *n.narrative_paragraph < n.content.paragraphs.size()) {
        n.content.paragraphs[*n.narrative_paragraph] = std::move(para);
    } else {
        n.content.paragraphs.push_back(std::move(para));
        n.narrative_paragraph = n.content.paragraphs.size() - 1;
    }
}

void StoryGraph::reject_narrative(const std::string& text_id) {
    auto& n = mutable_node(text_id);
    if (n.kind != NodeKind::text) fail("wrong_node_kind", "narratives belong to text-nodes");
    if (!n.narrative) fail("no_narrative", "there is no narrative to reject on '" + text_id + "'");
    n.narrative->accepted = narrative::Acceptance::rejected;
}

void StoryGraph::set_recommendations(const std::string& text_id, std::vector<recommender::VisRecommendation> recs) {
    auto& n = mutable_node(text_id);
    if (n.kind != NodeKind::text) fail("wrong_node_kind", "recommendations belong to text-nodes");
    n.text_cart.recommendations = std::move(recs);
}

auto StoryGraph::selected_facts(const std::string& vis_id) const -> std::vector<facts::DataFact> {
    const auto& n = node(vis_id);
    std::vector<facts::DataFact> out;
    for_each_fact(n.vis_cart.hierarchy, [&](const facts::DataFact& f) {
        if (n.vis_cart.selected.count(f.id)) out.push_back(f);
    });
    return out;
}

auto StoryGraph::cart_facts(const std::string& text_id) const -> std::vector<facts::DataFact> {
    std::vector<facts::DataFact> out;
    for (const auto& g : node(text_id).text_cart.streamed) out.insert(out.end(), g.facts.begin(), g.facts.end());
    return out;
}

void StoryGraph::restream(const std::string& text_id) {
    auto it = nodes_.find(text_id);
    if (it == nodes_.end() || it->second.kind != NodeKind::text) return;
    std::vector<StreamGroup> groups;
    for (const auto& [from, to] : edges_) {
        if (to != text_id) continue;
        auto facts = selected_facts(from);
        if (facts.empty()) continue;
        const auto& src = nodes_.at(from);
        std::string label = src.spec && !src.spec->title.empty() ? src.spec->title : from;
        groups.push_back(StreamGroup{from, std::move(label), std::move(facts)});
    }
    auto& cart = it->second.text_cart.streamed;
    if (cart != groups) {
        cart = std::move(groups);
        emit("cart_restreamed", text_id);
    }
}

void StoryGraph::restream_from(const std::string& vis_id) {
    for (const auto& [from, to] : edges_) {
        if (from == vis_id) restream(to);
    }
}

void StoryGraph::mark_all_stale() {
    for (auto& [id, n] : nodes_) {
        n.stale = true;
        if (n.kind == NodeKind::vis) {
            n.package.reset();
            if (!n.vis_cart.selected.empty()) emit("selection_cleared", id, "dataset changed");
            n.vis_cart.selected.clear();
        }
    }
    for (const auto& id : order_) restream(id);
}

auto StoryGraph::check_invariants() const -> std::vector<std::string> {
    std::vector<std::string> problems;
    for (const auto& [from, to] : edges_) {
        auto a = nodes_.find(from);
        auto b = nodes_.find(to);
        if (a == nodes_.end() || b == nodes_.end()) {
            problems.push_back("dangling edge " + from + "->" + to);
        } else if (a->second.kind != NodeKind::vis || b->second.kind != NodeKind::text) {
            problems.push_back("edge " + from + "->" + to + " is not vis->text");
        }
    }
    if (order_.size() != nodes_.size() || layout_.size() != nodes_.size()) problems.push_back("order/layout out of sync");
    for (const auto& [id, n] : nodes_) {
        if (n.kind == NodeKind::vis) {
            std::set<std::string> leaves;
            for_each_fact(n.vis_cart.hierarchy, [&](const facts::DataFact& f) { leaves.insert(f.id); });
            for (const auto& s : n.vis_cart.selected) {
                if (!leaves.count(s)) problems.push_back("selection of " + id + " names unknown fact " + s);
            }
            if (n.spec) {
                auto ds = datasets_.find(n.dataset_id);
                if (ds == datasets_.end()) {
                    problems.push_back("node " + id + " references a missing dataset");
                } else if (!chart::validate_spec(*n.spec, *ds->second).ok()) {
                    problems.push_back("node " + id + " spec does not validate");
                }
            }
        } else {
            std::set<std::string> expected;
            for (const auto& [from, to] : edges_) {
                if (to != id || !nodes_.count(from)) continue;
                for (const auto& f : selected_facts(from)) expected.insert(f.id);
            }
            std::set<std::string> actual;
            for (const auto& g : n.text_cart.streamed) {
                for (const auto& f : g.facts) actual.insert(f.id);
            }
            if (expected != actual) problems.push_back("cart of " + id + " differs from the union of its sources");
        }
    }
    return problems;
}

// ---- persistence ----

namespace {

auto rect_json(const Rect& r) -> json {
    return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

auto dataset_json(const tabular::Dataset& ds) -> json {
    auto csv = tabular::write_csv(ds);
    json types = json::object();
    for (const auto& c : ds.columns()) types[c.name()] = tabular::to_string(c.type());
    return {{"id", ds.id()}, {"name", ds.name()}, {"sha256", sha256_hex(csv)}, {"csv", csv}, {"types", types}};
}

auto recs_json(const std::vector<recommender::VisRecommendation>& recs) -> json {
    json out = json::array();
    for (const auto& r : recs) out.push_back(recommender::recommendation_to_json(r));
    return out;
}

}  // namespace

auto node_to_json(const Node& n) -> json {
    json doc{{"id", n.id}, {"kind", to_wire(n.kind)}, {"stale", n.stale}};
    if (n.kind == NodeKind::vis) {
        doc["spec"] = n.spec ? chart::serialize_spec(*n.spec) : json(nullptr);
        doc["datasetId"] = n.dataset_id;
        doc["callout"] = n.package ? callout::callout_to_json(n.package->interaction) : json(nullptr);
        doc["attrsOfInterest"] = n.attrs_of_interest;
        doc["epoch"] = n.epoch;
        doc["hierarchy"] = json::parse(organizer::hierarchy_to_json(n.vis_cart.hierarchy).dump());
        doc["selected"] = n.vis_cart.selected;
    } else {
        doc["content"] = richtext_to_json(n.content);
        doc["narrative"] = n.narrative ? narrative::result_to_json(*n.narrative) : json(nullptr);
        doc["narrativeParagraph"] = n.narrative_paragraph ? json(*n.narrative_paragraph) : json(nullptr);
        doc["recommendations"] = recs_json(n.text_cart.recommendations);
    }
    return doc;
}

auto stream_group_to_json(const StreamGroup& group) -> json {
    json facts = json::array();
    for (const auto& f : group.facts) facts.push_back(facts::fact_to_json(f));
    return {{"source", group.source}, {"label", group.label}, {"facts", std::move(facts)}};
}

auto save_story(const StoryGraph& graph) -> json {
    json nodes = json::array();
    for (const auto& id : graph.node_order()) nodes.push_back(node_to_json(graph.node(id)));
    json edges = json::array();
    for (const auto& [from, to] : graph.edges()) edges.push_back({from, to});
    json layout = json::object();
    for (const auto& [id, r] : graph.layout()) layout[id] = rect_json(r);
    json datasets = json::array();
    for (const auto& [id, ds] : graph.datasets()) datasets.push_back(dataset_json(*ds));
    return {{"version", kContainerVersion},
            {"story", {{"id", graph.id()}, {"title", graph.title()}}},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)},
            {"layout", std::move(layout)},
            {"datasets", std::move(datasets)}};
}

auto load_story(const json& doc, const std::function<DatasetPtr(const std::string&)>& resolve) -> StoryGraph {
    if (!doc.is_object() || !doc.contains("version")) fail("malformed_story", "story container needs a version");
    if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kContainerVersion) {
        fail("unsupported_version", fmt::format("unsupported story container version {}", doc["version"].dump()),
             "version");
    }
    try {
        StoryGraph g(doc.at("story").at("id").get<std::string>(), doc.at("story").value("title", std::string{}));
        bool stale = false;
        for (const auto& d : doc.at("datasets")) {
            auto id = d.at("id").get<std::string>();
            auto sha = d.at("sha256").get<std::string>();
            DatasetPtr ds;
            if (d.contains("csv") && d["csv"].is_string()) {
                const auto csv = d["csv"].get<std::string>();
                tabular::LoadOptions options;
                options.id = id;
                const json types = d.value("types", json::object());
                for (const auto& item : types.items()) {
                    auto t = tabular::parse_attr_type(item.value().get<std::string>());
                    if (!t) fail("malformed_story", "unknown column type for '" + item.key() + "'", "datasets");
                    options.forced_types.emplace(item.key(), *t);
                }
                ds = std::make_shared<const tabular::Dataset>(
                    tabular::load_dataset(csv, d.value("name", id), options));
                if (sha256_hex(csv) != sha) stale = true;
            } else {
                if (resolve) ds = resolve(id);
                if (!ds) fail_not_found("missing_dataset", "dataset '" + id + "' is neither inlined nor available");
                if (sha256_hex(tabular::write_csv(*ds)) != sha) stale = true;
            }
            g.add_dataset(std::move(ds));
        }
        int max_counter = 0;
        for (const auto& nd : doc.at("nodes")) {
            Node n;
            n.id = nd.at("id").get<std::string>();
            auto kind = nd.at("kind").get<std::string>();
            if (kind != "vis" && kind != "text") fail("malformed_story", "unknown node kind '" + kind + "'", "nodes");
            n.kind = kind == "vis" ? NodeKind::vis : NodeKind::text;
            n.stale = nd.value("stale", false);
            if (n.kind == NodeKind::vis) {
                if (!nd.at("spec").is_null()) n.spec = chart::parse_spec(nd["spec"]);
                n.dataset_id = nd.at("datasetId").get<std::string>();
                n.attrs_of_interest = nd.value("attrsOfInterest", std::vector<std::string>{});
                n.epoch = nd.value("epoch", 0);
                n.vis_cart.hierarchy = organizer::hierarchy_from_json(nlohmann::ordered_json::parse(nd.at("hierarchy").dump()));
                n.vis_cart.selected = nd.value("selected", std::set<std::string>{});
                if (!nd.at("callout").is_null() && n.spec && !stale) {
                    auto call = callout::callout_from_json(nd["callout"]);
                    auto res = callout::resolve_callout(call, *n.spec, g.dataset(n.dataset_id));
                    if (auto* pkg = std::get_if<callout::CalloutPackage>(&res)) n.package = std::move(*pkg);
                }
            } else {
                n.content = richtext_from_json(nd.at("content"));
                if (!nd.at("narrative").is_null()) n.narrative = narrative::result_from_json(nd["narrative"]);
                if (!nd.at("narrativeParagraph").is_null()) n.narrative_paragraph = nd["narrativeParagraph"].get<std::size_t>();
                for (const auto& r : nd.at("recommendations")) {
                    auto rec = recommender::recommendation_from_json(
                        json{{"rationale", r.at("rationale")}, {"plan", r.at("plan")}, {"spec", r.at("spec")}});
                    rec.valid = r.value("valid", false);
                    rec.violations = r.value("violations", std::vector<std::string>{});
                    n.text_cart.recommendations.push_back(std::move(rec));
                }
            }
            if (g.nodes_.count(n.id)) fail("malformed_story", "duplicate node id '" + n.id + "'", "nodes");
            if (n.id.size() > 1 && n.id[0] == 'n') {
                try {
                    max_counter = std::max(max_counter, std::stoi(n.id.substr(1)));
                } catch (const std::exception&) {
                }
            }
            g.order_.push_back(n.id);
            g.layout_[n.id] = Rect{};
            g.nodes_.emplace(n.id, std::move(n));
        }
        g.counter_ = max_counter;
        for (const auto& [id, r] : doc.at("layout").items()) {
            if (!g.nodes_.count(id)) fail("malformed_story", "layout names unknown node '" + id + "'", "layout");
            g.layout_[id] = Rect{r.at("x").get<double>(), r.at("y").get<double>(), r.at("width").get<double>(),
                                 r.at("height").get<double>()};
        }
        for (const auto& e : doc.at("edges")) {
            auto from = e.at(0).get<std::string>();
            auto to = e.at(1).get<std::string>();
            const auto& a = g.node(from);
            const auto& b = g.node(to);
            if (a.kind != NodeKind::vis || b.kind != NodeKind::text) {
                fail("malformed_story", "edge " + from + "->" + to + " is not vis->text", "edges");
            }
            if (!g.edges_.emplace(from, to).second) fail("malformed_story", "duplicate edge", "edges");
        }
        if (stale) {
            g.mark_all_stale();
        } else {
            for (const auto& id : g.order_) g.restream(id);
        }
        g.events_.clear();
        if (stale) g.emit("story_stale", g.id(), "dataset content changed since save");
        return g;
    } catch (const json::exception& e) {
        fail("malformed_story", e.what());
    }
}

}  // namespace weaver::story
