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
#include "weaver/chart/spec.hpp"
#include "weaver/narrative/narrative.hpp"
#include "weaver/organizer/organizer.hpp"
#include "weaver/recommender/recommender.hpp"
#include "weaver/story/richtext.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace weaver::story {

using recommender::DatasetPtr;

enum class NodeKind { vis, text };

auto to_wire(NodeKind kind) -> std::string_view;

struct Rect {
    double x = 0.0;
    double y = 0.0;
    double width = 400.0;
    double height = 300.0;
    friend auto operator==(const Rect&, const Rect&) -> bool = default;
};

struct VisCart {
    organizer::FactHierarchy hierarchy;
    std::set<std::string> selected;  // leaf fact ids
};

struct StreamGroup {
    std::string source;  // vis-node id
    std::string label;   // source chart title, or the id
    std::vector<facts::DataFact> facts;
    friend auto operator==(const StreamGroup&, const StreamGroup&) -> bool = default;
};

struct TextCart {
    std::vector<StreamGroup> streamed;  // ordered by source id
    std::vector<recommender::VisRecommendation> recommendations;
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::vis;
    // vis
    std::optional<chart::ChartSpec> spec;  // null: a data-table node that only feeds summaries
    std::string dataset_id;
    std::optional<callout::CalloutPackage> package;
    std::vector<std::string> attrs_of_interest;
    int epoch = 0;
    VisCart vis_cart;
    // text
    RichText content;
    std::optional<narrative::NarrativeResult> narrative;  // latest generated or accepted result
    std::optional<std::size_t> narrative_paragraph;      // where the accepted result lives in content
    TextCart text_cart;
    // Set when the node's dataset changed under a loaded story.
    bool stale = false;
};

struct Event {
    std::string kind;  // "selection_cleared", "cart_restreamed", "node_removed", ...
    std::string node;
    std::string detail;
    friend auto operator==(const Event&, const Event&) -> bool = default;
};

// "<node>:<epoch>:f<n>" for facts; group selectors expand to leaves.
auto fact_id(std::string_view node, int epoch, std::string_view local) -> std::string;
auto type_group_id(std::string_view node, int epoch, facts::FactType type) -> std::string;
auto attribute_group_id(std::string_view node, int epoch, facts::FactType type, std::string_view attribute)
    -> std::string;
auto stat_group_id(std::string_view node, int epoch) -> std::string;

class StoryGraph {
public:
    explicit StoryGraph(std::string id, std::string title = {});

    [[nodiscard]] auto id() const -> const std::string& { return id_; }
    [[nodiscard]] auto title() const -> const std::string& { return title_; }
    void set_title(std::string title) { title_ = std::move(title); }

    // Datasets are story-owned; re-adding the same id is a no-op.
    void add_dataset(DatasetPtr dataset);
    [[nodiscard]] auto dataset(std::string_view id) const -> DatasetPtr;  // throws dataset_not_found
    [[nodiscard]] auto datasets() const -> const recommender::DatasetLookup& { return datasets_; }

    // Errors: dataset_not_found, invalid_spec.
    auto add_vis_node(std::optional<chart::ChartSpec> spec, const std::string& dataset_id, Rect rect = {}) -> std::string;
    auto add_text_node(RichText content = {}, Rect rect = {}) -> std::string;
    void remove_node(const std::string& id);
    auto duplicate_node(const std::string& id) -> std::string;
    void move_resize(const std::string& id, Rect rect);

    // Errors: node_not_found, wrong_node_kind, duplicate_edge, unknown_edge.
    void connect(const std::string& from, const std::string& to);
    void disconnect(const std::string& from, const std::string& to);

    // Computes, scores and organizes facts for a new callout. Bumps the node's
    // epoch, clears its selection and re-streams downstream carts.
    // Errors: no_chart, the callout and fact-engine errors.
    auto apply_callout(const std::string& vis_id, const callout::Callout& callout,
                       std::vector<std::string> attrs_of_interest = {}) -> std::vector<Event>;

    // Replaces the selection. Errors: unknown_fact, facts_stale (ids from an older epoch).
    void select_facts(const std::string& vis_id, const std::set<std::string>& ids);

    void set_text(const std::string& text_id, RichText content);
    void set_narrative(const std::string& text_id, std::optional<narrative::NarrativeResult> result);
    // Accepting writes the text into content as an anchored paragraph, replacing the
    // paragraph of an earlier accepted version. Errors: no_narrative.
    void accept_narrative(const std::string& text_id);
    void reject_narrative(const std::string& text_id);
    void set_recommendations(const std::string& text_id, std::vector<recommender::VisRecommendation> recs);
    // Adds a vis-node for a materialized recommendation; the derived dataset joins the story.
    auto add_recommended_node(const recommender::Materialized& m, Rect rect = {}) -> std::string;

    [[nodiscard]] auto node(const std::string& id) const -> const Node&;  // throws node_not_found
    [[nodiscard]] auto nodes() const -> const std::map<std::string, Node>& { return nodes_; }
    [[nodiscard]] auto node_order() const -> const std::vector<std::string>& { return order_; }
    [[nodiscard]] auto edges() const -> const std::set<std::pair<std::string, std::string>>& { return edges_; }
    [[nodiscard]] auto layout() const -> const std::map<std::string, Rect>& { return layout_; }
    [[nodiscard]] auto events() const -> const std::vector<Event>& { return events_; }

    // Selected leaf facts of a vis-node in hierarchy order.
    [[nodiscard]] auto selected_facts(const std::string& vis_id) const -> std::vector<facts::DataFact>;
    // Flattened streamed facts of a text-node in group order.
    [[nodiscard]] auto cart_facts(const std::string& text_id) const -> std::vector<facts::DataFact>;

    // Empty when every structural and cart invariant holds.
    [[nodiscard]] auto check_invariants() const -> std::vector<std::string>;

    void mark_all_stale();

private:
    friend auto load_story(const nlohmann::json&, const std::function<DatasetPtr(const std::string&)>&) -> StoryGraph;

    auto mutable_node(const std::string& id) -> Node&;
    auto next_id() -> std::string;
    void restream(const std::string& text_id);
    void restream_from(const std::string& vis_id);
    void emit(std::string kind, std::string node, std::string detail = {});

    std::string id_;
    std::string title_;
    std::map<std::string, Node> nodes_;
    std::vector<std::string> order_;  // creation order
    std::set<std::pair<std::string, std::string>> edges_;
    std::map<std::string, Rect> layout_;
    recommender::DatasetLookup datasets_;
    std::vector<Event> events_;
    int counter_ = 0;
};

// Node as stored in the story container (carts of text-nodes are derived and omitted).
auto node_to_json(const Node& node) -> nlohmann::json;
auto stream_group_to_json(const StreamGroup& group) -> nlohmann::json;

inline constexpr int kContainerVersion = 1;

// {version, story, nodes, edges, layout, datasets}; datasets are inlined as CSV
// with their column types and sha256.
auto save_story(const StoryGraph& graph) -> nlohmann::json;

// Resolves datasets that were saved without inline CSV. Errors: unsupported_version,
// malformed_story, missing_dataset. A dataset whose content no longer matches its
// sha256 loads with every cart marked stale.
auto load_story(const nlohmann::json& doc,
                const std::function<DatasetPtr(const std::string&)>& resolve = {}) -> StoryGraph;

}  // namespace weaver::story
