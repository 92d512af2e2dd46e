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
#include "weaver/service/api.hpp"

namespace weaver::service {

namespace {

using nlohmann::json;

// Schema inferred from one serialized instance of an engine type.
auto schema_of(const json& value) -> json {
    switch (value.type()) {
        case json::value_t::object: {
            json props = json::object();
            for (const auto& [key, v] : value.items()) props[key] = schema_of(v);
            return {{"type", "object"}, {"properties", std::move(props)}};
        }
        case json::value_t::array:
            return {{"type", "array"}, {"items", value.empty() ? json::object() : schema_of(value.front())}};
        case json::value_t::string: return {{"type", "string"}};
        case json::value_t::boolean: return {{"type", "boolean"}};
        case json::value_t::number_integer:
        case json::value_t::number_unsigned: return {{"type", "integer"}};
        case json::value_t::number_float: return {{"type", "number"}};
        default: return {{"nullable", true}};
    }
}

auto ref(std::string_view name) -> json { return {{"$ref", "#/components/schemas/" + std::string(name)}}; }

auto op(std::string summary, const json& response, const json& request = nullptr, int status = 200) -> json {
    json o = {{"summary", std::move(summary)},
              {"responses",
               {{std::to_string(status), {{"description", "ok"}, {"content", {{"application/json", {{"schema", response}}}}}}},
                {"default", {{"description", "error"}, {"content", {{"application/json", {{"schema", ref("ApiError")}}}}}}}}}};
    if (!request.is_null())
        o["requestBody"] = {{"required", true}, {"content", {{"application/json", {{"schema", request}}}}}};
    return o;
}

auto components() -> json {
    chart::ChartSpec spec;
    spec.x_attr = "x";
    spec.y_attr = "y";
    spec.tooltip_attrs = {"t"};
    callout::Callout callout;
    callout.x_range = callout::AxisRange{0.0, 1.0};

    recommender::DatasetSummary summary{"d", "name", 1, {{"c", tabular::AttrType::quantitative, 1, {"1"}, 1.0, 1.0}}};
    story::RichText text{{story::Paragraph{{story::Run{"text", true, false, {"n1:1:f1"}}}}}};
    narrative::NarrativeResult result;
    narrative::RevisionRequest revision{{0, 4}, narrative::RevisionMode::custom, "instruction"};
    recommender::VisRecommendation rec;
    rec.spec = spec;

    json schemas = {
        {"ApiError", schema_of({{"error", {{"code", ""}, {"message", ""}, {"field", ""}}}})},
        {"ChartSpec", schema_of(chart::serialize_spec(spec))},
        {"Callout", schema_of(callout::callout_to_json(callout))},
        {"DatasetSummary", schema_of(recommender::summary_to_json(summary))},
        {"RichText", schema_of(story::richtext_to_json(text))},
        {"NarrativeResult", schema_of(narrative::result_to_json(result))},
        {"RevisionRequest", schema_of(narrative::revision_to_json(revision))},
        {"VisRecommendation", schema_of(recommender::recommendation_to_json(rec))},
        {"FactHierarchy", schema_of(json::parse(organizer::hierarchy_to_json({}).dump()))},
        {"StoryContainer", schema_of(story::save_story(story::StoryGraph("s1", "title")))},
        {"StoryRender", schema_of(exporting::render_to_json({}))},
    };
    return schemas;
}

}  // namespace

auto openapi_document() -> json {
    const json obj = {{"type", "object"}};
    const json node_response = {{"type", "object"},
                                {"properties", {{"nodeId", {{"type", "string"}}}, {"node", obj}, {"carts", obj}}}};
    json paths = {
        {"/health", {{"get", op("Liveness and generator backend", obj)}}},
        {"/stories",
         {{"get", op("List stories", obj)},
          {"post", op("Create a story, or import a story container", ref("StoryContainer"), obj, 201)}}},
        {"/stories/{sid}",
         {{"get", op("Story container", ref("StoryContainer"))},
          {"put", op("Replace a story from a container", ref("StoryContainer"), ref("StoryContainer"))},
          {"delete", op("Delete a story", obj)}}},
        {"/stories/{sid}/datasets",
         {{"get", op("Dataset summaries", obj)},
          {"post", {{"summary", "Upload CSV (query: name, id, types=col:type,...)"},
                    {"requestBody", {{"content", {{"text/csv", {{"schema", {{"type", "string"}}}}}}}}},
                    {"responses", {{"201", {{"description", "ok"},
                                            {"content", {{"application/json", {{"schema", ref("DatasetSummary")}}}}}}}}}}}}},
        {"/stories/{sid}/datasets/{did}/summary", {{"get", op("Dataset summary", ref("DatasetSummary"))}}},
        {"/stories/{sid}/nodes",
         {{"get", op("Nodes in creation order", obj)},
          {"post", op("Add a vis-node {kind, spec, datasetId, rect} or text-node {kind, content, rect}", node_response,
                      obj, 201)}}},
        {"/stories/{sid}/nodes/{nid}",
         {{"get", op("Node", obj)}, {"delete", op("Remove a node and its edges; returns cart deltas", obj)}}},
        {"/stories/{sid}/nodes/{nid}/duplicate", {{"post", op("Duplicate a node", node_response, nullptr, 201)}}},
        {"/stories/{sid}/nodes/{nid}/layout", {{"put", op("Move or resize", obj, obj)}}},
        {"/stories/{sid}/nodes/{nid}/content", {{"put", op("Replace text content", obj, ref("RichText"))}}},
        {"/stories/{sid}/edges",
         {{"post", op("Connect {from, to}; returns cart deltas", obj, obj, 201)},
          {"delete", op("Disconnect (query: from, to); returns cart deltas", obj)}}},
        {"/stories/{sid}/nodes/{nid}/callout",
         {{"post", op("Apply a callout (query: attrs=a,b); returns the fact hierarchy", obj, ref("Callout"))}}},
        {"/stories/{sid}/nodes/{nid}/facts/select", {{"post", op("Replace the fact selection {factIds}", obj, obj)}}},
        {"/stories/{sid}/nodes/{nid}/narrative", {{"post", op("Generate from the cart", ref("NarrativeResult"))}}},
        {"/stories/{sid}/nodes/{nid}/narrative/revise",
         {{"post", op("Revise a marked span", ref("NarrativeResult"), ref("RevisionRequest"))}}},
        {"/stories/{sid}/nodes/{nid}/narrative/accept", {{"post", op("Accept the pending narrative", obj)}}},
        {"/stories/{sid}/nodes/{nid}/narrative/reject", {{"post", op("Reject the pending narrative", obj)}}},
        {"/stories/{sid}/nodes/{nid}/recommend",
         {{"post", op("Recommend charts for {selectedText}",
                      {{"type", "object"},
                       {"properties",
                        {{"recommendations", {{"type", "array"}, {"items", ref("VisRecommendation")}}},
                         {"reason", {{"type", "string"}, {"nullable", true}}},
                         {"dropped", {{"type", "array"}, {"items", {{"type", "string"}}}}}}}},
                      obj)}}},
        {"/stories/{sid}/nodes/{nid}/recommend/materialize",
         {{"post", op("Add a vis-node for recommendation {index, rect?}", node_response, obj, 201)}}},
        {"/stories/{sid}/export",
         {{"get", op("Render and bundle (query: format=continuous|scrolly|stepper, order=2,0,1)",
                     {{"type", "object"},
                      {"properties", {{"render", ref("StoryRender")}, {"files", {{"type", "object"}}}}}})}}},
    };
    return {{"openapi", "3.0.3"},
            {"info", {{"title", "weaver"}, {"version", "1.0.0"}}},
            {"paths", std::move(paths)},
            {"components", {{"schemas", components()}}}};
}

}  // namespace weaver::service
