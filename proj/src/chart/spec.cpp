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

#include "weaver/chart/spec.hpp"

#include "weaver/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace weaver::chart {

using nlohmann::json;
using tabular::AttrType;

namespace {

struct TypeNames {
    ChartType type;
    std::string_view wire;
    std::string_view display;
};

constexpr TypeNames kTypeNames[] = {
    {ChartType::scatterplot, "scatterplot", "scatterplot"},
    {ChartType::bar, "bar", "bar chart"},
    {ChartType::line, "line", "line chart"},
    {ChartType::stacked_bar, "stackedBar", "stacked bar chart"},
    {ChartType::pie_donut, "pieDonut", "pie chart"},
    {ChartType::sunburst, "sunburst", "sunburst chart"},
};

class Checker {
public:
    Checker(const ChartSpec& spec, const tabular::Dataset& dataset) : spec_(spec), dataset_(dataset) {}

    // Checks presence, existence and allowed types of one encoding.
    void require(const char* field, const std::optional<std::string>& attr, std::initializer_list<AttrType> allowed,
                 const char* rule) {
        if (!attr) {
            add(field, "is required for " + std::string(to_wire(spec_.chart_type)));
            return;
        }
        check_type(field, *attr, allowed, rule);
    }

    void optional(const char* field, const std::optional<std::string>& attr, std::initializer_list<AttrType> allowed,
                  const char* rule) {
        if (attr) check_type(field, *attr, allowed, rule);
    }

    void exists(const char* field, const std::string& attr) {
        if (!dataset_.find(attr)) add(field, "references unknown column '" + attr + "'");
    }

    void check_type(const char* field, const std::string& attr, std::initializer_list<AttrType> allowed,
                    const char* rule) {
        const auto* column = dataset_.find(attr);
        if (!column) {
            add(field, "references unknown column '" + attr + "'");
            return;
        }
        if (allowed.size() > 0 && std::find(allowed.begin(), allowed.end(), column->type()) == allowed.end()) {
            add(field, rule);
        }
    }

    void add(std::string field, std::string rule) { report_.violations.push_back({std::move(field), std::move(rule)}); }

    auto take() -> ValidationReport { return std::move(report_); }

private:
    const ChartSpec& spec_;
    const tabular::Dataset& dataset_;
    ValidationReport report_;
};

void reject_unknown(const json& doc) {
    static constexpr std::string_view kFields[] = {"id",           "chartType",    "datasetId",      "xAttr",
                                                   "yAttr",        "colorAttr",    "identityAttr",   "tooltipAttrs",
                                                   "hierarchyAttrs", "title"};
    for (const auto& item : doc.items()) {
        if (std::find(std::begin(kFields), std::end(kFields), item.key()) == std::end(kFields)) {
            throw Error(ErrorKind::invalid, "unknown_field", "unknown chart spec field '" + item.key() + "'", item.key());
        }
    }
}

auto optional_string(const json& doc, const char* key) -> std::optional<std::string> {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        fail("malformed_spec", std::string(key) + " must be a string or null", key);
    }
    return it->get<std::string>();
}

auto string_list(const json& doc, const char* key) -> std::vector<std::string> {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return {};
    }
    if (!it->is_array()) {
        fail("malformed_spec", std::string(key) + " must be an array of strings", key);
    }
    std::vector<std::string> out;
    for (const auto& item : *it) {
        if (!item.is_string()) fail("malformed_spec", std::string(key) + " must be an array of strings", key);
        out.push_back(item.get<std::string>());
    }
    return out;
}

auto range_json(const std::optional<NumericRange>& range) -> json {
    if (!range) return nullptr;
    return json::array({range->min, range->max});
}

auto range_from(const json& doc, const char* key) -> std::optional<NumericRange> {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    return NumericRange{it->at(0).get<double>(), it->at(1).get<double>()};
}

}  // namespace

auto to_wire(ChartType type) -> std::string_view {
    for (const auto& names : kTypeNames) {
        if (names.type == type) return names.wire;
    }
    return "scatterplot";
}

auto parse_chart_type(std::string_view wire) -> std::optional<ChartType> {
    for (const auto& names : kTypeNames) {
        if (names.wire == wire) return names.type;
    }
    return std::nullopt;
}

auto display_name(ChartType type) -> std::string_view {
    for (const auto& names : kTypeNames) {
        if (names.type == type) return names.display;
    }
    return "chart";
}

auto ValidationReport::messages() const -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& violation : violations) out.push_back(violation.message());
    return out;
}

auto validate_spec(const ChartSpec& spec, const tabular::Dataset& dataset) -> ValidationReport {
    constexpr auto Q = AttrType::quantitative;
    constexpr auto C = AttrType::categorical;
    constexpr auto T = AttrType::temporal;
    Checker check(spec, dataset);
    if (spec.dataset_id != dataset.id()) {
        check.add("dataset_id", "must reference the bound dataset '" + dataset.id() + "'");
    }
    switch (spec.chart_type) {
        case ChartType::scatterplot:
            check.require("x_attr", spec.x_attr, {Q}, "must be quantitative");
            check.require("y_attr", spec.y_attr, {Q}, "must be quantitative");
            check.optional("color_attr", spec.color_attr, {C}, "must be categorical");
            break;
        case ChartType::bar:
            check.require("x_attr", spec.x_attr, {C, T}, "must be categorical or temporal");
            check.require("y_attr", spec.y_attr, {Q}, "must be quantitative");
            check.optional("color_attr", spec.color_attr, {C}, "must be categorical");
            break;
        case ChartType::line:
            check.require("x_attr", spec.x_attr, {T}, "must be temporal");
            check.require("y_attr", spec.y_attr, {Q}, "must be quantitative");
            check.optional("color_attr", spec.color_attr, {C}, "must be categorical");
            break;
        case ChartType::stacked_bar:
            check.require("x_attr", spec.x_attr, {C, T}, "must be categorical or temporal");
            check.require("y_attr", spec.y_attr, {Q}, "must be quantitative");
            check.require("color_attr", spec.color_attr, {C}, "must be categorical");
            break;
        case ChartType::pie_donut:
            check.require("x_attr", spec.x_attr, {C}, "must be categorical");
            check.require("y_attr", spec.y_attr, {Q}, "must be quantitative");
            check.optional("color_attr", spec.color_attr, {C}, "must be categorical");
            break;
        case ChartType::sunburst:
            if (spec.hierarchy_attrs.size() < 2) {
                check.add("hierarchy_attrs", "must list at least 2 columns");
            }
            for (const auto& attr : spec.hierarchy_attrs) {
                check.check_type("hierarchy_attrs", attr, {C}, "must all be categorical");
            }
            check.require("y_attr", spec.y_attr, {Q}, "must be quantitative");
            if (spec.x_attr) check.exists("x_attr", *spec.x_attr);
            check.optional("color_attr", spec.color_attr, {C}, "must be categorical");
            break;
    }
    if (spec.chart_type != ChartType::sunburst && !spec.hierarchy_attrs.empty()) {
        check.add("hierarchy_attrs", "is only allowed for sunburst");
    }
    if (spec.identity_attr) check.exists("identity_attr", *spec.identity_attr);
    for (const auto& attr : spec.tooltip_attrs) check.exists("tooltip_attrs", attr);
    return check.take();
}

auto ChartMetadata::encoding(std::string_view channel) const -> std::optional<std::string> {
    for (const auto& [name, column] : encodings) {
        if (name == channel) return column;
    }
    return std::nullopt;
}

auto derive_chart_metadata(const ChartSpec& spec, const tabular::Dataset& dataset) -> ChartMetadata {
    auto report = validate_spec(spec, dataset);
    if (!report.ok()) {
        fail("invalid_spec", "chart spec does not validate: " + report.violations.front().message(),
             report.violations.front().field);
    }
    ChartMetadata meta;
    meta.chart_type = spec.chart_type;
    meta.identity = spec.identity_attr;
    meta.row_count = dataset.row_count();

    auto plotted = [&](const std::string& attr) {
        const auto& column = dataset.column(attr);
        if (column.all_null()) {
            fail("no_plottable_values", "column '" + attr + "' has no plottable values", attr);
        }
        return &column;
    };
    auto extent = [](const tabular::Column& column) {
        NumericRange range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (double v : column.numeric_values()) {
            if (std::isnan(v)) continue;
            range.min = std::min(range.min, v);
            range.max = std::max(range.max, v);
        }
        return range;
    };

    if (spec.x_attr) {
        meta.encodings.emplace_back("x", *spec.x_attr);
        const auto* column = plotted(*spec.x_attr);
        if (column->is_numeric()) {
            meta.x_range = extent(*column);
        } else {
            meta.x_domain_size = column->distinct_count();
        }
    }
    if (spec.y_attr) {
        meta.encodings.emplace_back("y", *spec.y_attr);
        const auto* column = plotted(*spec.y_attr);
        if (column->is_numeric()) meta.y_range = extent(*column);
    }
    if (spec.color_attr) {
        meta.encodings.emplace_back("color", *spec.color_attr);
        plotted(*spec.color_attr);
    }
    if (spec.identity_attr) meta.encodings.emplace_back("identity", *spec.identity_attr);
    for (const auto& attr : spec.tooltip_attrs) meta.encodings.emplace_back("tooltip", attr);
    for (const auto& attr : spec.hierarchy_attrs) {
        meta.encodings.emplace_back("hierarchy", attr);
        plotted(attr);
    }
    return meta;
}

auto serialize_spec(const ChartSpec& spec) -> json {
    auto nullable = [](const std::optional<std::string>& value) -> json {
        return value ? json(*value) : json(nullptr);
    };
    return json{
        {"id", spec.id},
        {"chartType", to_wire(spec.chart_type)},
        {"datasetId", spec.dataset_id},
        {"xAttr", nullable(spec.x_attr)},
        {"yAttr", nullable(spec.y_attr)},
        {"colorAttr", nullable(spec.color_attr)},
        {"identityAttr", nullable(spec.identity_attr)},
        {"tooltipAttrs", spec.tooltip_attrs},
        {"hierarchyAttrs", spec.hierarchy_attrs},
        {"title", spec.title},
    };
}

auto parse_spec(const json& doc) -> ChartSpec {
    if (!doc.is_object()) {
        fail("malformed_spec", "chart spec must be a JSON object");
    }
    reject_unknown(doc);
    auto type_it = doc.find("chartType");
    if (type_it == doc.end() || !type_it->is_string()) {
        fail("malformed_spec", "chartType is required", "chartType");
    }
    auto type = parse_chart_type(type_it->get<std::string>());
    if (!type) {
        fail("unknown_chart_type", "unknown chart type '" + type_it->get<std::string>() + "'", "chartType");
    }
    ChartSpec spec;
    spec.chart_type = *type;
    auto text_field = [&](const char* key) {
        auto it = doc.find(key);
        if (it == doc.end() || it->is_null()) return std::string{};
        if (!it->is_string()) fail("malformed_spec", std::string(key) + " must be a string", key);
        return it->get<std::string>();
    };
    spec.id = text_field("id");
    spec.dataset_id = text_field("datasetId");
    spec.title = text_field("title");
    spec.x_attr = optional_string(doc, "xAttr");
    spec.y_attr = optional_string(doc, "yAttr");
    spec.color_attr = optional_string(doc, "colorAttr");
    spec.identity_attr = optional_string(doc, "identityAttr");
    spec.tooltip_attrs = string_list(doc, "tooltipAttrs");
    spec.hierarchy_attrs = string_list(doc, "hierarchyAttrs");

    auto missing = [&](const char* wire_field) {
        fail("missing_encoding",
             std::string(wire_field) + " is required for chart type '" + std::string(to_wire(spec.chart_type)) + "'",
             wire_field);
    };
    if (spec.chart_type == ChartType::sunburst) {
        if (spec.hierarchy_attrs.empty()) missing("hierarchyAttrs");
    } else if (!spec.x_attr) {
        missing("xAttr");
    }
    if (!spec.y_attr) missing("yAttr");
    if (spec.chart_type == ChartType::stacked_bar && !spec.color_attr) missing("colorAttr");
    return spec;
}

auto parse_spec_text(std::string_view text) -> ChartSpec {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("malformed_spec", std::string("chart spec is not valid JSON: ") + e.what());
    }
    return parse_spec(doc);
}

auto metadata_to_json(const ChartMetadata& metadata) -> json {
    json encodings = json::array();
    for (const auto& [channel, column] : metadata.encodings) {
        encodings.push_back(json{{"channel", channel}, {"column", column}});
    }
    return json{
        {"chartType", to_wire(metadata.chart_type)},
        {"encodings", std::move(encodings)},
        {"identity", metadata.identity ? json(*metadata.identity) : json(nullptr)},
        {"xRange", range_json(metadata.x_range)},
        {"yRange", range_json(metadata.y_range)},
        {"xDomainSize", metadata.x_domain_size},
        {"rowCount", metadata.row_count},
    };
}

auto metadata_from_json(const json& doc) -> ChartMetadata {
    ChartMetadata meta;
    auto type = parse_chart_type(doc.at("chartType").get<std::string>());
    if (!type) fail("unknown_chart_type", "unknown chart type in metadata");
    meta.chart_type = *type;
    for (const auto& item : doc.at("encodings")) {
        meta.encodings.emplace_back(item.at("channel").get<std::string>(), item.at("column").get<std::string>());
    }
    if (!doc.at("identity").is_null()) meta.identity = doc.at("identity").get<std::string>();
    meta.x_range = range_from(doc, "xRange");
    meta.y_range = range_from(doc, "yRange");
    meta.x_domain_size = doc.value("xDomainSize", std::size_t{0});
    meta.row_count = doc.value("rowCount", std::size_t{0});
    return meta;
}

}  // namespace weaver::chart
