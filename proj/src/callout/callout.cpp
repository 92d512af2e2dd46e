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

#include "weaver/callout/callout.hpp"

#include "weaver/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

namespace weaver::callout {

using chart::ChartType;
using nlohmann::json;
using tabular::AttrType;

namespace {

constexpr std::pair<CalloutKind, std::string_view> kKindNames[] = {
    {CalloutKind::brush2d, "brush2d"},
    {CalloutKind::brush1d_x, "brush1dX"},
    {CalloutKind::discrete_click, "discreteClick"},
    {CalloutKind::legend_click, "legendClick"},
    {CalloutKind::add_trendline, "addTrendline"},
    {CalloutKind::timeframe_brush, "timeframeBrush"},
    {CalloutKind::line_select, "lineSelect"},
    {CalloutKind::temporal_point_click, "temporalPointClick"},
    {CalloutKind::segment_select, "segmentSelect"},
    {CalloutKind::sunburst_click, "sunburstClick"},
    {CalloutKind::sunburst_chain, "sunburstChain"},
};

[[noreturn]] void invalid(const std::string& message, std::string field = {}) {
    fail("invalid_callout", message, std::move(field));
}

auto is_brush(CalloutKind kind) -> bool {
    return kind == CalloutKind::brush2d || kind == CalloutKind::brush1d_x || kind == CalloutKind::timeframe_brush;
}

auto is_click(CalloutKind kind) -> bool {
    return kind == CalloutKind::discrete_click || kind == CalloutKind::temporal_point_click;
}

auto bound_json(const Bound& bound) -> json {
    if (const auto* number = std::get_if<double>(&bound)) return *number;
    return std::get<std::string>(bound);
}

auto bound_from(const json& doc) -> Bound {
    if (doc.is_number()) return doc.get<double>();
    if (doc.is_string()) return doc.get<std::string>();
    invalid("range bounds must be numbers or strings");
}

auto range_from(const json& doc, const char* axis) -> AxisRange {
    if (!doc.is_array() || doc.size() != 2) {
        invalid(std::string("value range for ") + axis + " must be a [low, high] pair", axis);
    }
    return {bound_from(doc[0]), bound_from(doc[1])};
}

auto pixels_from(const json& doc, const char* axis) -> PixelRange {
    if (!doc.is_array() || doc.size() != 2 || !doc[0].is_number() || !doc[1].is_number()) {
        invalid(std::string("coordinate range for ") + axis + " must be a numeric pair", axis);
    }
    return {doc[0].get<double>(), doc[1].get<double>()};
}

// Resolves a bound to a position on the axis: the numeric value (or time key) for
// numeric axes, the first-appearance index for categorical axes.
class Axis {
public:
    Axis(const tabular::Column& column) : column_(column) {
        if (column.type() == AttrType::categorical) {
            auto domain = column.domain();
            for (std::size_t i = 0; i < domain.size(); ++i) {
                index_.emplace(std::get<std::string>(domain[i]), static_cast<double>(i));
            }
        }
    }

    [[nodiscard]] auto position(const Bound& bound, const char* field) const -> double {
        if (column_.type() == AttrType::categorical) {
            const auto* label = std::get_if<std::string>(&bound);
            if (!label) invalid("categorical axis '" + column_.name() + "' needs category bounds", field);
            auto it = index_.find(*label);
            if (it == index_.end()) invalid("'" + *label + "' is not a category of '" + column_.name() + "'", field);
            return it->second;
        }
        if (const auto* number = std::get_if<double>(&bound)) {
            if (!std::isfinite(*number)) invalid("range bounds must be finite", field);
            return *number;
        }
        const auto& text = std::get<std::string>(bound);
        if (column_.type() == AttrType::temporal) {
            if (auto key = tabular::parse_time(text)) return *key;
        }
        invalid("bound '" + text + "' is not a value of axis '" + column_.name() + "'", field);
    }

    [[nodiscard]] auto row_position(std::size_t row) const -> double {
        if (column_.type() == AttrType::categorical) {
            if (column_.is_null(row)) return std::nan("");
            return index_.at(std::get<std::string>(column_.cell(row)));
        }
        return column_.numeric(row);
    }

private:
    const tabular::Column& column_;
    std::unordered_map<std::string, double> index_;
};

auto required(const std::optional<std::string>& attr, const char* what) -> const std::string& {
    if (!attr) invalid(std::string("chart has no ") + what);
    return *attr;
}

auto legend_attr(const chart::ChartSpec& spec) -> std::string {
    if (spec.color_attr) return *spec.color_attr;
    if (spec.chart_type == ChartType::bar && spec.x_attr) return *spec.x_attr;
    invalid("chart has no legend (color encoding)");
}

void filter_range(std::vector<std::size_t>& rows, const Axis& axis, const AxisRange& range, const char* field) {
    double low = axis.position(range.low, field);
    double high = axis.position(range.high, field);
    if (low > high) invalid(std::string(field) + " range must be ordered low <= high", field);
    std::erase_if(rows, [&](std::size_t r) {
        double v = axis.row_position(r);
        return std::isnan(v) || v < low || v > high;
    });
}

auto matches_path(const chart::ChartSpec& spec, const tabular::Dataset& dataset, std::size_t row,
                  const std::vector<std::string>& path) -> bool {
    for (std::size_t level = 0; level < path.size(); ++level) {
        const auto& column = dataset.column(spec.hierarchy_attrs[level]);
        if (column.is_null(row) || std::get<std::string>(column.cell(row)) != path[level]) return false;
    }
    return true;
}

void check_path(const chart::ChartSpec& spec, const std::vector<std::string>& path, const char* field) {
    if (path.empty()) invalid("sunburst path must not be empty", field);
    if (path.size() > spec.hierarchy_attrs.size()) invalid("sunburst path is deeper than the hierarchy", field);
}

}  // namespace

auto to_wire(CalloutKind kind) -> std::string_view {
    for (const auto& [value, name] : kKindNames) {
        if (value == kind) return name;
    }
    return "brush2d";
}

auto parse_kind(std::string_view wire) -> std::optional<CalloutKind> {
    for (const auto& [value, name] : kKindNames) {
        if (name == wire) return value;
    }
    return std::nullopt;
}

auto legal_callouts(ChartType type) -> std::vector<CalloutKind> {
    switch (type) {
        case ChartType::scatterplot:
            return {CalloutKind::brush2d, CalloutKind::discrete_click, CalloutKind::legend_click,
                    CalloutKind::add_trendline};
        case ChartType::bar:
            return {CalloutKind::discrete_click, CalloutKind::legend_click, CalloutKind::brush1d_x};
        case ChartType::line:
            return {CalloutKind::timeframe_brush, CalloutKind::line_select, CalloutKind::temporal_point_click};
        case ChartType::stacked_bar:
            return {CalloutKind::legend_click, CalloutKind::segment_select};
        case ChartType::pie_donut:
            return {CalloutKind::discrete_click};
        case ChartType::sunburst:
            return {CalloutKind::sunburst_click, CalloutKind::sunburst_chain};
    }
    return {};
}

auto is_legal(ChartType type, CalloutKind kind) -> bool {
    auto kinds = legal_callouts(type);
    return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

auto callout_to_json(const Callout& callout) -> json {
    json doc{{"chartId", callout.chart_id}, {"kind", to_wire(callout.kind)}};
    const auto kind = callout.kind;
    if (is_brush(kind)) {
        json values = json::object();
        if (callout.x_range) values["x"] = json::array({bound_json(callout.x_range->low), bound_json(callout.x_range->high)});
        if (callout.y_range) values["y"] = json::array({bound_json(callout.y_range->low), bound_json(callout.y_range->high)});
        doc["valueRange"] = std::move(values);
        if (callout.x_pixels || callout.y_pixels) {
            json coords = json::object();
            if (callout.x_pixels) coords["x"] = json::array({callout.x_pixels->from, callout.x_pixels->to});
            if (callout.y_pixels) coords["y"] = json::array({callout.y_pixels->from, callout.y_pixels->to});
            doc["coordRange"] = std::move(coords);
        }
    } else if (is_click(kind)) {
        doc["rowKeys"] = callout.row_keys;
    } else if (kind == CalloutKind::legend_click || kind == CalloutKind::line_select) {
        doc["categories"] = callout.categories;
    } else if (kind == CalloutKind::segment_select) {
        json segments = json::array();
        for (const auto& s : callout.segments) segments.push_back(json{{"bar", s.bar}, {"segment", s.segment}});
        doc["segments"] = std::move(segments);
    } else if (kind == CalloutKind::sunburst_click) {
        doc["paths"] = callout.paths;
    } else if (kind == CalloutKind::sunburst_chain) {
        doc["path"] = callout.path;
    }
    return doc;
}

auto callout_from_json(const json& doc) -> Callout {
    if (!doc.is_object()) fail("malformed_callout", "callout must be a JSON object");
    auto kind_it = doc.find("kind");
    if (kind_it == doc.end() || !kind_it->is_string()) fail("malformed_callout", "callout kind is required", "kind");
    auto kind = parse_kind(kind_it->get<std::string>());
    if (!kind) fail("unknown_callout_kind", "unknown callout kind '" + kind_it->get<std::string>() + "'", "kind");

    std::vector<std::string_view> allowed{"chartId", "kind"};
    if (is_brush(*kind)) {
        allowed.insert(allowed.end(), {"valueRange", "coordRange"});
    } else if (is_click(*kind)) {
        allowed.push_back("rowKeys");
    } else if (*kind == CalloutKind::legend_click || *kind == CalloutKind::line_select) {
        allowed.push_back("categories");
    } else if (*kind == CalloutKind::segment_select) {
        allowed.push_back("segments");
    } else if (*kind == CalloutKind::sunburst_click) {
        allowed.push_back("paths");
    } else if (*kind == CalloutKind::sunburst_chain) {
        allowed.push_back("path");
    }
    for (const auto& item : doc.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw Error(ErrorKind::invalid, "unknown_field",
                        "field '" + item.key() + "' is not valid for callout kind '" + std::string(to_wire(*kind)) + "'",
                        item.key());
        }
    }

    Callout callout;
    callout.kind = *kind;
    try {
        callout.chart_id = doc.value("chartId", std::string{});
        if (auto it = doc.find("valueRange"); it != doc.end()) {
            if (it->contains("x")) callout.x_range = range_from(it->at("x"), "x");
            if (it->contains("y")) callout.y_range = range_from(it->at("y"), "y");
        }
        if (auto it = doc.find("coordRange"); it != doc.end()) {
            if (it->contains("x")) callout.x_pixels = pixels_from(it->at("x"), "x");
            if (it->contains("y")) callout.y_pixels = pixels_from(it->at("y"), "y");
        }
        if (auto it = doc.find("rowKeys"); it != doc.end()) callout.row_keys = it->get<std::vector<std::size_t>>();
        if (auto it = doc.find("categories"); it != doc.end()) callout.categories = it->get<std::vector<std::string>>();
        if (auto it = doc.find("segments"); it != doc.end()) {
            for (const auto& item : *it) {
                callout.segments.push_back({item.at("bar").get<std::string>(), item.at("segment").get<std::string>()});
            }
        }
        if (auto it = doc.find("paths"); it != doc.end()) {
            callout.paths = it->get<std::vector<std::vector<std::string>>>();
        }
        if (auto it = doc.find("path"); it != doc.end()) callout.path = it->get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        fail("malformed_callout", std::string("malformed callout: ") + e.what());
    }
    return callout;
}

auto select_rows(const Callout& callout, const chart::ChartSpec& spec, const tabular::Dataset& dataset)
    -> std::vector<std::size_t> {
    if (!callout.chart_id.empty() && !spec.id.empty() && callout.chart_id != spec.id) {
        invalid("callout targets chart '" + callout.chart_id + "' but was applied to '" + spec.id + "'", "chartId");
    }
    if (!is_legal(spec.chart_type, callout.kind)) {
        fail("illegal_callout",
             "callout '" + std::string(to_wire(callout.kind)) + "' is not available on a " +
                 std::string(chart::to_wire(spec.chart_type)) + " chart",
             "kind");
    }
    std::vector<std::size_t> rows(dataset.row_count());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;

    switch (callout.kind) {
        case CalloutKind::brush2d: {
            if (!callout.x_range || !callout.y_range) invalid("brush2d needs x and y value ranges", "valueRange");
            filter_range(rows, Axis(dataset.column(required(spec.x_attr, "x encoding"))), *callout.x_range, "x");
            filter_range(rows, Axis(dataset.column(required(spec.y_attr, "y encoding"))), *callout.y_range, "y");
            break;
        }
        case CalloutKind::brush1d_x:
        case CalloutKind::timeframe_brush: {
            if (!callout.x_range) invalid("brush needs an x value range", "valueRange");
            if (callout.y_range) invalid("one-dimensional brush takes no y range", "valueRange");
            filter_range(rows, Axis(dataset.column(required(spec.x_attr, "x encoding"))), *callout.x_range, "x");
            break;
        }
        case CalloutKind::discrete_click:
        case CalloutKind::temporal_point_click: {
            if (callout.row_keys.empty()) invalid("click needs at least one row key", "rowKeys");
            std::set<std::size_t> keys;
            for (std::size_t key : callout.row_keys) {
                if (key >= dataset.row_count()) invalid("row key " + std::to_string(key) + " is out of range", "rowKeys");
                keys.insert(key);
            }
            rows.assign(keys.begin(), keys.end());
            break;
        }
        case CalloutKind::legend_click:
        case CalloutKind::line_select: {
            if (callout.categories.empty()) invalid("selection needs at least one category", "categories");
            std::string attr = callout.kind == CalloutKind::line_select ? required(spec.color_attr, "series encoding")
                                                                        : legend_attr(spec);
            const auto& column = dataset.column(attr);
            std::set<std::string> wanted(callout.categories.begin(), callout.categories.end());
            std::erase_if(rows, [&](std::size_t r) { return column.is_null(r) || !wanted.count(column.label(r)); });
            break;
        }
        case CalloutKind::add_trendline: {
            const auto& x = dataset.column(required(spec.x_attr, "x encoding"));
            const auto& y = dataset.column(required(spec.y_attr, "y encoding"));
            std::erase_if(rows, [&](std::size_t r) { return x.is_null(r) || y.is_null(r); });
            break;
        }
        case CalloutKind::segment_select: {
            if (callout.segments.empty()) invalid("segment selection needs at least one segment", "segments");
            const auto& x = dataset.column(required(spec.x_attr, "x encoding"));
            const auto& color = dataset.column(required(spec.color_attr, "color encoding"));
            std::erase_if(rows, [&](std::size_t r) {
                if (x.is_null(r) || color.is_null(r)) return true;
                auto bar = x.label(r);
                auto segment = color.label(r);
                return std::none_of(callout.segments.begin(), callout.segments.end(),
                                    [&](const SegmentRef& s) { return s.bar == bar && s.segment == segment; });
            });
            break;
        }
        case CalloutKind::sunburst_click: {
            if (callout.paths.empty()) invalid("sunburst click needs at least one node path", "paths");
            for (const auto& path : callout.paths) check_path(spec, path, "paths");
            std::erase_if(rows, [&](std::size_t r) {
                return std::none_of(callout.paths.begin(), callout.paths.end(),
                                    [&](const auto& path) { return matches_path(spec, dataset, r, path); });
            });
            break;
        }
        case CalloutKind::sunburst_chain: {
            check_path(spec, callout.path, "path");
            std::erase_if(rows, [&](std::size_t r) { return !matches_path(spec, dataset, r, callout.path); });
            break;
        }
    }
    return rows;
}

auto resolve_callout(const Callout& callout, const chart::ChartSpec& spec,
                     std::shared_ptr<const tabular::Dataset> dataset) -> Resolution {
    auto rows = select_rows(callout, spec, *dataset);
    if (rows.empty()) {
        return EmptySelection{callout, "the callout selects no data points"};
    }
    CalloutPackage package;
    package.selection = std::move(rows);
    for (const auto& column : dataset->columns()) {
        package.data_metadata.push_back({column.name(), column.type()});
    }
    package.chart_metadata = chart::derive_chart_metadata(spec, *dataset);
    package.interaction = callout;
    package.spec = spec;
    package.dataset = std::move(dataset);
    return package;
}

auto package_to_json(const CalloutPackage& package) -> json {
    json data = json::array();
    for (const auto& attr : package.data_metadata) {
        data.push_back(json{{"name", attr.name}, {"type", tabular::to_string(attr.type)}});
    }
    return json{
        {"selection", package.selection},
        {"dataMetadata", std::move(data)},
        {"chartMetadata", chart::metadata_to_json(package.chart_metadata)},
        {"interaction", callout_to_json(package.interaction)},
    };
}

}  // namespace weaver::callout
