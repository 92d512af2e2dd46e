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

#include "weaver/chart/spec.hpp"
#include "weaver/tabular/dataset.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace weaver::callout {

enum class CalloutKind {
    brush2d,
    brush1d_x,
    discrete_click,
    legend_click,
    add_trendline,
    timeframe_brush,
    line_select,
    temporal_point_click,
    segment_select,
    sunburst_click,
    sunburst_chain,
};

inline constexpr CalloutKind kAllKinds[] = {
    CalloutKind::brush2d,        CalloutKind::brush1d_x,       CalloutKind::discrete_click,
    CalloutKind::legend_click,   CalloutKind::add_trendline,   CalloutKind::timeframe_brush,
    CalloutKind::line_select,    CalloutKind::temporal_point_click, CalloutKind::segment_select,
    CalloutKind::sunburst_click, CalloutKind::sunburst_chain,
};

// Wire names: "brush2d", "brush1dX", "discreteClick", ...
auto to_wire(CalloutKind kind) -> std::string_view;
auto parse_kind(std::string_view wire) -> std::optional<CalloutKind>;

// The callout kinds each chart family supports, in taxonomy row order.
auto legal_callouts(chart::ChartType type) -> std::vector<CalloutKind>;
auto is_legal(chart::ChartType type, CalloutKind kind) -> bool;

// Numeric axes take numbers (temporal axes also accept ISO dates); categorical
// axes take category labels ordered by first appearance in the data.
using Bound = std::variant<double, std::string>;

struct AxisRange {
    Bound low;
    Bound high;
    friend auto operator==(const AxisRange&, const AxisRange&) -> bool = default;
};

// Renderer coordinates of a brush; carried as interaction metadata only.
struct PixelRange {
    double from = 0.0;
    double to = 0.0;
    friend auto operator==(const PixelRange&, const PixelRange&) -> bool = default;
};

struct SegmentRef {
    std::string bar;
    std::string segment;
    friend auto operator==(const SegmentRef&, const SegmentRef&) -> bool = default;
};

struct Callout {
    std::string chart_id;
    CalloutKind kind = CalloutKind::brush2d;
    std::optional<AxisRange> x_range;  // brushes
    std::optional<AxisRange> y_range;  // brush2d
    std::optional<PixelRange> x_pixels;
    std::optional<PixelRange> y_pixels;
    std::vector<std::size_t> row_keys;           // clicks, in click order
    std::vector<std::string> categories;         // legend_click, line_select
    std::vector<SegmentRef> segments;            // segment_select
    std::vector<std::vector<std::string>> paths;  // sunburst_click
    std::vector<std::string> path;               // sunburst_chain, root first

    friend auto operator==(const Callout&, const Callout&) -> bool = default;
};

auto callout_to_json(const Callout& callout) -> nlohmann::json;
// Errors: malformed_callout, unknown_field, unknown callout kind.
auto callout_from_json(const nlohmann::json& doc) -> Callout;

struct DataAttribute {
    std::string name;
    tabular::AttrType type;
    friend auto operator==(const DataAttribute&, const DataAttribute&) -> bool = default;
};

struct CalloutPackage {
    std::vector<std::size_t> selection;  // sorted row indices
    std::vector<DataAttribute> data_metadata;
    chart::ChartMetadata chart_metadata;
    Callout interaction;
    chart::ChartSpec spec;
    std::shared_ptr<const tabular::Dataset> dataset;
};

auto package_to_json(const CalloutPackage& package) -> nlohmann::json;

struct EmptySelection {
    Callout callout;
    std::string reason;
};

using Resolution = std::variant<CalloutPackage, EmptySelection>;

// Errors: illegal_callout (kind not supported by the chart type), invalid_callout
// (malformed parameters for the chart).
auto resolve_callout(const Callout& callout, const chart::ChartSpec& spec,
                     std::shared_ptr<const tabular::Dataset> dataset) -> Resolution;

// Row predicate behind a selection; exposed so callers can test membership.
auto select_rows(const Callout& callout, const chart::ChartSpec& spec, const tabular::Dataset& dataset)
    -> std::vector<std::size_t>;

}  // namespace weaver::callout
