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

#include "weaver/tabular/dataset.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace weaver::chart {

enum class ChartType { scatterplot, bar, line, stacked_bar, pie_donut, sunburst };

inline constexpr ChartType kAllChartTypes[] = {ChartType::scatterplot, ChartType::bar,       ChartType::line,
                                               ChartType::stacked_bar, ChartType::pie_donut, ChartType::sunburst};

// Wire names: "scatterplot", "bar", "line", "stackedBar", "pieDonut", "sunburst".
auto to_wire(ChartType type) -> std::string_view;
auto parse_chart_type(std::string_view wire) -> std::optional<ChartType>;
// Human label used in narrative text ("scatterplot", "bar chart", ...).
auto display_name(ChartType type) -> std::string_view;

struct ChartSpec {
    std::string id;
    ChartType chart_type = ChartType::scatterplot;
    std::string dataset_id;
    std::optional<std::string> x_attr;
    std::optional<std::string> y_attr;
    std::optional<std::string> color_attr;
    std::optional<std::string> identity_attr;
    std::vector<std::string> tooltip_attrs;
    std::vector<std::string> hierarchy_attrs;  // sunburst only, root first
    std::string title;

    friend auto operator==(const ChartSpec&, const ChartSpec&) -> bool = default;
};

struct Violation {
    std::string field;  // snake_case field name, e.g. "y_attr"
    std::string rule;   // e.g. "must be quantitative"

    [[nodiscard]] auto message() const -> std::string { return field + " " + rule; }
    friend auto operator==(const Violation&, const Violation&) -> bool = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] auto ok() const -> bool { return violations.empty(); }
    [[nodiscard]] auto messages() const -> std::vector<std::string>;
};

auto validate_spec(const ChartSpec& spec, const tabular::Dataset& dataset) -> ValidationReport;

struct NumericRange {
    double min = 0.0;
    double max = 0.0;

    friend auto operator==(const NumericRange&, const NumericRange&) -> bool = default;
};

struct ChartMetadata {
    ChartType chart_type = ChartType::scatterplot;
    // channel -> column, in channel order x, y, color, identity, tooltip..., hierarchy...
    std::vector<std::pair<std::string, std::string>> encodings;
    std::optional<std::string> identity;
    std::optional<NumericRange> x_range;  // numeric (quantitative / temporal) x only
    std::optional<NumericRange> y_range;
    std::size_t x_domain_size = 0;  // distinct x categories for categorical x
    std::size_t row_count = 0;

    [[nodiscard]] auto encoding(std::string_view channel) const -> std::optional<std::string>;
    friend auto operator==(const ChartMetadata&, const ChartMetadata&) -> bool = default;
};

// Throws invalid_spec when the spec does not validate, no_plottable_values when an
// encoded column holds only nulls.
auto derive_chart_metadata(const ChartSpec& spec, const tabular::Dataset& dataset) -> ChartMetadata;

auto serialize_spec(const ChartSpec& spec) -> nlohmann::json;
// Errors: malformed_spec, unknown_field, unknown_chart_type, missing_encoding.
auto parse_spec(const nlohmann::json& doc) -> ChartSpec;
auto parse_spec_text(std::string_view text) -> ChartSpec;

auto metadata_to_json(const ChartMetadata& metadata) -> nlohmann::json;
auto metadata_from_json(const nlohmann::json& doc) -> ChartMetadata;

}  // namespace weaver::chart
