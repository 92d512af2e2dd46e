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

#include "weaver/facts/taxonomy.hpp"

#include <algorithm>
#include <array>

namespace weaver::facts {

namespace {

using chart::ChartType;
using callout::CalloutKind;

constexpr std::array<std::string_view, 29> kFamilyWire{
    "summary_stats",          "frequency",
    "group_vs_global",        "group_vs_group",
    "rank",                   "rank_extreme",
    "values",                 "outliers",
    "difference",             "trend",
    "start_end",              "extreme_points",
    "range",                  "compare_lines",
    "compare_to_others",      "value_rank_individuals",
    "compare_selected_date",  "position_relative_to_trend",
    "correlation",            "trendline",
    "proportions",            "compare_proportions",
    "sum_proportion",         "hierarchical_proportions",
    "chained_proportion",     "joint_contribution",
    "joint_relationship_to_others", "comparison_to_each_other",
    "compare_individuals_to_group",
};

constexpr FamilyEntry on(Family f) { return {f, true}; }
constexpr FamilyEntry off(Family f) { return {f, false}; }

constexpr FamilyEntry kScatterBrush[] = {on(Family::summary_stats), on(Family::frequency),
                                         on(Family::group_vs_global), on(Family::rank), on(Family::values)};
constexpr FamilyEntry kScatterClick[] = {on(Family::values),        on(Family::outliers),
                                         on(Family::rank),          on(Family::summary_stats),
                                         off(Family::group_vs_global), on(Family::frequency)};
constexpr FamilyEntry kLegend[] = {on(Family::summary_stats),   on(Family::frequency),     on(Family::rank),
                                   on(Family::group_vs_global), on(Family::group_vs_group), on(Family::outliers),
                                   on(Family::values)};
constexpr FamilyEntry kScatterTrendline[] = {on(Family::correlation), on(Family::trendline)};
constexpr FamilyEntry kBarClick[] = {on(Family::values), on(Family::rank_extreme), on(Family::difference),
                                     on(Family::summary_stats)};
constexpr FamilyEntry kBarBrush[] = {on(Family::summary_stats), on(Family::frequency), on(Family::rank),
                                     on(Family::group_vs_global), on(Family::values)};
constexpr FamilyEntry kLineTimeframe[] = {on(Family::trend), on(Family::start_end), on(Family::extreme_points),
                                          on(Family::range), on(Family::difference)};
constexpr FamilyEntry kLineSelect[] = {on(Family::trend), on(Family::compare_lines), off(Family::compare_to_others)};
constexpr FamilyEntry kLinePoint[] = {off(Family::value_rank_individuals), off(Family::compare_selected_date),
                                      off(Family::position_relative_to_trend)};
constexpr FamilyEntry kStackedLegend[] = {off(Family::joint_contribution), off(Family::joint_relationship_to_others),
                                          off(Family::comparison_to_each_other),
                                          off(Family::compare_individuals_to_group)};
constexpr FamilyEntry kStackedSegment[] = {on(Family::proportions), on(Family::compare_proportions)};
constexpr FamilyEntry kPieClick[] = {on(Family::proportions), on(Family::compare_proportions),
                                     on(Family::sum_proportion)};
constexpr FamilyEntry kSunburstClick[] = {on(Family::proportions), on(Family::compare_proportions),
                                          on(Family::hierarchical_proportions)};
constexpr FamilyEntry kSunburstChain[] = {on(Family::chained_proportion)};

}  // namespace

auto to_wire(Family family) -> std::string_view { return kFamilyWire[static_cast<std::size_t>(family)]; }

auto parse_family(std::string_view wire) -> std::optional<Family> {
    for (std::size_t i = 0; i < kFamilyWire.size(); ++i) {
        if (kFamilyWire[i] == wire) return static_cast<Family>(i);
    }
    return std::nullopt;
}

auto cell_families(ChartType chart, CalloutKind kind) -> std::span<const FamilyEntry> {
    switch (chart) {
        case ChartType::scatterplot:
            if (kind == CalloutKind::brush2d) return kScatterBrush;
            if (kind == CalloutKind::discrete_click) return kScatterClick;
            if (kind == CalloutKind::legend_click) return kLegend;
            if (kind == CalloutKind::add_trendline) return kScatterTrendline;
            break;
        case ChartType::bar:
            if (kind == CalloutKind::discrete_click) return kBarClick;
            if (kind == CalloutKind::legend_click) return kLegend;
            if (kind == CalloutKind::brush1d_x) return kBarBrush;
            break;
        case ChartType::line:
            if (kind == CalloutKind::timeframe_brush) return kLineTimeframe;
            if (kind == CalloutKind::line_select) return kLineSelect;
            if (kind == CalloutKind::temporal_point_click) return kLinePoint;
            break;
        case ChartType::stacked_bar:
            if (kind == CalloutKind::legend_click) return kStackedLegend;
            if (kind == CalloutKind::segment_select) return kStackedSegment;
            break;
        case ChartType::pie_donut:
            if (kind == CalloutKind::discrete_click) return kPieClick;
            break;
        case ChartType::sunburst:
            if (kind == CalloutKind::sunburst_click) return kSunburstClick;
            if (kind == CalloutKind::sunburst_chain) return kSunburstChain;
            break;
    }
    return {};
}

auto family_fact_types(Family family) -> std::vector<FactType> {
    switch (family) {
        case Family::summary_stats: return {FactType::summary_stats};
        case Family::frequency: return {FactType::frequency};
        case Family::group_vs_global: return {FactType::group_vs_global};
        case Family::group_vs_group: return {FactType::group_vs_group};
        case Family::rank:
        case Family::rank_extreme: return {FactType::rank, FactType::extreme};
        case Family::values: return {FactType::values};
        case Family::outliers: return {FactType::outlier};
        case Family::difference: return {FactType::difference};
        case Family::trend:
        case Family::start_end:
        case Family::range: return {FactType::trend};
        case Family::extreme_points: return {FactType::extreme};
        case Family::compare_lines: return {FactType::line_comparison};
        case Family::correlation: return {FactType::correlation};
        case Family::trendline: return {FactType::trendline};
        case Family::proportions:
        case Family::compare_proportions:
        case Family::sum_proportion:
        case Family::hierarchical_proportions: return {FactType::proportion};
        case Family::chained_proportion: return {FactType::chained_proportion};
        default: return {};
    }
}

auto fact_type_order(ChartType chart, CalloutKind kind) -> std::vector<FactType> {
    std::vector<FactType> order;
    auto add = [&order](FactType type) {
        if (std::find(order.begin(), order.end(), type) == order.end()) order.push_back(type);
    };
    for (const auto& entry : cell_families(chart, kind)) {
        if (!entry.implemented) continue;
        for (FactType type : family_fact_types(entry.family)) add(type);
    }
    for (FactType type : kAllFactTypes) add(type);
    return order;
}

}  // namespace weaver::facts
