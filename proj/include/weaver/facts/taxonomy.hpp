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
#include "weaver/facts/fact.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace weaver::facts {

// Fact families named by the callout taxonomy. Some are named but not
// implemented; dispatching to them reports not_implemented.
enum class Family {
    summary_stats,
    frequency,
    group_vs_global,
    group_vs_group,
    rank,
    rank_extreme,
    values,
    outliers,
    difference,
    trend,
    start_end,
    extreme_points,
    range,
    compare_lines,
    compare_to_others,
    value_rank_individuals,
    compare_selected_date,
    position_relative_to_trend,
    correlation,
    trendline,
    proportions,
    compare_proportions,
    sum_proportion,
    hierarchical_proportions,
    chained_proportion,
    joint_contribution,
    joint_relationship_to_others,
    comparison_to_each_other,
    compare_individuals_to_group,
};

auto to_wire(Family family) -> std::string_view;
auto parse_family(std::string_view wire) -> std::optional<Family>;

struct FamilyEntry {
    Family family;
    bool implemented;
};

// Families of the taxonomy cell for (chart type, callout kind), in row order.
// Empty when the callout is not legal for the chart type.
auto cell_families(chart::ChartType chart, callout::CalloutKind kind) -> std::span<const FamilyEntry>;

// Fact types a family emits.
auto family_fact_types(Family family) -> std::vector<FactType>;

// Fact-type group order for a cell: the cell's families in order, then the
// remaining fact types in canonical order.
auto fact_type_order(chart::ChartType chart, callout::CalloutKind kind) -> std::vector<FactType>;

}  // namespace weaver::facts
