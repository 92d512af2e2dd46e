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
#include "weaver/facts/kernels.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace weaver::facts {

enum class FactType {
    summary_stats,
    frequency,
    rank,
    extreme,
    values,
    outlier,
    group_vs_global,
    group_vs_group,
    difference,
    trend,
    correlation,
    trendline,
    proportion,
    chained_proportion,
    line_comparison,
};

inline constexpr FactType kAllFactTypes[] = {
    FactType::summary_stats,   FactType::frequency,      FactType::rank,        FactType::extreme,
    FactType::values,          FactType::outlier,        FactType::group_vs_global, FactType::group_vs_group,
    FactType::difference,      FactType::trend,          FactType::correlation, FactType::trendline,
    FactType::proportion,      FactType::chained_proportion, FactType::line_comparison,
};

auto to_wire(FactType type) -> std::string_view;
auto parse_fact_type(std::string_view wire) -> std::optional<FactType>;
auto display_name(FactType type) -> std::string_view;

using PayloadValue = std::variant<double, std::string>;

struct DataFact {
    std::string id;
    FactType type = FactType::values;
    std::string family;  // taxonomy family that produced the fact
    std::vector<std::string> attributes;
    std::map<std::string, PayloadValue> payload;
    std::string template_text;
    double score = 0.0;
    std::string source_node;
    std::optional<callout::Callout> provenance;
    // Unrendered quantities the organizer scores with (shares, fences, slopes).
    std::map<std::string, double> signals;

    [[nodiscard]] auto number(std::string_view key) const -> std::optional<double>;
    [[nodiscard]] auto text(std::string_view key) const -> std::optional<std::string>;
    [[nodiscard]] auto signal(std::string_view key) const -> std::optional<double>;
    // Every numeric payload entry rendered the way templates render it.
    [[nodiscard]] auto formatted_numbers() const -> std::vector<std::string>;

    friend auto operator==(const DataFact&, const DataFact&) -> bool = default;
};

auto fact_to_json(const DataFact& fact) -> nlohmann::json;
auto fact_from_json(const nlohmann::json& doc) -> DataFact;

struct StatRow {
    std::string attribute;
    kernels::Summary selection;
    kernels::Summary global;

    friend auto operator==(const StatRow&, const StatRow&) -> bool = default;
};

// One row per quantitative attribute, in dataset column order.
struct StatTable {
    std::vector<StatRow> rows;

    [[nodiscard]] auto empty() const -> bool { return rows.empty(); }
    [[nodiscard]] auto find(std::string_view attribute) const -> const StatRow*;
    friend auto operator==(const StatTable&, const StatTable&) -> bool = default;
};

auto stat_table_to_json(const StatTable& table) -> nlohmann::json;
auto stat_table_from_json(const nlohmann::json& doc) -> StatTable;

}  // namespace weaver::facts
