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

#include "weaver/facts/fact.hpp"

#include "weaver/common/error.hpp"
#include "weaver/facts/templates.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace weaver::facts {

namespace {

constexpr std::array<std::pair<FactType, std::string_view>, 15> kWire{{
    {FactType::summary_stats, "summary_stats"},
    {FactType::frequency, "frequency"},
    {FactType::rank, "rank"},
    {FactType::extreme, "extreme"},
    {FactType::values, "values"},
    {FactType::outlier, "outlier"},
    {FactType::group_vs_global, "group_vs_global"},
    {FactType::group_vs_group, "group_vs_group"},
    {FactType::difference, "difference"},
    {FactType::trend, "trend"},
    {FactType::correlation, "correlation"},
    {FactType::trendline, "trendline"},
    {FactType::proportion, "proportion"},
    {FactType::chained_proportion, "chained_proportion"},
    {FactType::line_comparison, "line_comparison"},
}};

constexpr std::array<std::string_view, 15> kDisplay{
    "Summary Statistics", "Frequency",  "Rank",        "Extreme",    "Values",
    "Outliers",           "Group vs. Global", "Group vs. Group", "Difference", "Trend",
    "Correlation",        "Trendline",  "Proportion",  "Chained Proportion", "Line Comparison",
};

auto summary_to_json(const kernels::Summary& s) -> nlohmann::json {
    return {{"count", s.count}, {"mean", s.mean}, {"median", s.median},
            {"min", s.min},     {"max", s.max},   {"std", s.std}};
}

auto summary_from_json(const nlohmann::json& doc) -> kernels::Summary {
    kernels::Summary s;
    s.count = doc.at("count").get<std::size_t>();
    s.mean = doc.at("mean").get<double>();
    s.median = doc.at("median").get<double>();
    s.min = doc.at("min").get<double>();
    s.max = doc.at("max").get<double>();
    s.std = doc.at("std").get<double>();
    return s;
}

}  // namespace

auto to_wire(FactType type) -> std::string_view { return kWire[static_cast<std::size_t>(type)].second; }

auto parse_fact_type(std::string_view wire) -> std::optional<FactType> {
    for (const auto& [type, name] : kWire) {
        if (name == wire) return type;
    }
    return std::nullopt;
}

auto display_name(FactType type) -> std::string_view { return kDisplay[static_cast<std::size_t>(type)]; }

auto DataFact::number(std::string_view key) const -> std::optional<double> {
    auto it = payload.find(std::string(key));
    if (it == payload.end()) return std::nullopt;
    if (const auto* v = std::get_if<double>(&it->second)) return *v;
    return std::nullopt;
}

auto DataFact::text(std::string_view key) const -> std::optional<std::string> {
    auto it = payload.find(std::string(key));
    if (it == payload.end()) return std::nullopt;
    if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
    return std::nullopt;
}

auto DataFact::signal(std::string_view key) const -> std::optional<double> {
    auto it = signals.find(std::string(key));
    if (it == signals.end()) return std::nullopt;
    return it->second;
}

auto DataFact::formatted_numbers() const -> std::vector<std::string> {
    std::vector<std::string> out;
    for (const auto& [key, value] : payload) {
        if (std::holds_alternative<double>(value)) out.push_back(render_payload_value(key, value));
    }
    return out;
}

auto fact_to_json(const DataFact& fact) -> nlohmann::json {
    nlohmann::json payload = nlohmann::json::object();
    for (const auto& [key, value] : fact.payload) {
        if (const auto* number = std::get_if<double>(&value)) {
            payload[key] = *number;
        } else {
            payload[key] = std::get<std::string>(value);
        }
    }
    nlohmann::json doc{
        {"id", fact.id},
        {"factType", to_wire(fact.type)},
        {"family", fact.family},
        {"attributes", fact.attributes},
        {"payload", std::move(payload)},
        {"templateText", fact.template_text},
        {"score", fact.score},
        {"sourceNode", fact.source_node},
        {"provenance", fact.provenance ? callout::callout_to_json(*fact.provenance) : nlohmann::json(nullptr)},
        {"signals", fact.signals},
    };
    return doc;
}

auto fact_from_json(const nlohmann::json& doc) -> DataFact {
    if (!doc.is_object()) fail("malformed_fact", "fact must be an object");
    try {
        DataFact fact;
        fact.id = doc.value("id", std::string());
        auto type = parse_fact_type(doc.at("factType").get<std::string>());
        if (!type) fail("malformed_fact", "unknown factType", "factType");
        fact.type = *type;
        fact.family = doc.value("family", std::string());
        fact.attributes = doc.at("attributes").get<std::vector<std::string>>();
        for (const auto& [key, value] : doc.at("payload").items()) {
            if (value.is_number()) {
                fact.payload.emplace(key, value.get<double>());
            } else if (value.is_string()) {
                fact.payload.emplace(key, value.get<std::string>());
            } else {
                fail("malformed_fact", "payload values must be numbers or text", "payload." + key);
            }
        }
        fact.template_text = doc.at("templateText").get<std::string>();
        fact.score = doc.value("score", 0.0);
        fact.source_node = doc.value("sourceNode", std::string());
        if (doc.contains("provenance") && !doc.at("provenance").is_null()) {
            fact.provenance = callout::callout_from_json(doc.at("provenance"));
        }
        if (doc.contains("signals")) fact.signals = doc.at("signals").get<std::map<std::string, double>>();
        return fact;
    } catch (const nlohmann::json::exception& e) {
        fail("malformed_fact", e.what());
    }
}

auto StatTable::find(std::string_view attribute) const -> const StatRow* {
    for (const auto& row : rows) {
        if (row.attribute == attribute) return &row;
    }
    return nullptr;
}

auto stat_table_to_json(const StatTable& table) -> nlohmann::json {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"attribute", row.attribute},
                        {"selection", summary_to_json(row.selection)},
                        {"global", summary_to_json(row.global)}});
    }
    return {{"rows", std::move(rows)}};
}

auto stat_table_from_json(const nlohmann::json& doc) -> StatTable {
    try {
        StatTable table;
        for (const auto& row : doc.at("rows")) {
            table.rows.push_back({row.at("attribute").get<std::string>(), summary_from_json(row.at("selection")),
                                  summary_from_json(row.at("global"))});
        }
        return table;
    } catch (const nlohmann::json::exception& e) {
        fail("malformed_stat_table", e.what());
    }
}

}  // namespace weaver::facts
