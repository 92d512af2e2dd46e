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

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <vector>

namespace weaver::organizer {

struct ScoringConfig {
    double w_dev = 0.4;
    double w_ratio = 0.3;
    double w_prom = 0.2;
    double w_entropy = 0.1;
    double ratio_cap = 10.0;
    double epsilon = 1e-9;
    std::size_t top_k = 8;  // per leaf list, applied by truncate()

    // Errors: invalid_scoring_config (negative weight, weights not summing to 1).
    void validate() const;
};

// Blend of deviation, capped ratio, prominence and selection concentration.
// `distribution` holds the selection share of every global category.
auto score_frequency_fact(double p_sel, double p_glob, std::span<const double> distribution,
                          const ScoringConfig& config = {}) -> double;

// Same blend with the entropy of the distribution precomputed (natural log)
// over k categories.
auto score_frequency_terms(double p_sel, double p_glob, double entropy, std::size_t k,
                           const ScoringConfig& config = {}) -> double;

// Family-specific score for non-frequency facts. Errors: unscorable_fact for
// frequency facts or facts missing the signals their family needs.
auto score_generic_fact(const facts::DataFact& fact) -> double;

// Sets the score of every fact.
void score_facts(std::vector<facts::DataFact>& facts, const ScoringConfig& config = {});

struct AttributeGroup {
    std::string attribute;  // "x & y" for two-attribute facts
    std::vector<facts::DataFact> facts;
};

struct FactTypeGroup {
    facts::FactType type;
    std::vector<AttributeGroup> attributes;
};

// The stat table leads; summary-stat facts form its own leaf list.
struct FactHierarchy {
    facts::StatTable stat_table;
    std::vector<facts::DataFact> stat_facts;
    std::vector<FactTypeGroup> groups;

    [[nodiscard]] auto fact_count() const -> std::size_t;
    [[nodiscard]] auto group_order() const -> std::vector<facts::FactType>;
};

struct OrganizeContext {
    chart::ChartType chart_type = chart::ChartType::scatterplot;
    callout::CalloutKind kind = callout::CalloutKind::brush2d;
    std::vector<std::string> column_order;  // dataset column order
};

// Leaf order: score descending, then template text, then id.
auto leaf_less(const facts::DataFact& a, const facts::DataFact& b) -> bool;

// Facts are expected to be scored already.
auto organize(std::vector<facts::DataFact> facts, facts::StatTable stat_table, const OrganizeContext& context)
    -> FactHierarchy;

// Keeps at most k facts per leaf list.
auto truncate(const FactHierarchy& hierarchy, std::size_t k) -> FactHierarchy;

// Key order is kept: "statTable" first, then "factTypeGroups".
auto hierarchy_to_json(const FactHierarchy& hierarchy) -> nlohmann::ordered_json;
auto hierarchy_from_json(const nlohmann::ordered_json& doc) -> FactHierarchy;

}  // namespace weaver::organizer
