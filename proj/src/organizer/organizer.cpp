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

#include "weaver/organizer/organizer.hpp"

#include "weaver/common/error.hpp"
#include "weaver/facts/kernels.hpp"
#include "weaver/facts/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace weaver::organizer {

using facts::DataFact;
using facts::FactType;

void ScoringConfig::validate() const {
    for (double w : {w_dev, w_ratio, w_prom, w_entropy}) {
        if (!(w >= 0.0)) fail("invalid_scoring_config", "weights must be non-negative");
    }
    if (std::abs(w_dev + w_ratio + w_prom + w_entropy - 1.0) > 1e-12) {
        fail("invalid_scoring_config", "weights must sum to 1");
    }
    if (!(ratio_cap > 0.0) || !(epsilon > 0.0)) fail("invalid_scoring_config", "ratio cap and epsilon must be positive");
}

auto score_frequency_terms(double p_sel, double p_glob, double entropy, std::size_t k, const ScoringConfig& config)
    -> double {
    const double deviation = std::abs(p_sel - p_glob);
    const double ratio = std::min(p_sel / std::max(p_glob, config.epsilon), config.ratio_cap) / config.ratio_cap;
    const double concentration = k <= 1 ? 1.0 : 1.0 - entropy / std::log(static_cast<double>(k));
    const double score = config.w_dev * deviation + config.w_ratio * ratio + config.w_prom * p_sel +
                         config.w_entropy * concentration;
    return std::clamp(score, 0.0, 1.0);
}

auto score_frequency_fact(double p_sel, double p_glob, std::span<const double> distribution,
                          const ScoringConfig& config) -> double {
    return score_frequency_terms(p_sel, p_glob, kernels::entropy(distribution), distribution.size(), config);
}

namespace {

auto need(const DataFact& fact, std::string_view key) -> double {
    auto v = fact.signal(key);
    if (!v) {
        fail("unscorable_fact", "fact " + fact.id + " lacks the " + std::string(key) + " signal");
    }
    return *v;
}

auto percent_score(const DataFact& fact) -> double {
    auto pct = fact.signal("pctDiff");
    if (!pct) return 0.0;
    return std::min(std::abs(*pct) / 100.0, 1.0);
}

}  // namespace

auto score_generic_fact(const DataFact& fact) -> double {
    switch (fact.type) {
        case FactType::frequency:
            fail("unscorable_fact", "frequency facts are scored with score_frequency_fact");
        case FactType::outlier: {
            double beyond = need(fact, "beyond");
            double iqr = need(fact, "iqr");
            if (iqr <= 0.0) return beyond > 0.0 ? 1.0 : 0.0;
            return std::min(beyond / iqr, 3.0) / 3.0;
        }
        case FactType::rank:
        case FactType::extreme: {
            if (!fact.signal("rank")) return std::min(std::abs(need(fact, "normSlope")), 1.0);
            double rank = need(fact, "rank");
            double total = need(fact, "total");
            if (total <= 0.0) return 0.0;
            return std::clamp(1.0 - (rank - 1.0) / total, 0.0, 1.0);
        }
        case FactType::trend:
            return std::min(std::abs(need(fact, "normSlope")), 1.0);
        case FactType::correlation:
        case FactType::trendline:
            return std::min(std::abs(need(fact, "r")), 1.0);
        case FactType::difference:
        case FactType::group_vs_global:
        case FactType::group_vs_group:
        case FactType::line_comparison:
            return percent_score(fact);
        case FactType::proportion:
        case FactType::chained_proportion:
            return std::clamp(need(fact, "share"), 0.0, 1.0);
        case FactType::values:
        case FactType::summary_stats:
            return 0.1;
    }
    fail("unscorable_fact", "unknown fact type");
}

void score_facts(std::vector<DataFact>& facts, const ScoringConfig& config) {
    config.validate();
    for (auto& fact : facts) {
        if (fact.type == FactType::frequency) {
            fact.score = score_frequency_terms(need(fact, "pSel"), need(fact, "pGlob"), need(fact, "entropy"),
                                               static_cast<std::size_t>(need(fact, "k")), config);
        } else {
            fact.score = score_generic_fact(fact);
        }
    }
}

auto FactHierarchy::fact_count() const -> std::size_t {
    std::size_t n = stat_facts.size();
    for (const auto& g : groups) {
        for (const auto& a : g.attributes) n += a.facts.size();
    }
    return n;
}

auto FactHierarchy::group_order() const -> std::vector<FactType> {
    std::vector<FactType> out;
    for (const auto& g : groups) out.push_back(g.type);
    return out;
}

auto leaf_less(const DataFact& a, const DataFact& b) -> bool {
    if (a.score != b.score) return a.score > b.score;
    if (a.template_text != b.template_text) return a.template_text < b.template_text;
    return a.id < b.id;
}

auto organize(std::vector<DataFact> facts, facts::StatTable stat_table, const OrganizeContext& context)
    -> FactHierarchy {
    FactHierarchy out;
    out.stat_table = std::move(stat_table);
    auto column_rank = [&context](const std::string& attr) {
        auto it = std::find(context.column_order.begin(), context.column_order.end(), attr);
        return static_cast<std::size_t>(it - context.column_order.begin());
    };
    auto attribute_key = [](const DataFact& f) {
        std::string key;
        for (const auto& a : f.attributes) key += (key.empty() ? "" : " & ") + a;
        return key;
    };

    std::map<FactType, std::map<std::string, std::vector<DataFact>>> buckets;
    std::map<std::string, std::size_t> key_rank;
    for (auto& fact : facts) {
        if (fact.type == FactType::summary_stats) {
            out.stat_facts.push_back(std::move(fact));
            continue;
        }
        auto key = attribute_key(fact);
        key_rank[key] = fact.attributes.empty() ? context.column_order.size() : column_rank(fact.attributes.front());
        buckets[fact.type][key].push_back(std::move(fact));
    }
    std::sort(out.stat_facts.begin(), out.stat_facts.end(), leaf_less);

    for (FactType type : facts::fact_type_order(context.chart_type, context.kind)) {
        auto it = buckets.find(type);
        if (it == buckets.end()) continue;
        FactTypeGroup group{type, {}};
        for (auto& [key, leaf] : it->second) {
            std::sort(leaf.begin(), leaf.end(), leaf_less);
            group.attributes.push_back({key, std::move(leaf)});
        }
        std::stable_sort(group.attributes.begin(), group.attributes.end(), [&](const auto& a, const auto& b) {
            if (key_rank[a.attribute] != key_rank[b.attribute]) return key_rank[a.attribute] < key_rank[b.attribute];
            return a.attribute < b.attribute;
        });
        out.groups.push_back(std::move(group));
    }
    return out;
}

auto truncate(const FactHierarchy& hierarchy, std::size_t k) -> FactHierarchy {
    FactHierarchy out = hierarchy;
    if (out.stat_facts.size() > k) out.stat_facts.resize(k);
    for (auto& g : out.groups) {
        for (auto& a : g.attributes) {
            if (a.facts.size() > k) a.facts.resize(k);
        }
    }
    return out;
}

auto hierarchy_to_json(const FactHierarchy& hierarchy) -> nlohmann::ordered_json {
    auto leaf = [](const std::vector<DataFact>& facts) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : facts) arr.push_back(facts::fact_to_json(f));
        return arr;
    };
    nlohmann::json stat = facts::stat_table_to_json(hierarchy.stat_table);
    stat["facts"] = leaf(hierarchy.stat_facts);
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : hierarchy.groups) {
        nlohmann::json attrs = nlohmann::json::array();
        for (const auto& a : g.attributes) attrs.push_back({{"attribute", a.attribute}, {"facts", leaf(a.facts)}});
        groups.push_back({{"factType", facts::to_wire(g.type)},
                          {"label", facts::display_name(g.type)},
                          {"attributeGroups", std::move(attrs)}});
    }
    nlohmann::ordered_json out;
    out["statTable"] = nlohmann::ordered_json::parse(stat.dump());
    out["factTypeGroups"] = nlohmann::ordered_json::parse(groups.dump());
    return out;
}

auto hierarchy_from_json(const nlohmann::ordered_json& ordered) -> FactHierarchy {
    try {
        const auto doc = nlohmann::json::parse(ordered.dump());
        FactHierarchy out;
        out.stat_table = facts::stat_table_from_json(doc.at("statTable"));
        for (const auto& f : doc.at("statTable").value("facts", nlohmann::json::array())) {
            out.stat_facts.push_back(facts::fact_from_json(f));
        }
        for (const auto& g : doc.at("factTypeGroups")) {
            auto type = facts::parse_fact_type(g.at("factType").get<std::string>());
            if (!type) fail("malformed_hierarchy", "unknown factType");
            FactTypeGroup group{*type, {}};
            for (const auto& a : g.at("attributeGroups")) {
                AttributeGroup ag{a.at("attribute").get<std::string>(), {}};
                for (const auto& f : a.at("facts")) ag.facts.push_back(facts::fact_from_json(f));
                group.attributes.push_back(std::move(ag));
            }
            out.groups.push_back(std::move(group));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        fail("malformed_hierarchy", e.what());
    }
}

}  // namespace weaver::organizer
