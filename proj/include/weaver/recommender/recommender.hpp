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
#include "weaver/tabular/plan.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace weaver::recommender {

inline constexpr std::size_t kMaxSamples = 3;
inline constexpr std::size_t kMaxRecommendations = 3;

struct ColumnSummary {
    std::string name;
    tabular::AttrType type = tabular::AttrType::categorical;
    std::size_t distinct_count = 0;
    std::vector<std::string> samples;  // first distinct non-null values in row order
    std::optional<double> min;         // quantitative only
    std::optional<double> max;

    friend auto operator==(const ColumnSummary&, const ColumnSummary&) -> bool = default;
};

struct DatasetSummary {
    std::string dataset_id;
    std::string name;
    std::size_t row_count = 0;
    std::vector<ColumnSummary> columns;

    friend auto operator==(const DatasetSummary&, const DatasetSummary&) -> bool = default;
};

using DatasetPtr = std::shared_ptr<const tabular::Dataset>;
using DatasetLookup = std::map<std::string, DatasetPtr, std::less<>>;

auto summarize_dataset(const tabular::Dataset& dataset) -> DatasetSummary;
// One summary per distinct dataset id, in first-seen order.
auto summarize_datasets(const std::vector<DatasetPtr>& datasets) -> std::vector<DatasetSummary>;

auto summary_to_json(const DatasetSummary& summary) -> nlohmann::json;
auto summary_from_json(const nlohmann::json& doc) -> DatasetSummary;

struct VisRecommendation {
    std::string rationale;
    tabular::DataOperationPlan plan;
    chart::ChartSpec spec;
    bool valid = false;
    std::vector<std::string> violations;

    friend auto operator==(const VisRecommendation&, const VisRecommendation&) -> bool = default;
};

auto recommendation_to_json(const VisRecommendation& rec) -> nlohmann::json;
// Reads {rationale, plan, spec}; valid/violations are recomputed by validation.
auto recommendation_from_json(const nlohmann::json& doc) -> VisRecommendation;

struct RecommendRequest {
    std::string selected_text;
    std::vector<DatasetSummary> summaries;
};

auto request_to_json(const RecommendRequest& request) -> nlohmann::json;

// Returns the raw response body: {"recommendations": [{rationale, plan, spec}, ...]}.
class RecommenderBackend {
public:
    virtual ~RecommenderBackend() = default;
    [[nodiscard]] virtual auto id() const -> std::string = 0;
    virtual auto propose(const RecommendRequest& request) -> std::string = 0;
};

// Offline keyword rules. Holds the datasets so category values can be matched
// against full column domains; summaries alone only carry samples.
class HeuristicBackend final : public RecommenderBackend {
public:
    explicit HeuristicBackend(DatasetLookup datasets) : datasets_(std::move(datasets)) {}
    [[nodiscard]] auto id() const -> std::string override { return "heuristic"; }
    auto propose(const RecommendRequest& request) -> std::string override;

private:
    DatasetLookup datasets_;
};

struct RecommendOutcome {
    std::vector<VisRecommendation> recommendations;
    std::optional<std::string> reason;  // set when the list is empty
    std::vector<std::string> dropped;    // entries that did not parse, with the reason
};

// Sets valid/violations: the plan must run on its source and the spec must
// validate against the plan output. A spec naming the source dataset is rebound
// to the derived dataset id.
void validate_recommendation(VisRecommendation& rec, const DatasetLookup& datasets);

// Errors: empty_text; backend failures as Error{upstream, recommender_failed}.
auto recommend(std::string_view selected_text, const std::vector<DatasetSummary>& summaries,
               RecommenderBackend& backend, const DatasetLookup& datasets) -> RecommendOutcome;

struct Materialized {
    DatasetPtr dataset;  // the source itself for an identity plan
    chart::ChartSpec spec;
    std::string source_text;
    tabular::DataOperationPlan plan;
};

// Errors: invalid_recommendation (not valid now or at recommendation time).
auto materialize(const VisRecommendation& rec, const DatasetLookup& datasets, std::string source_text = {})
    -> Materialized;

}  // namespace weaver::recommender
