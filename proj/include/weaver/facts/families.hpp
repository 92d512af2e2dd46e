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

#include "weaver/facts/fact.hpp"
#include "weaver/facts/kernels.hpp"
#include "weaver/facts/templates.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

// Fact families as standalone operations over plain values. Each returns
// facts with empty id, score, source node and provenance; the engine fills
// those in.
namespace weaver::facts {

struct FamilyOutcome {
    std::vector<DataFact> facts;
    std::optional<std::string> skip_reason;
};

struct LabeledValue {
    std::string label;
    double value = 0.0;
};

// One fact per (stat, attribute) cell: count, mean, median, min, max, std.
auto summary_stat_facts(const std::string& attr, const kernels::Summary& selection, const kernels::Summary& global,
                        const TemplateSet& templates = TemplateSet::builtin()) -> std::vector<DataFact>;

// One fact per global category, in first-appearance order of the global
// labels. Categories absent from the selection get a zero-share fact.
// Errors: empty_selection.
auto frequency_facts(const std::string& attr, std::span<const std::string> selection_labels,
                     std::span<const std::string> global_labels, const TemplateSet& templates = TemplateSet::builtin(),
                     kernels::Exec exec = kernels::Exec::serial) -> FamilyOutcome;

// Tukey fences over the population; flags the candidates outside them.
// Skipped when the population has fewer than 5 values.
auto detect_outliers(const std::string& attr, std::span<const double> population,
                     std::span<const LabeledValue> candidates, const TemplateSet& templates = TemplateSet::builtin())
    -> FamilyOutcome;

// Dense descending global rank per item, plus highest/lowest among the items
// when at least two are given.
auto rank_extreme_facts(const std::string& attr, std::span<const double> population,
                        std::span<const LabeledValue> items, const TemplateSet& templates = TemplateSet::builtin(),
                        kernels::Exec exec = kernels::Exec::serial) -> FamilyOutcome;

auto value_facts(const std::string& attr, std::span<const LabeledValue> items,
                 const TemplateSet& templates = TemplateSet::builtin()) -> std::vector<DataFact>;

// Mean of the selection against the mean of everything.
auto group_vs_global(const std::string& attr, std::span<const double> selection, std::span<const double> global,
                     const TemplateSet& templates = TemplateSet::builtin()) -> FamilyOutcome;

auto group_vs_group(const std::string& attr, const std::string& group_a, std::span<const double> values_a,
                    const std::string& group_b, std::span<const double> values_b,
                    const TemplateSet& templates = TemplateSet::builtin()) -> FamilyOutcome;

// Consecutive pairs in click order: n items give n-1 facts.
auto difference_facts(const std::string& attr, std::span<const LabeledValue> items,
                      const TemplateSet& templates = TemplateSet::builtin()) -> FamilyOutcome;

struct TimePoint {
    double key = 0.0;  // position on the time axis
    std::string time;  // label rendered in text
    double value = 0.0;
};

inline constexpr double kDefaultFlatThreshold = 0.05;

struct TrendOptions {
    double flat_threshold = kDefaultFlatThreshold;
    std::string series;  // empty for a single-series chart
};

// Normalized slope of an OLS fit over (point index, value).
auto normalized_slope(std::span<const TimePoint> sorted_points) -> double;

// Facts tagged with families trend, start_end, extreme_points, range and
// difference. Points are sorted by key first.
auto trend_facts(const std::string& attr, std::vector<TimePoint> points, const TrendOptions& options = {},
                 const TemplateSet& templates = TemplateSet::builtin()) -> FamilyOutcome;

struct UndefinedCorrelation {
    std::string reason;
};

using CorrelationOutcome = std::variant<std::vector<DataFact>, UndefinedCorrelation>;

auto correlation_strength(double r) -> std::string_view;

// Pearson r plus the least-squares trendline.
auto correlation_trendline(const std::string& x_attr, const std::string& y_attr, std::span<const double> xs,
                           std::span<const double> ys, const TemplateSet& templates = TemplateSet::builtin())
    -> CorrelationOutcome;

struct ProportionPart {
    std::string label;
    double value = 0.0;
    double whole = 0.0;
    std::string whole_label;  // empty: the whole is the overall total
    std::optional<double> parent_value;
    std::string parent_label;
};

// Errors: negative_value, zero_total.
auto proportion_share_facts(const std::string& measure, std::span<const ProportionPart> parts,
                            const TemplateSet& templates = TemplateSet::builtin()) -> std::vector<DataFact>;
auto proportion_compare_facts(const std::string& measure, std::span<const ProportionPart> parts,
                              const TemplateSet& templates = TemplateSet::builtin()) -> std::vector<DataFact>;
auto proportion_sum_fact(const std::string& measure, double selected_sum, double total,
                         const TemplateSet& templates = TemplateSet::builtin()) -> DataFact;

// Shares of each segment, pairwise comparisons when two or more are given and
// the sum-versus-total fact.
auto proportion_facts(const std::string& measure, std::span<const LabeledValue> segments, double total,
                      const TemplateSet& templates = TemplateSet::builtin()) -> std::vector<DataFact>;

// path holds the category labels root first; totals holds the measure total
// of the whole followed by the total at each hop. Errors: negative_value,
// zero_parent_total, invalid_path.
auto chained_proportion(const std::string& measure, std::span<const std::string> path,
                        std::span<const double> totals, const TemplateSet& templates = TemplateSet::builtin())
    -> DataFact;

struct Series {
    std::string label;
    std::vector<TimePoint> points;
};

// Means and end values of two series over their overlapping x range.
// Errors: no_overlap.
auto compare_series(const std::string& attr, const Series& a, const Series& b,
                    const TemplateSet& templates = TemplateSet::builtin()) -> DataFact;

// Per-series trend direction plus every pairwise comparison. Errors:
// too_few_series, no_overlap.
auto line_comparison(const std::string& attr, std::span<const Series> series,
                     const TemplateSet& templates = TemplateSet::builtin()) -> std::vector<DataFact>;

}  // namespace weaver::facts
