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

#include <string>
#include <variant>
#include <vector>

namespace weaver::tabular {

enum class Comparator { eq, ne, lt, le, gt, ge, in, contains };
enum class AggregateFn { sum, mean, count, min, max };
enum class SortDirection { ascending, descending };

auto to_string(Comparator op) -> std::string_view;
auto to_string(AggregateFn fn) -> std::string_view;

struct FilterStep {
    std::string column;
    Comparator op = Comparator::eq;
    nlohmann::json literal;  // scalar, or an array for `in`

    friend auto operator==(const FilterStep&, const FilterStep&) -> bool = default;
};

// Output columns: the group_by columns followed by the measure result, named
// `output` or "<fn>_<measure>" when empty. Groups appear in first-seen order.
struct AggregateStep {
    std::vector<std::string> group_by;
    std::string measure;
    AggregateFn fn = AggregateFn::sum;
    std::string output;

    [[nodiscard]] auto output_name() const -> std::string;
    friend auto operator==(const AggregateStep&, const AggregateStep&) -> bool = default;
};

// Arithmetic over columns: + - * / and parentheses, numbers, bare identifiers or
// [bracketed names], and pct_of_total(expr) / pct_of_total(expr, group_column).
// Division by zero yields null.
struct DeriveStep {
    std::string column;
    std::string expression;

    friend auto operator==(const DeriveStep&, const DeriveStep&) -> bool = default;
};

struct SortStep {
    std::string column;
    SortDirection direction = SortDirection::ascending;

    friend auto operator==(const SortStep&, const SortStep&) -> bool = default;
};

struct LimitStep {
    std::size_t n = 1;

    friend auto operator==(const LimitStep&, const LimitStep&) -> bool = default;
};

using Step = std::variant<FilterStep, AggregateStep, DeriveStep, SortStep, LimitStep>;

struct DataOperationPlan {
    std::string source_dataset;
    std::vector<Step> steps;

    friend auto operator==(const DataOperationPlan&, const DataOperationPlan&) -> bool = default;
};

auto plan_to_json(const DataOperationPlan& plan) -> nlohmann::json;
// Throws malformed_plan / unknown_field on shape errors.
auto plan_from_json(const nlohmann::json& doc) -> DataOperationPlan;

// Empty when the plan is executable against `dataset`; otherwise one message per problem.
auto validate_plan(const DataOperationPlan& plan, const Dataset& dataset) -> std::vector<std::string>;

// Runs the steps in order and returns a new dataset; `dataset` is untouched.
// Errors: unknown_column, type_mismatch, invalid_plan.
auto execute_plan(const DataOperationPlan& plan, const Dataset& dataset) -> Dataset;

}  // namespace weaver::tabular
