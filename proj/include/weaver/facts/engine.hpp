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
#include "weaver/facts/families.hpp"
#include "weaver/facts/kernels.hpp"
#include "weaver/facts/taxonomy.hpp"
#include "weaver/facts/templates.hpp"

#include <span>
#include <string>
#include <vector>

namespace weaver::facts {

enum class FamilyStatus { emitted, skipped, not_implemented };

auto to_wire(FamilyStatus status) -> std::string_view;

struct FamilyReport {
    Family family;
    FamilyStatus status;
    std::size_t fact_count = 0;
    std::string detail;  // skip reason
};

struct EngineOptions {
    kernels::Exec exec = kernels::Exec::parallel;
    double flat_threshold = kDefaultFlatThreshold;
    const TemplateSet* templates = nullptr;  // builtin when null
};

struct FactResult {
    std::vector<DataFact> facts;  // family order of the taxonomy cell, then attribute column order
    StatTable stat_table;
    std::vector<FamilyReport> reports;  // one per family of the cell, in cell order
};

// Attributes the engine works on: the chart's encoded columns plus the extra
// attributes of interest, in dataset column order.
auto processed_attributes(const callout::CalloutPackage& package, std::span<const std::string> attrs_of_interest)
    -> std::vector<std::string>;

// Errors: empty_selection, unknown_column, illegal_callout, not_implemented
// (a cell whose families are all unimplemented).
auto compute_facts(const callout::CalloutPackage& package, std::span<const std::string> attrs_of_interest = {},
                   const EngineOptions& options = {}) -> FactResult;

auto fact_result_to_json(const FactResult& result) -> nlohmann::json;

}  // namespace weaver::facts
