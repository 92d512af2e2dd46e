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
#include "weaver/chart/spec.hpp"
#include "weaver/tabular/dataset.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace weaver::testing {

// Small gapminder-shaped table: country, continent, year, lifeExp, gdpPercap, pop.
// Gabon is an outlier in lifeExp among the African rows.
auto gapminder_csv() -> std::string;
auto gapminder() -> std::shared_ptr<const tabular::Dataset>;

// Random table with the same columns as gapminder plus "sex"; rows countries x years.
auto random_gapminder(std::uint32_t seed, std::size_t countries, std::size_t years)
    -> std::shared_ptr<const tabular::Dataset>;

// Hierarchical sales table: region, country, city, sales.
auto sales() -> std::shared_ptr<const tabular::Dataset>;
auto random_sales(std::uint32_t seed, std::size_t rows) -> std::shared_ptr<const tabular::Dataset>;

auto scatter_spec(const tabular::Dataset& ds) -> chart::ChartSpec;  // gdpPercap x lifeExp, color continent
auto bar_spec(const tabular::Dataset& ds) -> chart::ChartSpec;      // country x pop
auto line_spec(const tabular::Dataset& ds) -> chart::ChartSpec;     // year x lifeExp by continent
auto stacked_spec(const tabular::Dataset& ds) -> chart::ChartSpec;  // year x pop by continent
auto pie_spec(const tabular::Dataset& ds) -> chart::ChartSpec;      // continent x pop
auto sunburst_spec(const tabular::Dataset& ds) -> chart::ChartSpec; // region > country > city, sales

// Resolves and unwraps a callout that is expected to select rows.
auto package(const callout::Callout& callout, const chart::ChartSpec& spec,
             std::shared_ptr<const tabular::Dataset> dataset) -> callout::CalloutPackage;

}  // namespace weaver::testing
