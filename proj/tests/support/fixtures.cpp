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

#include "fixtures.hpp"

#include <fmt/format.h>

#include <random>
#include <stdexcept>

namespace weaver::testing {

auto gapminder_csv() -> std::string {
    return "country,continent,year,lifeExp,gdpPercap,pop\n"
           "Algeria,Africa,2007,57.3,6223.4,33333216\n"
           "Angola,Africa,2007,52.7,4797.2,12420476\n"
           "Benin,Africa,2007,56.7,1441.3,8078314\n"
           "Botswana,Africa,2007,53.7,12569.9,1639131\n"
           "Gabon,Africa,2007,72.0,13206.5,1454867\n"
           "Ghana,Africa,2007,55.0,1327.6,22873338\n"
           "Kenya,Africa,2007,54.1,1463.2,35610177\n"
           "Argentina,Americas,2007,75.3,12779.4,40301927\n"
           "Brazil,Americas,2007,72.4,9065.8,190010647\n"
           "Canada,Americas,2007,80.7,36319.2,33390141\n"
           "China,Asia,2007,73.0,4959.1,1318683096\n"
           "India,Asia,2007,64.7,2452.2,1110396331\n"
           "Japan,Asia,2007,82.6,31656.1,127467972\n"
           "France,Europe,2007,80.7,30470.0,61083916\n"
           "Germany,Europe,2007,79.4,32170.4,82400996\n"
           "Norway,Europe,2007,80.2,49357.2,4627926\n"
           "Australia,Oceania,2007,81.2,34435.4,20434176\n";
}

auto gapminder() -> std::shared_ptr<const tabular::Dataset> {
    return std::make_shared<const tabular::Dataset>(tabular::load_dataset(gapminder_csv(), "gapminder"));
}

auto random_gapminder(std::uint32_t seed, std::size_t countries, std::size_t years)
    -> std::shared_ptr<const tabular::Dataset> {
    static const char* const kContinents[] = {"Africa", "Americas", "Asia", "Europe", "Oceania"};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> life(35.0, 85.0);
    std::uniform_real_distribution<double> gdp(300.0, 50000.0);
    std::uniform_int_distribution<int> pop(100000, 90000000);
    std::uniform_int_distribution<int> pick(0, 4);
    std::string csv = "country,continent,year,lifeExp,gdpPercap,pop,sex\n";
    for (std::size_t c = 0; c < countries; ++c) {
        const char* continent = kContinents[pick(rng)];
        for (std::size_t y = 0; y < years; ++y) {
            csv += fmt::format("C{:03},{},{},{:.2f},{:.1f},{},{}\n", c, continent, 1952 + 5 * y, life(rng), gdp(rng),
                               pop(rng), (c + y) % 2 == 0 ? "female" : "male");
        }
    }
    return std::make_shared<const tabular::Dataset>(tabular::load_dataset(csv, fmt::format("random-{}", seed)));
}

auto sales() -> std::shared_ptr<const tabular::Dataset> {
    std::string csv =
        "region,country,city,sales\n"
        "Asia,China,Beijing,30\n"
        "Asia,China,Shanghai,20\n"
        "Asia,Japan,Tokyo,50\n"
        "Europe,France,Paris,40\n"
        "Europe,France,Lyon,10\n"
        "Europe,Germany,Berlin,25\n"
        "Europe,Germany,Munich,25\n";
    return std::make_shared<const tabular::Dataset>(tabular::load_dataset(csv, "sales"));
}

auto random_sales(std::uint32_t seed, std::size_t rows) -> std::shared_ptr<const tabular::Dataset> {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> region(0, 2);
    std::uniform_int_distribution<int> country(0, 3);
    std::uniform_int_distribution<int> city(0, 4);
    std::uniform_real_distribution<double> amount(0.0, 1000.0);
    std::string csv = "region,country,city,sales\n";
    for (std::size_t i = 0; i < rows; ++i) {
        int r = region(rng);
        int c = country(rng);
        csv += fmt::format("R{},R{}C{},R{}C{}T{},{:.3f}\n", r, r, c, r, c, city(rng), amount(rng));
    }
    return std::make_shared<const tabular::Dataset>(tabular::load_dataset(csv, fmt::format("sales-{}", seed)));
}

namespace {

auto base(const tabular::Dataset& ds, std::string id, chart::ChartType type) -> chart::ChartSpec {
    chart::ChartSpec spec;
    spec.id = std::move(id);
    spec.chart_type = type;
    spec.dataset_id = ds.id();
    return spec;
}

}  // namespace

auto scatter_spec(const tabular::Dataset& ds) -> chart::ChartSpec {
    auto spec = base(ds, "vis-scatter", chart::ChartType::scatterplot);
    spec.x_attr = "gdpPercap";
    spec.y_attr = "lifeExp";
    spec.color_attr = "continent";
    spec.identity_attr = "country";
    spec.title = "Life expectancy vs. GDP";
    return spec;
}

auto bar_spec(const tabular::Dataset& ds) -> chart::ChartSpec {
    auto spec = base(ds, "vis-bar", chart::ChartType::bar);
    spec.x_attr = "country";
    spec.y_attr = "pop";
    spec.identity_attr = "country";
    spec.title = "Population";
    return spec;
}

auto line_spec(const tabular::Dataset& ds) -> chart::ChartSpec {
    auto spec = base(ds, "vis-line", chart::ChartType::line);
    spec.x_attr = "year";
    spec.y_attr = "lifeExp";
    spec.color_attr = "continent";
    spec.title = "Life expectancy over time";
    return spec;
}

auto stacked_spec(const tabular::Dataset& ds) -> chart::ChartSpec {
    auto spec = base(ds, "vis-stacked", chart::ChartType::stacked_bar);
    spec.x_attr = "year";
    spec.y_attr = "pop";
    spec.color_attr = "continent";
    spec.title = "Population by continent";
    return spec;
}

auto pie_spec(const tabular::Dataset& ds) -> chart::ChartSpec {
    auto spec = base(ds, "vis-pie", chart::ChartType::pie_donut);
    spec.x_attr = "continent";
    spec.y_attr = "pop";
    spec.title = "Population share";
    return spec;
}

auto sunburst_spec(const tabular::Dataset& ds) -> chart::ChartSpec {
    auto spec = base(ds, "vis-sunburst", chart::ChartType::sunburst);
    spec.y_attr = "sales";
    spec.hierarchy_attrs = {"region", "country", "city"};
    spec.title = "Sales";
    return spec;
}

auto package(const callout::Callout& callout, const chart::ChartSpec& spec,
             std::shared_ptr<const tabular::Dataset> dataset) -> callout::CalloutPackage {
    auto resolution = callout::resolve_callout(callout, spec, std::move(dataset));
    if (auto* pkg = std::get_if<callout::CalloutPackage>(&resolution)) return *pkg;
    throw std::runtime_error("callout selected nothing: " + std::get<callout::EmptySelection>(resolution).reason);
}

}  // namespace weaver::testing
