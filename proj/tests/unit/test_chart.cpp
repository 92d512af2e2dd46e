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
#include "weaver/chart/spec.hpp"
#include "weaver/common/error.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>

using namespace weaver;
using namespace weaver::chart;

namespace {

auto code_of(const auto& fn) -> std::string {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

auto has(const ValidationReport& report, const std::string& message) -> bool {
    auto m = report.messages();
    return std::find(m.begin(), m.end(), message) != m.end();
}

}  // namespace

TEST_CASE("validate_spec reports field and rule", "[chart]") {
    auto ds = testing::gapminder();
    auto spec = testing::scatter_spec(*ds);
    CHECK(validate_spec(spec, *ds).ok());
    spec.y_attr = "continent";
    CHECK(has(validate_spec(spec, *ds), "y_attr must be quantitative"));
}

TEST_CASE("line over (year, count) validates", "[chart]") {
    auto ds = std::make_shared<tabular::Dataset>(tabular::load_dataset("year,count\n2000,3\n2001,5\n", "c"));
    ChartSpec spec{"v", ChartType::line, ds->id(), "year", "count", {}, {}, {}, {}, "t"};
    CHECK(validate_spec(spec, *ds).ok());
}

TEST_CASE("sunburst needs two hierarchy levels", "[chart]") {
    auto ds = testing::sales();
    auto spec = testing::sunburst_spec(*ds);
    CHECK(validate_spec(spec, *ds).ok());
    spec.hierarchy_attrs = {"region"};
    CHECK_FALSE(validate_spec(spec, *ds).ok());
}

TEST_CASE("every fixture spec validates", "[chart]") {
    auto ds = testing::gapminder();
    for (const auto& spec : {testing::scatter_spec(*ds), testing::bar_spec(*ds), testing::line_spec(*ds),
                             testing::stacked_spec(*ds), testing::pie_spec(*ds)}) {
        INFO(spec.id);
        CHECK(validate_spec(spec, *ds).ok());
        CHECK_NOTHROW(derive_chart_metadata(spec, *ds));
    }
}

TEST_CASE("metadata ranges equal a min/max scan", "[chart][oracle]") {
    for (std::uint32_t seed = 1; seed <= 10; ++seed) {
        auto ds = testing::random_gapminder(seed, 30, 3);
        auto meta = derive_chart_metadata(testing::scatter_spec(*ds), *ds);
        double lo = 1e300, hi = -1e300;
        for (std::size_t r = 0; r < ds->row_count(); ++r) {
            lo = std::min(lo, ds->column("gdpPercap").numeric(r));
            hi = std::max(hi, ds->column("gdpPercap").numeric(r));
        }
        REQUIRE(meta.x_range);
        CHECK(meta.x_range->min == lo);
        CHECK(meta.x_range->max == hi);
        CHECK(meta.encoding("color") == std::optional<std::string>("continent"));
    }
}

TEST_CASE("x over 1..10 gives range [1,10]", "[chart]") {
    std::string csv = "x,y\n";
    for (int i = 10; i >= 1; --i) csv += std::to_string(i) + "," + std::to_string(i * i) + "\n";
    auto ds = tabular::load_dataset(csv, "r");
    ChartSpec spec{"v", ChartType::scatterplot, ds.id(), "x", "y", {}, {}, {}, {}, ""};
    auto meta = derive_chart_metadata(spec, ds);
    CHECK(meta.x_range == NumericRange{1, 10});
}

TEST_CASE("all-null encoded column has no plottable values", "[chart]") {
    auto ds = tabular::load_dataset("x,y\n1,NA\n2,NA\n", "n", {std::nullopt, {{"y", tabular::AttrType::quantitative}}});
    ChartSpec spec{"v", ChartType::scatterplot, ds.id(), "x", "y", {}, {}, {}, {}, ""};
    CHECK(code_of([&] { derive_chart_metadata(spec, ds); }) == "no_plottable_values");
}

TEST_CASE("spec JSON round trip and errors", "[chart]") {
    auto ds = testing::gapminder();
    std::mt19937 rng(3);
    std::vector<ChartSpec> corpus{testing::scatter_spec(*ds), testing::bar_spec(*ds), testing::line_spec(*ds),
                                  testing::stacked_spec(*ds), testing::pie_spec(*ds),
                                  testing::sunburst_spec(*testing::sales())};
    for (int i = 0; i < 50; ++i) {
        auto spec = corpus[static_cast<std::size_t>(i) % corpus.size()];
        spec.title = "t" + std::to_string(rng());
        if (i % 3 == 0) spec.tooltip_attrs = {"pop"};
        CHECK(parse_spec(serialize_spec(spec)) == spec);
        CHECK(parse_spec_text(serialize_spec(spec).dump()) == spec);
    }
    auto doc = serialize_spec(testing::bar_spec(*ds));
    doc["chartType"] = "heatmap";
    CHECK(code_of([&] { parse_spec(doc); }) == "unknown_chart_type");
    doc = serialize_spec(testing::bar_spec(*ds));
    doc.erase("yAttr");
    CHECK(code_of([&] { parse_spec(doc); }) == "missing_encoding");
    doc = serialize_spec(testing::bar_spec(*ds));
    doc["sizeAttr"] = "pop";
    CHECK(code_of([&] { parse_spec(doc); }) == "unknown_field");
    CHECK(code_of([&] { parse_spec_text("{nope"); }) == "malformed_spec");
}
