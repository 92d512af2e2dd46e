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
#include "weaver/common/error.hpp"
#include "weaver/facts/engine.hpp"
#include "weaver/organizer/organizer.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace weaver;
using namespace weaver::organizer;
using facts::DataFact;
using facts::FactType;

namespace {

auto brushed(std::uint32_t seed) -> std::pair<facts::FactResult, callout::CalloutPackage> {
    auto ds = testing::random_gapminder(seed, 40, 3);
    auto spec = testing::scatter_spec(*ds);
    auto pkg = testing::package(callout::Callout{spec.id, callout::CalloutKind::brush2d,
                                                 callout::AxisRange{0.0, 25000.0}, callout::AxisRange{30.0, 70.0}},
                                spec, ds);
    std::vector<std::string> extra{"sex"};
    return {facts::compute_facts(pkg, extra), pkg};
}

auto context_of(const callout::CalloutPackage& pkg) -> OrganizeContext {
    OrganizeContext ctx{pkg.spec.chart_type, pkg.interaction.kind, {}};
    for (const auto& c : pkg.dataset->columns()) ctx.column_order.push_back(c.name());
    return ctx;
}

auto fact_with(FactType type, std::map<std::string, double> signals) -> DataFact {
    DataFact f;
    f.type = type;
    f.signals = std::move(signals);
    return f;
}

}  // namespace

TEST_CASE("frequency score worked examples", "[organizer]") {
    std::vector<double> uniform{0.5, 0.5};
    CHECK(score_frequency_fact(0.5, 0.5, uniform) == Catch::Approx(0.13).margin(1e-12));
    std::vector<double> concentrated(10, 0.0);
    concentrated[0] = 1.0;
    CHECK(score_frequency_fact(1.0, 0.1, concentrated) == Catch::Approx(0.96).margin(1e-12));
    // Zero share: ratio and prominence vanish; deviation plus the shared concentration term remain.
    std::vector<double> spread{0.5, 0.5, 0.0};
    double concentration = 1.0 - std::log(2.0) / std::log(3.0);
    CHECK(score_frequency_fact(0.0, 0.3, spread) == Catch::Approx(0.4 * 0.3 + 0.1 * concentration).margin(1e-12));
    std::vector<double> single{1.0};
    CHECK(score_frequency_fact(1.0, 1.0, single) == Catch::Approx(0.4 * 0 + 0.03 + 0.2 + 0.1).margin(1e-12));
}

TEST_CASE("frequency scores stay in [0,1]", "[organizer][property]") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; ++i) {
        std::size_t k = 1 + rng() % 12;
        std::vector<double> dist(k);
        double sum = 0;
        for (auto& d : dist) sum += (d = u(rng));
        for (auto& d : dist) d /= sum;
        double s = score_frequency_fact(dist[0], u(rng), dist);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("frequency score grows with deviation when the global share moves away", "[organizer][property]") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> dist{0.6, 0.4};
    for (int i = 0; i < 2000; ++i) {
        double p_sel = 0.6;
        double a = u(rng), b = u(rng);
        // Both global shares above the selection share: deviation grows with p_glob.
        double lo = p_sel + 0.4 * std::min(a, b), hi = p_sel + 0.4 * std::max(a, b);
        CHECK(score_frequency_fact(p_sel, hi, dist) >= score_frequency_fact(p_sel, lo, dist) - 1e-12);
    }
}

TEST_CASE("generic scores", "[organizer]") {
    CHECK(score_generic_fact(fact_with(FactType::rank, {{"rank", 1}, {"total", 40}})) == 1.0);
    CHECK(score_generic_fact(fact_with(FactType::correlation, {{"r", -0.82}})) == Catch::Approx(0.82));
    CHECK(score_generic_fact(fact_with(FactType::outlier, {{"beyond", 0}, {"iqr", 4}})) == 0.0);
    CHECK(score_generic_fact(fact_with(FactType::outlier, {{"beyond", 40}, {"iqr", 4}})) == 1.0);
    CHECK(score_generic_fact(fact_with(FactType::trend, {{"normSlope", -0.5}})) == 0.5);
    CHECK(score_generic_fact(fact_with(FactType::difference, {{"pctDiff", 250}})) == 1.0);
    CHECK(score_generic_fact(fact_with(FactType::proportion, {{"share", 0.25}})) == 0.25);
    CHECK(score_generic_fact(fact_with(FactType::values, {})) == 0.1);
    CHECK_THROWS_AS(score_generic_fact(fact_with(FactType::frequency, {})), Error);
}

TEST_CASE("config validation", "[organizer]") {
    ScoringConfig bad;
    bad.w_dev = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_NOTHROW(ScoringConfig{}.validate());
}

TEST_CASE("scatter brush group order", "[organizer]") {
    auto [result, pkg] = brushed(3);
    score_facts(result.facts);
    auto h = organize(result.facts, result.stat_table, context_of(pkg));
    auto order = h.group_order();
    auto pos = [&order](FactType t) { return std::find(order.begin(), order.end(), t) - order.begin(); };
    CHECK(pos(FactType::frequency) < pos(FactType::group_vs_global));
    CHECK(pos(FactType::group_vs_global) < pos(FactType::rank));
    CHECK(pos(FactType::rank) < pos(FactType::values));
    CHECK_FALSE(h.stat_table.empty());
    CHECK(h.fact_count() == result.facts.size());
    auto doc = hierarchy_to_json(h);
    CHECK(doc.begin().key() == "statTable");
    CHECK(hierarchy_from_json(doc).fact_count() == h.fact_count());
}

TEST_CASE("leaf lists are sorted and facts appear once", "[organizer]") {
    auto [result, pkg] = brushed(4);
    score_facts(result.facts);
    auto h = organize(result.facts, result.stat_table, context_of(pkg));
    std::set<std::string> seen;
    for (const auto& f : h.stat_facts) CHECK(seen.insert(f.id).second);
    for (const auto& g : h.groups) {
        for (const auto& a : g.attributes) {
            CHECK(std::is_sorted(a.facts.begin(), a.facts.end(), leaf_less));
            for (const auto& f : a.facts) CHECK(seen.insert(f.id).second);
        }
    }
    CHECK(seen.size() == result.facts.size());
    auto top = truncate(h, 8);
    for (const auto& g : top.groups) {
        for (const auto& a : g.attributes) CHECK(a.facts.size() <= 8);
    }
}

TEST_CASE("organize is permutation invariant", "[organizer][property]") {
    auto [result, pkg] = brushed(5);
    score_facts(result.facts);
    auto ctx = context_of(pkg);
    auto base = hierarchy_to_json(organize(result.facts, result.stat_table, ctx)).dump();
    std::mt19937 rng(5);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(result.facts.begin(), result.facts.end(), rng);
        CHECK(hierarchy_to_json(organize(result.facts, result.stat_table, ctx)).dump() == base);
    }
}

TEST_CASE("empty fact list keeps the stat table only", "[organizer]") {
    auto [result, pkg] = brushed(6);
    auto h = organize({}, result.stat_table, context_of(pkg));
    CHECK(h.groups.empty());
    CHECK(h.stat_table == result.stat_table);
}

TEST_CASE("scaling raw values keeps frequency scores and rank order", "[organizer][property]") {
    auto ds = testing::random_gapminder(7, 30, 2);
    auto doubled = [](const tabular::Dataset& src) {
        std::string csv = "country,continent,year,lifeExp,gdpPercap,pop,sex\n";
        for (std::size_t r = 0; r < src.row_count(); ++r) {
            csv += src.column("country").label(r) + "," + src.column("continent").label(r) + "," +
                   tabular::value_text(src.column("year").cell(r)) + "," + std::to_string(src.column("lifeExp").numeric(r) * 3) + "," +
                   std::to_string(src.column("gdpPercap").numeric(r) * 3) + "," + tabular::value_text(src.column("pop").cell(r)) + "," +
                   src.column("sex").label(r) + "\n";
        }
        return std::make_shared<const tabular::Dataset>(tabular::load_dataset(csv, "scaled"));
    };
    auto big = doubled(*ds);
    auto run = [](std::shared_ptr<const tabular::Dataset> d, double scale) {
        auto spec = testing::scatter_spec(*d);
        auto pkg = testing::package(callout::Callout{spec.id, callout::CalloutKind::brush2d,
                                                     callout::AxisRange{0.0, 20000.0 * scale},
                                                     callout::AxisRange{0.0, 60.0 * scale}},
                                    spec, d);
        auto res = facts::compute_facts(pkg);
        score_facts(res.facts);
        return res.facts;
    };
    auto a = run(ds, 1.0);
    auto b = run(big, 3.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].type == FactType::frequency) CHECK(a[i].score == Catch::Approx(b[i].score).margin(1e-12));
        if (a[i].type == FactType::rank) CHECK(a[i].score == Catch::Approx(b[i].score).margin(1e-12));
    }
}
