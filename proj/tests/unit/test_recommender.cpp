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
#include "weaver/callout/callout.hpp"
#include "weaver/common/error.hpp"
#include "weaver/facts/engine.hpp"
#include "weaver/recommender/recommender.hpp"

#include <catch_amalgamated.hpp>
#include <fmt/format.h>

#include <random>

using namespace weaver;
using namespace weaver::recommender;

namespace {

auto olympics() -> DatasetPtr {
    std::string csv = "year,sex,count\n";
    for (int y = 1900; y <= 2016; y += 4) {
        csv += fmt::format("{},female,{}\n", y, 20 + (y - 1900) * 40);
        csv += fmt::format("{},male,{}\n", y, 1500 + (y - 1900) * 30);
    }
    return std::make_shared<const tabular::Dataset>(tabular::load_dataset(csv, "olympics"));
}

auto regions() -> DatasetPtr {
    std::string csv =
        "country,region,population,gdp\n"
        "Egypt,North Africa,104,400\n"
        "Libya,North Africa,7,50\n"
        "Morocco,North Africa,37,130\n"
        "Kenya,East Africa,54,110\n"
        "Ethiopia,East Africa,120,120\n"
        "France,Western Europe,68,2900\n";
    return std::make_shared<const tabular::Dataset>(tabular::load_dataset(csv, "regions"));
}

auto lookup(std::initializer_list<DatasetPtr> sets) -> DatasetLookup {
    DatasetLookup out;
    for (const auto& ds : sets) out[ds->id()] = ds;
    return out;
}

auto run(std::string_view text, std::initializer_list<DatasetPtr> sets) -> RecommendOutcome {
    auto datasets = lookup(sets);
    HeuristicBackend backend(datasets);
    return recommend(text, summarize_datasets(std::vector<DatasetPtr>(sets)), backend, datasets);
}

class ScriptedBackend final : public RecommenderBackend {
public:
    explicit ScriptedBackend(std::string body, bool fail = false) : body_(std::move(body)), fail_(fail) {}
    [[nodiscard]] auto id() const -> std::string override { return "scripted"; }
    auto propose(const RecommendRequest&) -> std::string override {
        if (fail_) throw std::runtime_error("connection refused");
        return body_;
    }

private:
    std::string body_;
    bool fail_;
};

}  // namespace

TEST_CASE("dataset summaries", "[recommender]") {
    auto ds = olympics();
    auto summaries = summarize_datasets({ds, ds, regions()});
    REQUIRE(summaries.size() == 2);
    const auto& s = summaries.front();
    CHECK(s.dataset_id == ds->id());
    CHECK(s.row_count == ds->row_count());
    REQUIRE(s.columns.size() == 3);
    CHECK(s.columns[1].samples == std::vector<std::string>{"female", "male"});
    CHECK(s.columns[0].samples == std::vector<std::string>{"1900", "1904", "1908"});
    CHECK_FALSE(s.columns[1].min);
    REQUIRE(s.columns[2].min);
    CHECK(*s.columns[2].min == 20);
    CHECK(*s.columns[2].max == 1500 + 116 * 30);
    for (const auto& c : s.columns) CHECK(c.samples.size() <= kMaxSamples);
    CHECK(summary_from_json(summary_to_json(s)) == s);
    CHECK(summarize_datasets({}).empty());
}

TEST_CASE("summaries stay small relative to the data", "[recommender][property]") {
    auto ds = testing::random_gapminder(9, 1000, 10);
    REQUIRE(ds->row_count() == 10000);
    auto summary = summary_to_json(summarize_dataset(*ds)).dump();
    auto full = tabular::write_csv(*ds);
    CHECK(summary.size() * 100 < full.size());
}

TEST_CASE("temporal cue yields a grouped line chart", "[recommender]") {
    auto out = run("Women's participation in the Olympics has increased over time", {olympics()});
    REQUIRE_FALSE(out.recommendations.empty());
    const auto& rec = out.recommendations.front();
    CHECK(rec.valid);
    CHECK(rec.violations.empty());
    CHECK(rec.spec.chart_type == chart::ChartType::line);
    CHECK(rec.spec.x_attr == "year");
    CHECK(rec.spec.color_attr == "sex");
    CHECK(rec.spec.y_attr == "sum_count");
    CHECK_FALSE(rec.rationale.empty());
}

TEST_CASE("named category values become filters", "[recommender]") {
    auto ds = regions();
    auto out = run("Countries in North Africa rely on a few large economies", {ds});
    REQUIRE_FALSE(out.recommendations.empty());
    const auto& plan = out.recommendations.front().plan;
    REQUIRE_FALSE(plan.steps.empty());
    const auto* filter = std::get_if<tabular::FilterStep>(&plan.steps.front());
    REQUIRE(filter);
    CHECK(filter->column == "region");
    CHECK(filter->op == tabular::Comparator::eq);
    CHECK(filter->literal == "North Africa");
    CHECK(out.recommendations.front().valid);
}

TEST_CASE("unrelated text yields no recommendations", "[recommender]") {
    auto out = run("The weather was lovely that afternoon.", {olympics(), regions()});
    CHECK(out.recommendations.empty());
    REQUIRE(out.reason);
    CHECK(*out.reason == "no matching attributes");
    try {
        run("   ", {olympics()});
        FAIL("expected empty_text");
    } catch (const Error& e) {
        CHECK(e.code() == "empty_text");
    }
}

TEST_CASE("keyword rules pick chart types", "[recommender]") {
    auto ds = regions();
    auto compare = run("Compare population versus region", {ds});
    REQUIRE_FALSE(compare.recommendations.empty());
    CHECK(compare.recommendations.front().spec.chart_type == chart::ChartType::bar);
    CHECK(compare.recommendations.front().spec.x_attr == "region");

    auto relation = run("There is a strong relationship between gdp and population", {ds});
    REQUIRE_FALSE(relation.recommendations.empty());
    CHECK(relation.recommendations.front().spec.chart_type == chart::ChartType::scatterplot);
    CHECK(relation.recommendations.front().valid);

    auto share = run("Each region holds a different share of the population", {ds});
    REQUIRE_FALSE(share.recommendations.empty());
    CHECK(share.recommendations.front().spec.chart_type == chart::ChartType::pie_donut);

    auto all = run("Compare the share and correlation of gdp with population, and the trend over time",
                   {ds, olympics()});
    CHECK(all.recommendations.size() <= kMaxRecommendations);
}

TEST_CASE("heuristic backend is deterministic", "[recommender]") {
    auto a = run("Women's participation has increased since 1960", {olympics(), regions()});
    auto b = run("Women's participation has increased since 1960", {olympics(), regions()});
    CHECK(a.recommendations == b.recommendations);
}

TEST_CASE("remote-shaped output is validated strictly", "[recommender]") {
    auto ds = olympics();
    auto datasets = lookup({ds});
    auto summaries = summarize_datasets({ds});
    nlohmann::json good{{"rationale", "count by sex"},
                        {"plan", {{"sourceDataset", ds->id()},
                                  {"steps", {{{"op", "aggregate"}, {"groupBy", {"sex"}}, {"measure", "count"}, {"fn", "sum"}}}}}},
                        {"spec", {{"id", "r1"}, {"chartType", "bar"}, {"datasetId", ds->id()}, {"xAttr", "sex"},
                                  {"yAttr", "sum_count"}}}};
    auto bad_spec = good;
    bad_spec["spec"]["yAttr"] = "sex";
    auto unknown_source = good;
    unknown_source["plan"]["sourceDataset"] = "nope";
    nlohmann::json garbage{{"rationale", 3}};
    nlohmann::json body{{"recommendations", {good, bad_spec, garbage, unknown_source}}};
    ScriptedBackend backend(body.dump());
    auto out = recommend("anything", summaries, backend, datasets);
    REQUIRE(out.recommendations.size() == 3);
    CHECK(out.recommendations[0].valid);
    CHECK(out.recommendations[0].spec.dataset_id != ds->id());
    CHECK_FALSE(out.recommendations[1].valid);
    CHECK(out.recommendations[1].violations.front().rfind("spec: y_attr", 0) == 0);
    CHECK_FALSE(out.recommendations[2].valid);
    CHECK(out.dropped.size() == 1);

    ScriptedBackend broken("not json");
    try {
        recommend("anything", summaries, broken, datasets);
        FAIL("expected recommender_failed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::upstream);
    }
    ScriptedBackend down("", true);
    try {
        recommend("anything", summaries, down, datasets);
        FAIL("expected recommender_failed");
    } catch (const Error& e) {
        CHECK(e.code() == "recommender_failed");
    }
    CHECK_THROWS_AS(materialize(out.recommendations[1], datasets), Error);
}

TEST_CASE("materialize", "[recommender]") {
    auto ds = regions();
    auto datasets = lookup({ds});
    VisRecommendation identity{"all rows", {ds->id(), {}}, {}, false, {}};
    identity.spec.id = "r";
    identity.spec.chart_type = chart::ChartType::scatterplot;
    identity.spec.dataset_id = ds->id();
    identity.spec.x_attr = "gdp";
    identity.spec.y_attr = "population";
    validate_recommendation(identity, datasets);
    REQUIRE(identity.valid);
    auto m = materialize(identity, datasets, "gdp and population");
    CHECK(m.dataset == ds);
    CHECK(m.source_text == "gdp and population");
    CHECK(chart::validate_spec(m.spec, *m.dataset).ok());

    std::mt19937 rng(5);
    auto big = testing::random_gapminder(21, 80, 3);
    auto big_lookup = lookup({big});
    const auto& life = big->column("lifeExp");
    for (int i = 0; i < 50; ++i) {
        double cut = 35.0 + static_cast<double>(rng() % 50);
        VisRecommendation rec{"filtered", {big->id(), {tabular::FilterStep{"lifeExp", tabular::Comparator::ge, cut}}}, {},
                              false, {}};
        rec.spec.id = "f";
        rec.spec.chart_type = chart::ChartType::scatterplot;
        rec.spec.x_attr = "gdpPercap";
        rec.spec.y_attr = "lifeExp";
        validate_recommendation(rec, big_lookup);
        REQUIRE(rec.valid);
        std::size_t expected = 0;
        for (std::size_t r = 0; r < big->row_count(); ++r) expected += life.numeric(r) >= cut ? 1 : 0;
        if (expected == 0) continue;
        CHECK(materialize(rec, big_lookup).dataset->row_count() == expected);
    }
}

TEST_CASE("valid recommendations always materialize", "[recommender][property]") {
    const char* phrases[] = {"increased over time", "compare", "top", "relationship", "correlated", "share",
                             "percent",             "Africa",  "Asia", "lifeExp",     "pop",        "gdpPercap",
                             "female",              "1977",    "continent", "country", "decline", "versus"};
    std::mt19937 rng(8);
    std::size_t valid = 0;
    for (int i = 0; i < 200; ++i) {
        auto ds = testing::random_gapminder(100 + i, 20, 4);
        std::string text;
        for (int w = 0; w < 4; ++w) text += std::string(phrases[rng() % std::size(phrases)]) + " ";
        auto datasets = lookup({ds});
        HeuristicBackend backend(datasets);
        auto out = recommend(text, summarize_datasets({ds}), backend, datasets);
        CHECK(out.recommendations.size() <= kMaxRecommendations);
        for (const auto& rec : out.recommendations) {
            INFO(text << " -> " << recommendation_to_json(rec).dump());
            CHECK(rec.valid);
            if (!rec.valid) continue;
            ++valid;
            auto m = materialize(rec, datasets);
            CHECK(chart::validate_spec(m.spec, *m.dataset).ok());
        }
    }
    CHECK(valid > 100);
}

TEST_CASE("recommended line chart closes the loop", "[recommender][integration]") {
    auto ds = olympics();
    auto datasets = lookup({ds});
    HeuristicBackend backend(datasets);
    auto out = recommend("Women's participation in the Olympics has increased over time", summarize_datasets({ds}),
                         backend, datasets);
    REQUIRE_FALSE(out.recommendations.empty());
    auto m = materialize(out.recommendations.front(), datasets);
    callout::Callout brush{m.spec.id, callout::CalloutKind::timeframe_brush, callout::AxisRange{1960.0, 2000.0}};
    auto pkg = testing::package(brush, m.spec, m.dataset);
    auto result = facts::compute_facts(pkg, {});
    bool trend = false;
    for (const auto& f : result.facts) trend = trend || f.type == facts::FactType::trend;
    CHECK(trend);
}
