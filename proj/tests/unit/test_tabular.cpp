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
#include "oracles.hpp"
#include "weaver/common/error.hpp"
#include "weaver/common/format.hpp"
#include "weaver/tabular/dataset.hpp"
#include "weaver/tabular/plan.hpp"

#include <catch_amalgamated.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <random>

using namespace weaver;
using namespace weaver::tabular;

namespace {

auto code_of(const auto& fn) -> std::string {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Column typing by a plain re-scan of each column's raw text.
auto rescan_type(const std::string& name, const std::vector<std::string>& cells) -> AttrType {
    std::size_t non_null = 0;
    std::size_t numbers = 0;
    std::size_t times = 0;
    for (const auto& cell : cells) {
        std::string lower = cell;
        std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
        if (lower.empty() || lower == "na" || lower == "null") continue;
        ++non_null;
        char* end = nullptr;
        std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() && *end == '\0') ++numbers;
        bool year = cell.size() == 4 && std::all_of(cell.begin(), cell.end(), ::isdigit) && cell >= "1000" &&
                    cell <= "2999";
        bool iso = cell.size() >= 7 && cell[4] == '-' && std::isdigit(static_cast<unsigned char>(cell[0]));
        if (year || iso) ++times;
    }
    std::string lower_name = name;
    std::transform(lower_name.begin(), lower_name.end(), lower_name.begin(), ::tolower);
    bool datey = false;
    for (const char* token : {"year", "date", "time", "month", "day"}) {
        if (lower_name.find(token) != std::string::npos) datey = true;
    }
    if (non_null == 0) return AttrType::categorical;
    if (datey && times * 100 >= non_null * 95) return AttrType::temporal;
    if (numbers * 100 >= non_null * 95) return AttrType::quantitative;
    return AttrType::categorical;
}

}  // namespace

TEST_CASE("load_dataset types columns", "[tabular]") {
    auto ds = load_dataset("a,b\n1,x\n", "t");
    REQUIRE(ds.columns().size() == 2);
    CHECK(ds.row_count() == 1);
    CHECK(ds.column("a").type() == AttrType::quantitative);
    CHECK(ds.column("b").type() == AttrType::categorical);
}

TEST_CASE("load_dataset errors", "[tabular]") {
    CHECK(code_of([] { load_dataset("a,a\n1,2\n", "t"); }) == "duplicate_column");
    CHECK(code_of([] { load_dataset("", "t"); }) == "empty_input");
    CHECK(code_of([] { load_dataset("a,b\n", "t"); }) == "no_rows");
}

TEST_CASE("null spellings and parse failures", "[tabular]") {
    std::string csv = "v,w\n";
    for (int i = 0; i < 40; ++i) csv += fmt::format("{},k\n", i);
    csv += "NA,k\nnull,k\n,k\nbogus,k\n";
    auto ds = load_dataset(csv, "t");
    const auto& v = ds.column("v");
    CHECK(v.type() == AttrType::quantitative);
    CHECK(v.null_count() == 4);
    CHECK(v.parse_failures() == 1);
    CHECK(v.distinct_count() <= ds.row_count());
    CHECK(v.sample_values().size() == 5);
}

TEST_CASE("RFC-4180 quoting", "[tabular]") {
    auto ds = load_dataset("name,note\n\"Smith, J\",\"said \"\"hi\"\"\"\nB,\"two\nlines\"\n", "q");
    CHECK(ds.column("name").label(0) == "Smith, J");
    CHECK(ds.column("note").label(0) == "said \"hi\"");
    CHECK(ds.column("note").label(1) == "two\nlines");
    auto again = load_dataset(write_csv(ds), "q");
    CHECK(again.column("note").label(1) == "two\nlines");
}

TEST_CASE("infer_attribute_type rules", "[tabular]") {
    std::vector<std::string> nums{"2.5", "3.1", "4"};
    std::vector<std::string> cats{"Asia", "Africa"};
    std::vector<std::string> years{"1952", "1957"};
    std::vector<std::string> nulls{"", "NA"};
    CHECK(infer_attribute_type("v", nums).type == AttrType::quantitative);
    CHECK(infer_attribute_type("v", cats).type == AttrType::categorical);
    CHECK(infer_attribute_type("year", years).type == AttrType::temporal);
    CHECK(infer_attribute_type("gross", years).type == AttrType::quantitative);
    auto all_null = infer_attribute_type("v", nulls);
    CHECK(all_null.type == AttrType::categorical);
    CHECK(all_null.all_null);
}

TEST_CASE("infer_attribute_type is permutation invariant", "[tabular][property]") {
    std::mt19937 rng(7);
    std::vector<std::string> values;
    for (int i = 0; i < 60; ++i) values.push_back(i % 17 == 0 ? "x" : std::to_string(i));
    auto base = infer_attribute_type("v", values).type;
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(values.begin(), values.end(), rng);
        CHECK(infer_attribute_type("v", values).type == base);
    }
}

TEST_CASE("1000-row mixed file matches a per-column rescan", "[tabular][oracle]") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pick(0, 99);
    std::vector<std::string> names{"amount", "label", "year", "order_date", "code", "dirty"};
    std::vector<std::vector<std::string>> cells(names.size());
    std::string csv = "amount,label,year,order_date,code,dirty\n";
    for (int r = 0; r < 1000; ++r) {
        std::vector<std::string> row{
            fmt::format("{:.2f}", pick(rng) * 1.5),
            fmt::format("L{}", pick(rng) % 7),
            std::to_string(1950 + pick(rng)),
            fmt::format("2020-{:02}-{:02}", pick(rng) % 12 + 1, pick(rng) % 28 + 1),
            std::to_string(1000 + pick(rng)),
            pick(rng) < 4 ? "oops" : std::to_string(pick(rng)),
        };
        if (pick(rng) < 3) row[0] = "NA";
        for (std::size_t c = 0; c < row.size(); ++c) cells[c].push_back(row[c]);
        csv += fmt::format("{}\n", fmt::join(row, ","));
    }
    auto ds = load_dataset(csv, "mixed");
    for (std::size_t c = 0; c < names.size(); ++c) {
        INFO(names[c]);
        CHECK(ds.column(names[c]).type() == rescan_type(names[c], cells[c]));
    }
}

namespace {

auto people() -> Dataset {
    return load_dataset(
        "id,sex,continent,score\n1,f,Africa,10\n2,m,Asia,20\n3,f,Africa,0\n4,m,Europe,40\n5,f,Asia,5\n", "people");
}

}  // namespace

TEST_CASE("filter keeps matching rows", "[tabular][plan]") {
    auto ds = people();
    DataOperationPlan plan{ds.id(), {FilterStep{"continent", Comparator::eq, "Africa"}}};
    auto out = execute_plan(plan, ds);
    CHECK(out.row_count() == 2);
    CHECK(ds.row_count() == 5);
}

TEST_CASE("aggregate count matches brute-force tally", "[tabular][plan][oracle]") {
    auto ds = testing::random_gapminder(3, 40, 3);
    DataOperationPlan plan{ds->id(), {AggregateStep{{"sex"}, "pop", AggregateFn::count, {}}}};
    auto out = execute_plan(plan, *ds);
    std::vector<std::string> labels;
    for (std::size_t r = 0; r < ds->row_count(); ++r) labels.push_back(ds->column("sex").label(r));
    auto tally = oracle::tally(labels);
    REQUIRE(out.row_count() == tally.size());
    for (std::size_t r = 0; r < out.row_count(); ++r) {
        CHECK(out.column("count_pop").numeric(r) == static_cast<double>(tally[out.column("sex").label(r)]));
    }
}

TEST_CASE("empty plan is an identity copy", "[tabular][plan]") {
    auto ds = people();
    auto out = execute_plan({ds.id(), {}}, ds);
    CHECK(write_csv(out) == write_csv(ds));
    CHECK(out.name() == ds.name());
}

TEST_CASE("derive divides with null on zero", "[tabular][plan]") {
    auto ds = people();
    DataOperationPlan plan{ds.id(), {DeriveStep{"ratio", "id / score"}, DeriveStep{"share", "pct_of_total(score)"}}};
    auto out = execute_plan(plan, ds);
    CHECK(out.column("ratio").is_null(2));
    CHECK(out.column("ratio").numeric(0) == Catch::Approx(0.1));
    CHECK(out.column("share").numeric(3) == Catch::Approx(40.0 / 75.0 * 100.0));
}

TEST_CASE("plan errors", "[tabular][plan]") {
    auto ds = people();
    CHECK(code_of([&] { execute_plan({ds.id(), {FilterStep{"nope", Comparator::eq, 1}}}, ds); }) == "unknown_column");
    CHECK(code_of([&] { execute_plan({ds.id(), {FilterStep{"sex", Comparator::lt, "f"}}}, ds); }) == "type_mismatch");
    CHECK(code_of([&] { execute_plan({ds.id(), {LimitStep{0}}}, ds); }) == "invalid_plan");
    // Columns introduced by earlier steps are visible to later ones.
    DataOperationPlan chained{ds.id(),
                              {AggregateStep{{"continent"}, "score", AggregateFn::sum, "total"},
                               SortStep{"total", SortDirection::descending}, LimitStep{1}}};
    CHECK(validate_plan(chained, ds).empty());
    auto top = execute_plan(chained, ds);
    CHECK(top.column("continent").label(0) == "Europe");
}

TEST_CASE("plan JSON round trip", "[tabular][plan]") {
    auto ds = people();
    DataOperationPlan plan{ds.id(),
                           {FilterStep{"continent", Comparator::in, nlohmann::json::array({"Asia", "Africa"})},
                            AggregateStep{{"sex"}, "score", AggregateFn::mean, {}}, DeriveStep{"d", "mean_score * 2"},
                            SortStep{"d", SortDirection::descending}, LimitStep{3}}};
    CHECK(plan_from_json(plan_to_json(plan)) == plan);
    auto doc = plan_to_json(plan);
    doc["steps"][0]["extra"] = 1;
    CHECK(code_of([&] { plan_from_json(doc); }) == "unknown_field");
}

namespace {

// Row-at-a-time interpreter for filter / sort / limit plans over one numeric column.
auto naive(const Dataset& ds, double threshold, bool descending, std::size_t limit) -> std::vector<double> {
    std::vector<double> rows;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        double v = ds.column("lifeExp").numeric(r);
        if (v > threshold) rows.push_back(v);
    }
    std::stable_sort(rows.begin(), rows.end(), [descending](double a, double b) { return descending ? a > b : a < b; });
    if (rows.size() > limit) rows.resize(limit);
    return rows;
}

}  // namespace

TEST_CASE("step order matches a naive interpreter", "[tabular][plan][oracle]") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto ds = testing::random_gapminder(100 + trial, 50, 4);
        double threshold = std::uniform_real_distribution<double>(40, 80)(rng);
        bool desc = trial % 2 == 0;
        std::size_t limit = 1 + trial * 7;
        DataOperationPlan plan{ds->id(),
                               {FilterStep{"lifeExp", Comparator::gt, threshold},
                                SortStep{"lifeExp", desc ? SortDirection::descending : SortDirection::ascending},
                                LimitStep{limit}}};
        auto out = execute_plan(plan, *ds);
        auto expect = naive(*ds, threshold, desc, limit);
        REQUIRE(out.row_count() == expect.size());
        for (std::size_t r = 0; r < expect.size(); ++r) CHECK(out.column("lifeExp").numeric(r) == expect[r]);
        CHECK(write_csv(execute_plan(plan, *ds)) == write_csv(out));
    }
}

TEST_CASE("number formatting", "[format]") {
    CHECK(format_number(1234.5) == "1,234.5");
    CHECK(format_number(15) == "15");
    CHECK(format_number(-0.00001) == "0");
    CHECK(format_number(0.823456) == "0.8235");
    CHECK(format_percent(20.0 / 21.0 * 100.0) == "95.24%");
    CHECK(format_payload_number("meanDeltaPct", 100.0) == "+100.00%");
    CHECK(format_payload_number("sharePct", 100.0) == "100.00%");
}
