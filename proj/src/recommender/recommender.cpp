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

#include "weaver/recommender/recommender.hpp"

#include "weaver/common/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace weaver::recommender {

namespace {

using nlohmann::json;
using tabular::AttrType;

auto lower(std::string_view text) -> std::string {
    std::string out(text);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

auto is_word_char(char ch) -> bool { return std::isalnum(static_cast<unsigned char>(ch)) != 0; }

// Whole-word, case-folded phrase search.
auto mentions(const std::string& haystack, const std::string& phrase) -> bool {
    if (phrase.empty()) return false;
    for (auto pos = haystack.find(phrase); pos != std::string::npos; pos = haystack.find(phrase, pos + 1)) {
        std::size_t end = pos + phrase.size();
        if ((pos == 0 || !is_word_char(haystack[pos - 1])) && (end >= haystack.size() || !is_word_char(haystack[end]))) {
            return true;
        }
    }
    return false;
}

auto any_of_words(const std::string& text, std::initializer_list<std::string_view> words) -> bool {
    return std::any_of(words.begin(), words.end(), [&](std::string_view w) { return mentions(text, std::string(w)); });
}

// Prefix match so "correlat" covers correlated / correlation.
auto any_prefix(const std::string& text, std::initializer_list<std::string_view> stems) -> bool {
    for (auto stem : stems) {
        for (auto pos = text.find(stem); pos != std::string::npos; pos = text.find(stem, pos + 1)) {
            if (pos == 0 || !is_word_char(text[pos - 1])) return true;
        }
    }
    return false;
}

auto has_year_token(const std::string& text) -> bool {
    for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
        bool digits = std::all_of(text.begin() + i, text.begin() + i + 4, [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        if (!digits) continue;
        bool left = i == 0 || !is_word_char(text[i - 1]);
        bool right = i + 4 == text.size() || !is_word_char(text[i + 4]);
        int year = std::stoi(text.substr(i, 4));
        if (left && right && year >= 1000 && year <= 2999) return true;
    }
    return false;
}

auto column_mentioned(const std::string& text, const std::string& name) -> bool {
    std::string n = lower(name);
    std::string spaced = n;
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    if (mentions(text, n) || mentions(text, spaced) || mentions(text, spaced + "s")) return true;
    return spaced.size() > 3 && spaced.back() == 's' && mentions(text, spaced.substr(0, spaced.size() - 1));
}

constexpr std::string_view kGenderWords[] = {"women", "woman", "female", "females", "men",  "man",
                                             "male",  "males", "girls",  "boys",    "gender", "sex"};

auto gender_column(std::string_view name) -> bool {
    auto n = lower(name);
    return n == "sex" || n == "gender";
}

struct DatasetView {
    const DatasetSummary* summary;
    const tabular::Dataset* dataset;
    std::vector<std::string> mentioned;                        // columns, in column order
    std::map<std::string, std::vector<std::string>> matches;  // column -> matched domain values
    int relatedness = 0;
};

auto build_view(const std::string& text, const DatasetSummary& summary, const tabular::Dataset& dataset) -> DatasetView {
    DatasetView view{&summary, &dataset, {}, {}, 0};
    bool gender_cue = std::any_of(std::begin(kGenderWords), std::end(kGenderWords),
                                  [&](std::string_view w) { return mentions(text, std::string(w)); });
    for (const auto& col : dataset.columns()) {
        if (column_mentioned(text, col.name()) || (gender_cue && gender_column(col.name()))) {
            view.mentioned.push_back(col.name());
        }
        if (col.type() != AttrType::categorical) continue;
        for (const auto& value : col.domain()) {
            auto label = tabular::value_label(value);
            bool numeric = !label.empty() && std::all_of(label.begin(), label.end(), [](char c) {
                return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == ',';
            });
            if (label.size() < 3 || numeric) continue;
            if (mentions(text, lower(label))) view.matches[col.name()].push_back(label);
        }
    }
    view.relatedness = static_cast<int>(view.mentioned.size());
    for (const auto& [col, values] : view.matches) view.relatedness += static_cast<int>(values.size());
    return view;
}

auto columns_of(const tabular::Dataset& ds, AttrType type) -> std::vector<const tabular::Column*> {
    std::vector<const tabular::Column*> out;
    for (const auto& c : ds.columns()) {
        if (c.type() == type && !c.all_null()) out.push_back(&c);
    }
    return out;
}

auto is_mentioned(const DatasetView& v, const std::string& name) -> bool {
    return std::find(v.mentioned.begin(), v.mentioned.end(), name) != v.mentioned.end();
}

// Columns pinned to a single value by a filter make poor groupings.
auto single_filtered(const DatasetView& v, const std::string& name) -> bool {
    auto it = v.matches.find(name);
    return it != v.matches.end() && it->second.size() == 1;
}

constexpr std::size_t kMaxGroups = 12;

struct Measure {
    std::string column;
    tabular::AggregateFn fn = tabular::AggregateFn::sum;
    std::string output;
    std::string phrase;
};

auto pick_measure(const DatasetView& v, const std::string& exclude) -> Measure {
    auto quants = columns_of(*v.dataset, AttrType::quantitative);
    quants.erase(std::remove_if(quants.begin(), quants.end(), [&](const auto* c) { return c->name() == exclude; }),
                 quants.end());
    for (const auto* c : quants) {
        if (is_mentioned(v, c->name())) return {c->name(), tabular::AggregateFn::sum, {}, "total " + c->name()};
    }
    if (!quants.empty()) return {quants.front()->name(), tabular::AggregateFn::sum, {}, "total " + quants.front()->name()};
    return {v.dataset->columns().front().name(), tabular::AggregateFn::count, "count", "number of records"};
}

auto pick_category(const DatasetView& v, const std::string& exclude, bool allow_single) -> const tabular::Column* {
    auto cats = columns_of(*v.dataset, AttrType::categorical);
    const tabular::Column* best = nullptr;
    for (const auto* c : cats) {
        if (c->name() == exclude || c->distinct_count() > kMaxGroups) continue;
        if (!allow_single && single_filtered(v, c->name())) continue;
        if (is_mentioned(v, c->name()) || v.matches.count(c->name())) return c;
    }
    for (const auto* c : cats) {
        if (c->name() == exclude || (!allow_single && single_filtered(v, c->name()))) continue;
        if (!best || c->distinct_count() < best->distinct_count()) best = c;
    }
    return best;
}

auto filter_steps(const DatasetView& v) -> std::vector<tabular::Step> {
    std::vector<tabular::Step> steps;
    for (const auto& col : v.dataset->columns()) {
        auto it = v.matches.find(col.name());
        if (it == v.matches.end()) continue;
        if (it->second.size() == 1) {
            steps.emplace_back(tabular::FilterStep{col.name(), tabular::Comparator::eq, it->second.front()});
        } else {
            steps.emplace_back(tabular::FilterStep{col.name(), tabular::Comparator::in, json(it->second)});
        }
    }
    return steps;
}

auto aggregate(const Measure& m, std::vector<std::string> group_by) -> tabular::AggregateStep {
    return tabular::AggregateStep{std::move(group_by), m.column, m.fn, m.output};
}

struct Draft {
    std::string rationale;
    tabular::DataOperationPlan plan;
    chart::ChartSpec spec;
};

auto base_spec(const DatasetView& v, chart::ChartType type, std::string title) -> chart::ChartSpec {
    chart::ChartSpec spec;
    spec.chart_type = type;
    spec.dataset_id = v.dataset->id();
    spec.title = std::move(title);
    return spec;
}

auto line_draft(const DatasetView& v) -> std::optional<Draft> {
    auto times = columns_of(*v.dataset, AttrType::temporal);
    if (times.empty()) return std::nullopt;
    const auto* time = times.front();
    for (const auto* t : times) {
        if (is_mentioned(v, t->name())) {
            time = t;
            break;
        }
    }
    auto measure = pick_measure(v, time->name());
    const tabular::Column* color = nullptr;
    for (const auto* c : columns_of(*v.dataset, AttrType::categorical)) {
        if (c->distinct_count() <= kMaxGroups && !single_filtered(v, c->name()) &&
            (is_mentioned(v, c->name()) || v.matches.count(c->name()))) {
            color = c;
            break;
        }
    }
    Draft d;
    d.plan.source_dataset = v.dataset->id();
    d.plan.steps = filter_steps(v);
    std::vector<std::string> group{time->name()};
    if (color) group.push_back(color->name());
    auto agg = aggregate(measure, group);
    d.plan.steps.emplace_back(agg);
    d.plan.steps.emplace_back(tabular::SortStep{time->name(), tabular::SortDirection::ascending});
    d.rationale = fmt::format("Show how the {} changes over {}{}.", measure.phrase, time->name(),
                              color ? " for each " + color->name() : "");
    d.spec = base_spec(v, chart::ChartType::line, fmt::format("{} over {}", measure.phrase, time->name()));
    d.spec.x_attr = time->name();
    d.spec.y_attr = agg.output_name();
    if (color) d.spec.color_attr = color->name();
    return d;
}

auto bar_draft(const DatasetView& v, bool top) -> std::optional<Draft> {
    const auto* cat = pick_category(v, {}, true);
    if (!cat) return std::nullopt;
    auto measure = pick_measure(v, {});
    auto agg = aggregate(measure, {cat->name()});
    Draft d;
    d.plan.source_dataset = v.dataset->id();
    d.plan.steps = filter_steps(v);
    d.plan.steps.emplace_back(agg);
    d.plan.steps.emplace_back(tabular::SortStep{agg.output_name(), tabular::SortDirection::descending});
    if (top) d.plan.steps.emplace_back(tabular::LimitStep{10});
    d.rationale = top ? fmt::format("Rank the top {} values by {}.", cat->name(), measure.phrase)
                      : fmt::format("Compare the {} across {}.", measure.phrase, cat->name());
    d.spec = base_spec(v, chart::ChartType::bar, fmt::format("{} by {}", measure.phrase, cat->name()));
    d.spec.x_attr = cat->name();
    d.spec.y_attr = agg.output_name();
    return d;
}

auto scatter_draft(const DatasetView& v) -> std::optional<Draft> {
    auto quants = columns_of(*v.dataset, AttrType::quantitative);
    if (quants.size() < 2) return std::nullopt;
    std::stable_partition(quants.begin(), quants.end(), [&](const auto* c) { return is_mentioned(v, c->name()); });
    Draft d;
    d.plan.source_dataset = v.dataset->id();
    d.plan.steps = filter_steps(v);
    const auto& x = quants[0]->name();
    const auto& y = quants[1]->name();
    d.rationale = fmt::format("Relate {} to {} across individual records.", y, x);
    d.spec = base_spec(v, chart::ChartType::scatterplot, fmt::format("{} vs. {}", y, x));
    d.spec.x_attr = x;
    d.spec.y_attr = y;
    if (const auto* color = pick_category(v, {}, false); color && color->distinct_count() <= kMaxGroups) {
        d.spec.color_attr = color->name();
    }
    for (const auto* c : columns_of(*v.dataset, AttrType::categorical)) {
        if (c->distinct_count() == v.dataset->row_count()) {
            d.spec.identity_attr = c->name();
            break;
        }
    }
    return d;
}

auto pie_draft(const DatasetView& v) -> std::optional<Draft> {
    const auto* cat = pick_category(v, {}, false);
    if (!cat) return std::nullopt;
    auto measure = pick_measure(v, {});
    auto agg = aggregate(measure, {cat->name()});
    Draft d;
    d.plan.source_dataset = v.dataset->id();
    d.plan.steps = filter_steps(v);
    d.plan.steps.emplace_back(agg);
    d.rationale = fmt::format("Show each {}'s share of the {}.", cat->name(), measure.phrase);
    d.spec = base_spec(v, chart::ChartType::pie_donut, fmt::format("share of {} by {}", measure.phrase, cat->name()));
    d.spec.x_attr = cat->name();
    d.spec.y_attr = agg.output_name();
    return d;
}

auto count_draft(const DatasetView& v) -> std::optional<Draft> {
    const auto* cat = pick_category(v, {}, false);
    if (!cat) return std::nullopt;
    Measure m{cat->name(), tabular::AggregateFn::count, "count", "number of records"};
    auto agg = aggregate(m, {cat->name()});
    Draft d;
    d.plan.source_dataset = v.dataset->id();
    d.plan.steps = filter_steps(v);
    d.plan.steps.emplace_back(agg);
    d.rationale = fmt::format("Count the records in each {}.", cat->name());
    d.spec = base_spec(v, chart::ChartType::bar, fmt::format("records by {}", cat->name()));
    d.spec.x_attr = cat->name();
    d.spec.y_attr = agg.output_name();
    return d;
}

auto draft_json(const Draft& d) -> json {
    return {{"rationale", d.rationale}, {"plan", tabular::plan_to_json(d.plan)}, {"spec", chart::serialize_spec(d.spec)}};
}

}  // namespace

auto summarize_dataset(const tabular::Dataset& dataset) -> DatasetSummary {
    DatasetSummary s{dataset.id(), dataset.name(), dataset.row_count(), {}};
    for (const auto& col : dataset.columns()) {
        ColumnSummary c{col.name(), col.type(), col.distinct_count(), {}, std::nullopt, std::nullopt};
        for (const auto& v : col.sample_values()) {
            if (c.samples.size() == kMaxSamples) break;
            c.samples.push_back(tabular::value_text(v));
        }
        if (col.type() == AttrType::quantitative && !col.all_null()) {
            double lo = INFINITY;
            double hi = -INFINITY;
            for (double x : col.numeric_values()) {
                if (std::isnan(x)) continue;
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            c.min = lo;
            c.max = hi;
        }
        s.columns.push_back(std::move(c));
    }
    return s;
}

auto summarize_datasets(const std::vector<DatasetPtr>& datasets) -> std::vector<DatasetSummary> {
    std::vector<DatasetSummary> out;
    std::set<std::string> seen;
    for (const auto& ds : datasets) {
        if (ds && seen.insert(ds->id()).second) out.push_back(summarize_dataset(*ds));
    }
    return out;
}

auto summary_to_json(const DatasetSummary& summary) -> json {
    json columns = json::array();
    for (const auto& c : summary.columns) {
        json col{{"name", c.name},
                 {"type", tabular::to_string(c.type)},
                 {"distinctCount", c.distinct_count},
                 {"samples", c.samples}};
        if (c.min) col["min"] = *c.min;
        if (c.max) col["max"] = *c.max;
        columns.push_back(std::move(col));
    }
    return {{"datasetId", summary.dataset_id}, {"name", summary.name}, {"rowCount", summary.row_count},
            {"columns", std::move(columns)}};
}

auto summary_from_json(const json& doc) -> DatasetSummary {
    try {
        DatasetSummary s;
        s.dataset_id = doc.at("datasetId").get<std::string>();
        s.name = doc.at("name").get<std::string>();
        s.row_count = doc.at("rowCount").get<std::size_t>();
        for (const auto& c : doc.at("columns")) {
            auto type = tabular::parse_attr_type(c.at("type").get<std::string>());
            if (!type) fail("malformed_summary", "unknown attribute type", "type");
            ColumnSummary col{c.at("name").get<std::string>(), *type, c.at("distinctCount").get<std::size_t>(),
                              c.at("samples").get<std::vector<std::string>>(), std::nullopt, std::nullopt};
            if (c.contains("min")) col.min = c.at("min").get<double>();
            if (c.contains("max")) col.max = c.at("max").get<double>();
            s.columns.push_back(std::move(col));
        }
        return s;
    } catch (const json::exception& e) {
        fail("malformed_summary", e.what());
    }
}

auto recommendation_to_json(const VisRecommendation& rec) -> json {
    return {{"rationale", rec.rationale},
            {"plan", tabular::plan_to_json(rec.plan)},
            {"spec", chart::serialize_spec(rec.spec)},
            {"valid", rec.valid},
            {"violations", rec.violations}};
}

auto recommendation_from_json(const json& doc) -> VisRecommendation {
    if (!doc.is_object()) fail("malformed_recommendation", "recommendation must be an object");
    for (const auto& item : doc.items()) {
        if (item.key() != "rationale" && item.key() != "plan" && item.key() != "spec" && item.key() != "valid" &&
            item.key() != "violations") {
            throw Error(ErrorKind::invalid, "unknown_field", "unknown recommendation field '" + item.key() + "'",
                        item.key());
        }
    }
    try {
        VisRecommendation rec;
        rec.rationale = doc.at("rationale").get<std::string>();
        rec.plan = tabular::plan_from_json(doc.at("plan"));
        rec.spec = chart::parse_spec(doc.at("spec"));
        return rec;
    } catch (const json::exception& e) {
        fail("malformed_recommendation", e.what());
    }
}

auto request_to_json(const RecommendRequest& request) -> json {
    json summaries = json::array();
    for (const auto& s : request.summaries) summaries.push_back(summary_to_json(s));
    return {{"selectedText", request.selected_text}, {"summaries", std::move(summaries)}};
}

auto HeuristicBackend::propose(const RecommendRequest& request) -> std::string {
    const std::string text = lower(request.selected_text);
    std::vector<DatasetView> views;
    for (const auto& summary : request.summaries) {
        auto it = datasets_.find(summary.dataset_id);
        if (it == datasets_.end() || !it->second) continue;
        views.push_back(build_view(text, summary, *it->second));
    }
    std::stable_sort(views.begin(), views.end(),
                     [](const DatasetView& a, const DatasetView& b) { return a.relatedness > b.relatedness; });

    const bool temporal_cue = any_of_words(text, {"over time", "trend", "trends"}) ||
                              any_prefix(text, {"increas", "decreas", "grow", "declin"}) || has_year_token(text);
    const bool top_cue = any_of_words(text, {"top", "highest", "lowest", "most", "least"});
    const bool compare_cue = top_cue || any_of_words(text, {"compare", "compared", "comparing", "versus", "vs"});
    const bool relation_cue = any_of_words(text, {"relationship", "relationships", "relation"}) ||
                              any_prefix(text, {"correlat"});
    const bool share_cue = any_of_words(text, {"share", "shares", "proportion", "proportions", "percent", "percentage",
                                               "fraction"}) ||
                           text.find('%') != std::string::npos;

    std::vector<Draft> drafts;
    auto push = [&](std::optional<Draft> d) {
        if (!d || drafts.size() >= kMaxRecommendations) return;
        for (const auto& existing : drafts) {
            if (existing.plan == d->plan && existing.spec == d->spec) return;
        }
        drafts.push_back(std::move(*d));
    };
    for (const auto& v : views) {
        if (temporal_cue) push(line_draft(v));
        if (compare_cue) push(bar_draft(v, top_cue));
        if (relation_cue) push(scatter_draft(v));
        if (share_cue) push(pie_draft(v));
    }
    if (drafts.empty()) {
        for (const auto& v : views) {
            if (v.relatedness > 0) push(count_draft(v));
        }
    }
    json recs = json::array();
    int n = 0;
    for (auto& d : drafts) {
        d.spec.id = fmt::format("rec-{}", ++n);
        recs.push_back(draft_json(d));
    }
    json out{{"recommendations", std::move(recs)}};
    if (drafts.empty()) out["reason"] = "no matching attributes";
    return out.dump();
}

void validate_recommendation(VisRecommendation& rec, const DatasetLookup& datasets) {
    rec.violations.clear();
    auto it = datasets.find(rec.plan.source_dataset);
    if (it == datasets.end() || !it->second) {
        rec.violations.push_back("plan: unknown source dataset '" + rec.plan.source_dataset + "'");
        rec.valid = false;
        return;
    }
    const auto& source = *it->second;
    for (const auto& m : tabular::validate_plan(rec.plan, source)) rec.violations.push_back("plan: " + m);
    if (!rec.violations.empty()) {
        rec.valid = false;
        return;
    }
    try {
        auto derived = rec.plan.steps.empty() ? source : tabular::execute_plan(rec.plan, source);
        if (rec.spec.dataset_id.empty() || rec.spec.dataset_id == source.id()) rec.spec.dataset_id = derived.id();
        for (const auto& m : chart::validate_spec(rec.spec, derived).messages()) rec.violations.push_back("spec: " + m);
    } catch (const Error& e) {
        rec.violations.push_back(std::string("plan: ") + e.what());
    }
    rec.valid = rec.violations.empty();
}

auto recommend(std::string_view selected_text, const std::vector<DatasetSummary>& summaries,
               RecommenderBackend& backend, const DatasetLookup& datasets) -> RecommendOutcome {
    if (selected_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        fail("empty_text", "select some narrative text first", "selectedText");
    }
    std::string body;
    try {
        body = backend.propose(RecommendRequest{std::string(selected_text), summaries});
    } catch (const std::exception& e) {
        throw Error(ErrorKind::upstream, "recommender_failed", e.what());
    }
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("recommendations") ||
        !doc["recommendations"].is_array()) {
        throw Error(ErrorKind::upstream, "recommender_failed", "recommender response is not a recommendation list");
    }
    RecommendOutcome out;
    for (const auto& item : doc["recommendations"]) {
        if (out.recommendations.size() == kMaxRecommendations) break;
        try {
            auto rec = recommendation_from_json(item);
            validate_recommendation(rec, datasets);
            out.recommendations.push_back(std::move(rec));
        } catch (const Error& e) {
            out.dropped.push_back(e.code() + ": " + e.what());
        }
    }
    if (out.recommendations.empty()) {
        if (doc.contains("reason") && doc["reason"].is_string()) {
            out.reason = doc["reason"].get<std::string>();
        } else {
            out.reason = out.dropped.empty() ? "no matching attributes" : "no parseable recommendations";
        }
    }
    return out;
}

auto materialize(const VisRecommendation& rec, const DatasetLookup& datasets, std::string source_text) -> Materialized {
    if (!rec.valid) fail("invalid_recommendation", "only valid recommendations can be added to the canvas");
    auto checked = rec;
    validate_recommendation(checked, datasets);
    if (!checked.valid) fail("invalid_recommendation", "recommendation no longer validates: " + checked.violations.front());
    const auto& source = datasets.at(rec.plan.source_dataset);
    DatasetPtr dataset = rec.plan.steps.empty() ? source
                                                : std::make_shared<const tabular::Dataset>(
                                                      tabular::execute_plan(rec.plan, *source));
    return Materialized{std::move(dataset), checked.spec, std::move(source_text), rec.plan};
}

}  // namespace weaver::recommender
