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

#include "weaver/facts/families.hpp"

#include "weaver/common/error.hpp"
#include "weaver/common/format.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace weaver::facts {

namespace {

using Payload = std::map<std::string, PayloadValue>;

auto make_fact(FactType type, std::string family, std::string_view template_key, std::vector<std::string> attributes,
               Payload payload, std::map<std::string, double> signals, const TemplateSet& templates) -> DataFact {
    DataFact fact;
    fact.type = type;
    fact.family = std::move(family);
    fact.attributes = std::move(attributes);
    fact.payload = std::move(payload);
    fact.signals = std::move(signals);
    fact.template_text = templates.render(template_key, fact.payload);
    for (const auto& [key, value] : fact.payload) {
        if (const auto* number = std::get_if<double>(&value)) {
            if (!std::isfinite(*number)) {
                throw Error(ErrorKind::internal, "non_finite_payload", "payload " + key + " is not finite");
            }
        }
    }
    return fact;
}

auto finite_values(std::span<const double> values) -> std::vector<double> {
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) {
        if (!std::isnan(v)) out.push_back(v);
    }
    return out;
}

auto mean_of(std::span<const double> values) -> std::optional<double> {
    auto m = kernels::moments(values);
    if (m.count == 0) return std::nullopt;
    return m.mean;
}

auto percent_change(double from, double to) -> std::optional<double> {
    if (from == 0.0) return std::nullopt;
    return (to - from) / std::abs(from) * 100.0;
}

void check_non_negative(double value, const std::string& label) {
    if (value < 0.0 || std::isnan(value)) fail("negative_value", "segment " + label + " has a negative value");
}

}  // namespace

auto summary_stat_facts(const std::string& attr, const kernels::Summary& selection, const kernels::Summary& global,
                        const TemplateSet& templates) -> std::vector<DataFact> {
    struct Cell {
        std::string_view stat;
        double sel;
        double glob;
    };
    const Cell cells[] = {
        {"count", static_cast<double>(selection.count), static_cast<double>(global.count)},
        {"mean", selection.mean, global.mean},
        {"median", selection.median, global.median},
        {"min", selection.min, global.min},
        {"max", selection.max, global.max},
        {"std", selection.std, global.std},
    };
    std::vector<DataFact> out;
    for (const auto& cell : cells) {
        std::string stat(cell.stat);
        std::string global_key = "global" + stat;
        global_key[6] = static_cast<char>(std::toupper(static_cast<unsigned char>(global_key[6])));
        Payload payload{{"attr", attr}, {stat, cell.sel}, {global_key, cell.glob}};
        out.push_back(make_fact(FactType::summary_stats, "summary_stats", "summary_stats." + stat, {attr},
                                std::move(payload), {}, templates));
    }
    return out;
}

auto frequency_facts(const std::string& attr, std::span<const std::string> selection_labels,
                     std::span<const std::string> global_labels, const TemplateSet& templates, kernels::Exec exec)
    -> FamilyOutcome {
    if (selection_labels.empty()) fail("empty_selection", "frequency facts need at least one selected value");
    std::vector<std::string> categories;
    std::unordered_map<std::string, std::int32_t> code_of;
    auto encode = [&](std::span<const std::string> labels, bool extend) {
        std::vector<std::int32_t> codes;
        codes.reserve(labels.size());
        for (const auto& label : labels) {
            auto it = code_of.find(label);
            if (it == code_of.end()) {
                if (!extend) {
                    codes.push_back(-1);
                    continue;
                }
                it = code_of.emplace(label, static_cast<std::int32_t>(categories.size())).first;
                categories.push_back(label);
            }
            codes.push_back(it->second);
        }
        return codes;
    };
    auto global_codes = encode(global_labels, true);
    auto selection_codes = encode(selection_labels, true);
    const std::size_t k = categories.size();
    auto global_counts = kernels::category_counts(global_codes, k, exec);
    auto selection_counts = kernels::category_counts(selection_codes, k, exec);

    const auto sel_total = static_cast<double>(selection_labels.size());
    const auto glob_total = static_cast<double>(std::max<std::size_t>(global_labels.size(), 1));
    std::vector<double> distribution(k);
    for (std::size_t c = 0; c < k; ++c) distribution[c] = static_cast<double>(selection_counts[c]) / sel_total;
    const double h = kernels::entropy(distribution);

    FamilyOutcome outcome;
    for (std::size_t c = 0; c < k; ++c) {
        std::map<std::string, double> signals{
            {"pSel", distribution[c]},
            {"pGlob", static_cast<double>(global_counts[c]) / glob_total},
            {"entropy", h},
            {"k", static_cast<double>(k)},
        };
        if (selection_counts[c] == 0) {
            outcome.facts.push_back(make_fact(FactType::frequency, "frequency", "frequency.none", {attr},
                                              {{"attr", attr}, {"category", categories[c]}}, std::move(signals),
                                              templates));
        } else {
            Payload payload{{"attr", attr}, {"category", categories[c]}, {"sharePct", distribution[c] * 100.0}};
            outcome.facts.push_back(make_fact(FactType::frequency, "frequency", "frequency.share", {attr},
                                              std::move(payload), std::move(signals), templates));
        }
    }
    return outcome;
}

auto detect_outliers(const std::string& attr, std::span<const double> population,
                     std::span<const LabeledValue> candidates, const TemplateSet& templates) -> FamilyOutcome {
    auto values = finite_values(population);
    if (values.size() < 5) return {{}, "outlier detection needs at least 5 values"};
    auto fences = kernels::tukey_fences(values);
    FamilyOutcome outcome;
    for (const auto& item : candidates) {
        if (std::isnan(item.value)) continue;
        double beyond = 0.0;
        if (item.value < fences.low) {
            beyond = fences.low - item.value;
        } else if (item.value > fences.high) {
            beyond = item.value - fences.high;
        } else {
            continue;
        }
        std::map<std::string, double> signals{{"value", item.value}, {"beyond", beyond}, {"iqr", fences.iqr},
                                              {"lowFence", fences.low}, {"highFence", fences.high}};
        outcome.facts.push_back(make_fact(FactType::outlier, "outliers", "outlier.item", {attr},
                                          {{"attr", attr}, {"item", item.label}}, std::move(signals), templates));
    }
    return outcome;
}

auto rank_extreme_facts(const std::string& attr, std::span<const double> population,
                        std::span<const LabeledValue> items, const TemplateSet& templates, kernels::Exec exec)
    -> FamilyOutcome {
    std::vector<LabeledValue> present;
    for (const auto& item : items) {
        if (!std::isnan(item.value)) present.push_back(item);
    }
    if (present.empty()) return {{}, "no selected values for " + attr};
    std::vector<double> queries;
    queries.reserve(present.size());
    for (const auto& item : present) queries.push_back(item.value);
    auto ranks = kernels::dense_rank_desc(population, queries, exec);
    const auto total = static_cast<double>(finite_values(population).size());

    FamilyOutcome outcome;
    for (std::size_t i = 0; i < present.size(); ++i) {
        Payload payload{{"attr", attr},
                        {"item", present[i].label},
                        {"rank", static_cast<double>(ranks[i])},
                        {"total", total},
                        {"value", present[i].value}};
        outcome.facts.push_back(make_fact(FactType::rank, "rank", "rank.item", {attr}, std::move(payload),
                                          {{"rank", static_cast<double>(ranks[i])}, {"total", total}}, templates));
    }
    if (present.size() >= 2) {
        std::size_t hi = 0;
        std::size_t lo = 0;
        for (std::size_t i = 1; i < present.size(); ++i) {
            if (present[i].value > present[hi].value) hi = i;
            if (present[i].value < present[lo].value) lo = i;
        }
        for (auto [index, key] : {std::pair{hi, "extreme.highest"}, std::pair{lo, "extreme.lowest"}}) {
            Payload payload{{"attr", attr}, {"item", present[index].label}, {"value", present[index].value}};
            outcome.facts.push_back(make_fact(FactType::extreme, "rank", key, {attr}, std::move(payload),
                                              {{"rank", static_cast<double>(ranks[index])}, {"total", total}},
                                              templates));
        }
    }
    return outcome;
}

auto value_facts(const std::string& attr, std::span<const LabeledValue> items, const TemplateSet& templates)
    -> std::vector<DataFact> {
    std::vector<DataFact> out;
    for (const auto& item : items) {
        if (std::isnan(item.value)) continue;
        out.push_back(make_fact(FactType::values, "values", "values.item", {attr},
                                {{"attr", attr}, {"item", item.label}, {"value", item.value}}, {}, templates));
    }
    return out;
}

auto group_vs_global(const std::string& attr, std::span<const double> selection, std::span<const double> global,
                     const TemplateSet& templates) -> FamilyOutcome {
    auto sel = mean_of(selection);
    auto glob = mean_of(global);
    if (!sel || !glob) return {{}, "no values to compare for " + attr};
    const double delta = *sel - *glob;
    Payload payload{{"attr", attr}, {"selMean", *sel}, {"globalMean", *glob}, {"meanDelta", delta}};
    std::map<std::string, double> signals{{"meanDelta", delta}};
    std::string key = "group_vs_global.mean_abs";
    if (auto pct = percent_change(*glob, *sel)) {
        payload["meanDeltaPct"] = *pct;
        payload["direction"] = std::string(delta > 0 ? "above" : delta < 0 ? "below" : "relative to");
        signals["pctDiff"] = *pct;
        key = "group_vs_global.mean";
    }
    FamilyOutcome outcome;
    outcome.facts.push_back(
        make_fact(FactType::group_vs_global, "group_vs_global", key, {attr}, std::move(payload), signals, templates));
    return outcome;
}

auto group_vs_group(const std::string& attr, const std::string& group_a, std::span<const double> values_a,
                    const std::string& group_b, std::span<const double> values_b, const TemplateSet& templates)
    -> FamilyOutcome {
    auto a = mean_of(values_a);
    auto b = mean_of(values_b);
    if (!a || !b) return {{}, "both groups need values for " + attr};
    const double delta = *a - *b;
    Payload payload{{"attr", attr},  {"groupA", group_a}, {"groupB", group_b},
                    {"meanA", *a},   {"meanB", *b},       {"meanDelta", delta}};
    std::map<std::string, double> signals{{"meanDelta", delta}};
    std::string key = "group_vs_group.mean_abs";
    if (auto pct = percent_change(*b, *a)) {
        payload["meanDeltaPct"] = *pct;
        signals["pctDiff"] = *pct;
        key = "group_vs_group.mean";
    }
    FamilyOutcome outcome;
    outcome.facts.push_back(make_fact(FactType::group_vs_group, "group_vs_group", key, {attr}, std::move(payload),
                                      signals, templates));
    return outcome;
}

auto difference_facts(const std::string& attr, std::span<const LabeledValue> items, const TemplateSet& templates)
    -> FamilyOutcome {
    std::vector<LabeledValue> present;
    for (const auto& item : items) {
        if (!std::isnan(item.value)) present.push_back(item);
    }
    if (present.size() < 2) return {{}, "difference needs at least 2 clicked items"};
    FamilyOutcome outcome;
    for (std::size_t i = 0; i + 1 < present.size(); ++i) {
        const auto& a = present[i];
        const auto& b = present[i + 1];
        const double gap = std::abs(b.value - a.value);
        Payload payload{{"attr", attr}, {"itemA", a.label}, {"itemB", b.label}, {"gap", gap}};
        std::map<std::string, double> signals{{"delta", b.value - a.value}};
        std::string key = "difference.pair_abs";
        if (a.value != 0.0) {
            const double pct = gap / std::abs(a.value) * 100.0;
            payload["gapPct"] = pct;
            payload["direction"] =
                std::string(b.value > a.value ? "higher" : b.value < a.value ? "lower" : "difference");
            signals["pctDiff"] = pct;
            key = "difference.pair";
        }
        outcome.facts.push_back(
            make_fact(FactType::difference, "difference", key, {attr}, std::move(payload), signals, templates));
    }
    return outcome;
}

auto normalized_slope(std::span<const TimePoint> sorted_points) -> double {
    const std::size_t n = sorted_points.size();
    if (n < 2) return 0.0;
    std::vector<double> xs(n);
    std::vector<double> ys(n);
    double lo = sorted_points[0].value;
    double hi = lo;
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = static_cast<double>(i);
        ys[i] = sorted_points[i].value;
        lo = std::min(lo, ys[i]);
        hi = std::max(hi, ys[i]);
    }
    if (hi == lo) return 0.0;
    auto fit = kernels::least_squares(xs, ys);
    if (!fit) return 0.0;
    return fit->slope * static_cast<double>(n - 1) / (hi - lo);
}

auto trend_facts(const std::string& attr, std::vector<TimePoint> points, const TrendOptions& options,
                 const TemplateSet& templates) -> FamilyOutcome {
    std::erase_if(points, [](const TimePoint& p) { return std::isnan(p.value) || std::isnan(p.key); });
    if (points.size() < 2) return {{}, "trend needs at least 2 points in the timeframe"};
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.key < b.key; });

    const auto& first = points.front();
    const auto& last = points.back();
    std::size_t hi = 0;
    std::size_t lo = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].value > points[hi].value) hi = i;
        if (points[i].value < points[lo].value) lo = i;
    }
    const double range = points[hi].value - points[lo].value;
    const double slope = normalized_slope(points);
    std::string direction = "flat";
    if (slope > options.flat_threshold) direction = "increasing";
    if (slope < -options.flat_threshold) direction = "decreasing";

    std::string prefix = options.series.empty() ? std::string() : "For " + options.series + ", ";
    Payload base{{"attr", attr}, {"seriesPrefix", prefix}, {"startTime", first.time}, {"endTime", last.time}};
    if (!options.series.empty()) base["series"] = options.series;
    auto with = [&base](Payload extra) {
        Payload p = base;
        p.merge(extra);
        return p;
    };

    FamilyOutcome outcome;
    outcome.facts.push_back(make_fact(FactType::trend, "trend", "trend.direction", {attr},
                                      with({{"direction", direction}}), {{"normSlope", slope}}, templates));
    outcome.facts.push_back(make_fact(FactType::trend, "start_end", "trend.start_end", {attr},
                                      with({{"startValue", first.value}, {"endValue", last.value}}),
                                      {{"normSlope", slope}}, templates));
    outcome.facts.push_back(make_fact(FactType::extreme, "extreme_points", "trend.extremes", {attr},
                                      with({{"maxValue", points[hi].value},
                                            {"maxTime", points[hi].time},
                                            {"minValue", points[lo].value},
                                            {"minTime", points[lo].time}}),
                                      {{"normSlope", slope}}, templates));
    outcome.facts.push_back(make_fact(FactType::trend, "range", "trend.range", {attr}, with({{"range", range}}),
                                      {{"normSlope", slope}}, templates));
    const double change = last.value - first.value;
    std::map<std::string, double> change_signals{{"normSlope", slope}};
    auto pct = range == 0.0 ? std::nullopt : percent_change(first.value, last.value);
    if (pct) {
        change_signals["pctDiff"] = *pct;
        outcome.facts.push_back(make_fact(FactType::difference, "difference", "trend.change", {attr},
                                          with({{"change", change}, {"changePct", *pct}}), change_signals,
                                          templates));
    } else {
        outcome.facts.push_back(make_fact(FactType::difference, "difference", "trend.change_abs", {attr},
                                          with({{"change", change}}), change_signals, templates));
    }
    return outcome;
}

auto correlation_strength(double r) -> std::string_view {
    const double a = std::abs(r);
    if (a < 0.3) return "weak";
    if (a < 0.7) return "moderate";
    return "strong";
}

auto correlation_trendline(const std::string& x_attr, const std::string& y_attr, std::span<const double> xs,
                           std::span<const double> ys, const TemplateSet& templates) -> CorrelationOutcome {
    std::vector<double> px;
    std::vector<double> py;
    for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
        if (std::isnan(xs[i]) || std::isnan(ys[i])) continue;
        px.push_back(xs[i]);
        py.push_back(ys[i]);
    }
    if (px.size() < 3) return UndefinedCorrelation{"fewer than 3 paired points"};
    auto r = kernels::pearson(px, py);
    auto fit = kernels::least_squares(px, py);
    if (!r || !fit) return UndefinedCorrelation{"zero variance in " + x_attr + " or " + y_attr};

    std::vector<DataFact> facts;
    Payload corr{{"xAttr", x_attr},
                 {"yAttr", y_attr},
                 {"r", *r},
                 {"strength", std::string(correlation_strength(*r))},
                 {"polarity", std::string(*r < 0 ? "negative" : "positive")}};
    facts.push_back(make_fact(FactType::correlation, "correlation", "correlation.pair", {x_attr, y_attr},
                              std::move(corr), {{"r", *r}, {"n", static_cast<double>(px.size())}}, templates));
    Payload line{{"xAttr", x_attr},
                 {"yAttr", y_attr},
                 {"slope", fit->slope},
                 {"sign", std::string(fit->intercept < 0 ? "-" : "+")},
                 {"offset", std::abs(fit->intercept)}};
    facts.push_back(make_fact(FactType::trendline, "trendline", "trendline.fit", {x_attr, y_attr}, std::move(line),
                              {{"r", *r}, {"slope", fit->slope}, {"intercept", fit->intercept}}, templates));
    return facts;
}

auto proportion_share_facts(const std::string& measure, std::span<const ProportionPart> parts,
                            const TemplateSet& templates) -> std::vector<DataFact> {
    std::vector<DataFact> out;
    for (const auto& part : parts) {
        check_non_negative(part.value, part.label);
        if (!(part.whole > 0.0)) fail("zero_total", "the whole for " + part.label + " is not positive");
        const double share = part.value / part.whole;
        Payload payload{{"measure", measure}, {"part", part.label}, {"sharePct", share * 100.0},
                        {"value", part.value},  {"total", part.whole}};
        std::map<std::string, double> signals{{"share", share}};
        std::string key = "proportion.share";
        if (part.parent_value) {
            if (!(*part.parent_value > 0.0)) fail("zero_total", "the parent of " + part.label + " is empty");
            payload["parentSharePct"] = part.value / *part.parent_value * 100.0;
            payload["parent"] = part.parent_label;
            signals["parentShare"] = part.value / *part.parent_value;
            key = "proportion.node";
        } else if (!part.whole_label.empty()) {
            payload["whole"] = part.whole_label;
            key = "proportion.share_of_whole";
        }
        out.push_back(make_fact(FactType::proportion, "proportions", key, {measure}, std::move(payload),
                                std::move(signals), templates));
    }
    return out;
}

auto proportion_compare_facts(const std::string& measure, std::span<const ProportionPart> parts,
                              const TemplateSet& templates) -> std::vector<DataFact> {
    std::vector<DataFact> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = i + 1; j < parts.size(); ++j) {
            check_non_negative(parts[i].value, parts[i].label);
            check_non_negative(parts[j].value, parts[j].label);
            if (!(parts[i].whole > 0.0) || !(parts[j].whole > 0.0)) fail("zero_total", "segment whole is not positive");
            double share_i = parts[i].value / parts[i].whole;
            double share_j = parts[j].value / parts[j].whole;
            if (share_i == share_j) {
                out.push_back(make_fact(FactType::proportion, "compare_proportions", "proportion.compare_equal",
                                        {measure},
                                        {{"measure", measure},
                                         {"partA", parts[i].label},
                                         {"partB", parts[j].label},
                                         {"sharePct", share_i * 100.0}},
                                        {{"share", share_i}, {"ratio", 1.0}}, templates));
                continue;
            }
            const auto& big = share_i > share_j ? parts[i] : parts[j];
            const auto& small = share_i > share_j ? parts[j] : parts[i];
            double big_share = std::max(share_i, share_j);
            double small_share = std::min(share_i, share_j);
            if (small_share == 0.0) continue;
            out.push_back(make_fact(FactType::proportion, "compare_proportions", "proportion.compare", {measure},
                                    {{"measure", measure},
                                     {"partA", big.label},
                                     {"partB", small.label},
                                     {"shareAPct", big_share * 100.0},
                                     {"shareBPct", small_share * 100.0},
                                     {"ratio", big_share / small_share}},
                                    {{"share", big_share - small_share}, {"ratio", big_share / small_share}},
                                    templates));
        }
    }
    return out;
}

auto proportion_sum_fact(const std::string& measure, double selected_sum, double total, const TemplateSet& templates)
    -> DataFact {
    check_non_negative(selected_sum, "selection");
    if (!(total > 0.0)) fail("zero_total", "the total is not positive");
    return make_fact(FactType::proportion, "sum_proportion", "proportion.sum", {measure},
                     {{"measure", measure}, {"sum", selected_sum}, {"total", total}, {"sumPct", selected_sum / total * 100.0}},
                     {{"share", selected_sum / total}}, templates);
}

auto proportion_facts(const std::string& measure, std::span<const LabeledValue> segments, double total,
                      const TemplateSet& templates) -> std::vector<DataFact> {
    std::vector<ProportionPart> parts;
    double sum = 0.0;
    for (const auto& s : segments) {
        parts.push_back({s.label, s.value, total, {}, std::nullopt, {}});
        sum += s.value;
    }
    auto out = proportion_share_facts(measure, parts, templates);
    if (parts.size() >= 2) {
        auto compare = proportion_compare_facts(measure, parts, templates);
        out.insert(out.end(), compare.begin(), compare.end());
        out.push_back(proportion_sum_fact(measure, sum, total, templates));
    }
    return out;
}

auto chained_proportion(const std::string& measure, std::span<const std::string> path, std::span<const double> totals,
                        const TemplateSet& templates) -> DataFact {
    if (path.empty() || totals.size() != path.size() + 1) {
        fail("invalid_path", "a chain needs one total per hop plus the root total");
    }
    for (std::size_t i = 0; i < totals.size(); ++i) {
        check_non_negative(totals[i], i == 0 ? std::string("root") : path[i - 1]);
    }
    Payload payload{{"measure", measure}, {"leaf", path.back()}};
    std::string hops;
    std::string path_text;
    std::map<std::string, double> signals;
    for (std::size_t i = 1; i < totals.size(); ++i) {
        const std::string parent = i == 1 ? std::string("the total") : path[i - 2];
        if (!(totals[i - 1] > 0.0)) fail("zero_parent_total", "the total of " + parent + " is zero");
        const double share = totals[i] / totals[i - 1];
        const std::string key = "hop" + std::to_string(i) + "Pct";
        payload[key] = share * 100.0;
        signals["hop" + std::to_string(i)] = share;
        if (!hops.empty()) hops += ", then ";
        hops += templates.render("chained_proportion.hop",
                                 {{"hopPct", share * 100.0}, {"parent", parent}, {"child", path[i - 1]}});
        if (!path_text.empty()) path_text += " > ";
        path_text += path[i - 1];
    }
    const double chained = totals.back() / totals.front();
    payload["chainedPct"] = chained * 100.0;
    payload["hops"] = hops;
    payload["pathText"] = path_text;
    signals["share"] = chained;
    return make_fact(FactType::chained_proportion, "chained_proportion", "chained_proportion.chain", {measure},
                     std::move(payload), std::move(signals), templates);
}

auto compare_series(const std::string& attr, const Series& a, const Series& b, const TemplateSet& templates)
    -> DataFact {
    auto extent = [](const Series& s) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : s.points) {
            if (std::isnan(p.value)) continue;
            lo = std::min(lo, p.key);
            hi = std::max(hi, p.key);
        }
        return std::pair{lo, hi};
    };
    auto [a_lo, a_hi] = extent(a);
    auto [b_lo, b_hi] = extent(b);
    const double lo = std::max(a_lo, b_lo);
    const double hi = std::min(a_hi, b_hi);
    if (!(lo <= hi)) fail("no_overlap", a.label + " and " + b.label + " share no x range");

    struct Window {
        double mean = 0.0;
        const TimePoint* first = nullptr;
        const TimePoint* last = nullptr;
    };
    auto window = [lo, hi](const Series& s) {
        Window w;
        std::size_t n = 0;
        for (const auto& p : s.points) {
            if (std::isnan(p.value) || p.key < lo || p.key > hi) continue;
            w.mean += p.value;
            ++n;
            if (w.first == nullptr || p.key < w.first->key) w.first = &p;
            if (w.last == nullptr || p.key >= w.last->key) w.last = &p;
        }
        w.mean /= static_cast<double>(n);
        return w;
    };
    Window wa = window(a);
    Window wb = window(b);
    Payload payload{{"attr", attr},
                    {"seriesA", a.label},
                    {"seriesB", b.label},
                    {"overlapStart", wa.first->time},
                    {"overlapEnd", wa.last->time},
                    {"meanA", wa.mean},
                    {"meanB", wb.mean},
                    {"endA", wa.last->value},
                    {"endB", wb.last->value},
                    {"endGap", wa.last->value - wb.last->value}};
    std::map<std::string, double> signals{{"meanDelta", wa.mean - wb.mean}};
    std::string key = "line_comparison.pair_abs";
    if (wb.mean != 0.0) {
        payload["ratio"] = wa.mean / wb.mean;
        signals["ratio"] = wa.mean / wb.mean;
        signals["pctDiff"] = (wa.mean - wb.mean) / std::abs(wb.mean) * 100.0;
        key = "line_comparison.pair";
    }
    return make_fact(FactType::line_comparison, "compare_lines", key, {attr}, std::move(payload), std::move(signals),
                     templates);
}

auto line_comparison(const std::string& attr, std::span<const Series> series, const TemplateSet& templates)
    -> std::vector<DataFact> {
    if (series.size() < 2) fail("too_few_series", "line comparison needs at least 2 series");
    std::vector<DataFact> out;
    for (const auto& s : series) {
        auto trend = trend_facts(attr, s.points, {kDefaultFlatThreshold, s.label}, templates);
        for (auto& fact : trend.facts) {
            if (fact.family == "trend") out.push_back(std::move(fact));
        }
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = i + 1; j < series.size(); ++j) {
            out.push_back(compare_series(attr, series[i], series[j], templates));
        }
    }
    return out;
}

}  // namespace weaver::facts
