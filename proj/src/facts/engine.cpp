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

#include "weaver/facts/engine.hpp"

#include "weaver/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <set>

namespace weaver::facts {

namespace {

using callout::CalloutKind;
using chart::ChartType;
using tabular::AttrType;
using tabular::Column;
using tabular::Dataset;

struct Task {
    std::vector<Family> families;
    std::function<FamilyOutcome()> run;
};

class Context {
public:
    Context(const callout::CalloutPackage& package, std::vector<std::string> attrs, const EngineOptions& options)
        : package_(package), ds_(*package.dataset), spec_(package.spec), options_(options),
          templates_(options.templates != nullptr ? *options.templates : TemplateSet::builtin()) {
        for (const auto& name : attrs) {
            const Column& col = ds_.column(name);
            if (col.type() == AttrType::quantitative) {
                quantitative_.push_back(name);
            } else if (col.type() == AttrType::categorical && name != spec_.identity_attr) {
                categorical_.push_back(name);
            }
        }
    }

    auto build_stat_table() const -> StatTable {
        StatTable table;
        for (const auto& attr : quantitative_) {
            auto sel = kernels::summarize(selection_values(attr), options_.exec);
            if (!sel) continue;
            auto glob = kernels::summarize(ds_.column(attr).numeric_values(), options_.exec);
            table.rows.push_back({attr, *sel, *glob});
        }
        return table;
    }

    auto tasks(std::span<const FamilyEntry> cell, const StatTable& stats) const -> std::vector<Task> {
        std::vector<Task> out;
        const auto kind = package_.interaction.kind;
        for (const auto& entry : cell) {
            if (!entry.implemented) continue;
            const Family f = entry.family;
            switch (f) {
                case Family::summary_stats:
                    for (const auto& row : stats.rows) {
                        out.push_back({{f}, [this, row] {
                                           return FamilyOutcome{
                                               summary_stat_facts(row.attribute, row.selection, row.global, templates_),
                                               std::nullopt};
                                       }});
                    }
                    break;
                case Family::frequency:
                    for (const auto& attr : categorical_) {
                        out.push_back({{f}, [this, attr] {
                                           auto sel = selection_labels(attr);
                                           if (sel.empty()) return FamilyOutcome{{}, "no selected values for " + attr};
                                           return frequency_facts(attr, sel, global_labels(attr), templates_,
                                                                  options_.exec);
                                       }});
                    }
                    break;
                case Family::group_vs_global:
                    if (kind == CalloutKind::legend_click && package_.interaction.categories.size() != 1) {
                        out.push_back({{f}, [] {
                                           return FamilyOutcome{{}, "group vs. global needs exactly one selected group"};
                                       }});
                        break;
                    }
                    for (const auto& attr : quantitative_) {
                        out.push_back({{f}, [this, attr] {
                                           return group_vs_global(attr, selection_values(attr),
                                                                  ds_.column(attr).numeric_values(), templates_);
                                       }});
                    }
                    break;
                case Family::group_vs_group:
                    if (package_.interaction.categories.size() < 2) {
                        out.push_back({{f}, [] {
                                           return FamilyOutcome{{}, "group vs. group needs at least two selected groups"};
                                       }});
                        break;
                    }
                    for (const auto& attr : quantitative_) {
                        out.push_back({{f}, [this, attr] { return groups_compare(attr); }});
                    }
                    break;
                case Family::rank:
                case Family::rank_extreme:
                    for (const auto& attr : quantitative_) {
                        out.push_back({{f}, [this, attr] {
                                           auto items = selected_items(attr);
                                           return rank_extreme_facts(attr, ds_.column(attr).numeric_values(), items,
                                                                     templates_, options_.exec);
                                       }});
                    }
                    break;
                case Family::values:
                    for (const auto& attr : quantitative_) {
                        out.push_back({{f}, [this, attr] {
                                           auto items = selected_items(attr);
                                           return FamilyOutcome{value_facts(attr, items, templates_), std::nullopt};
                                       }});
                    }
                    break;
                case Family::outliers:
                    for (const auto& attr : quantitative_) {
                        out.push_back({{f}, [this, attr, kind] {
                                           auto items = selected_items(attr);
                                           if (kind == CalloutKind::discrete_click) {
                                               return detect_outliers(attr, ds_.column(attr).numeric_values(), items,
                                                                      templates_);
                                           }
                                           return detect_outliers(attr, selection_values(attr), items, templates_);
                                       }});
                    }
                    break;
                case Family::difference:
                    if (spec_.chart_type == ChartType::line) break;  // produced with the timeframe task
                    for (const auto& attr : quantitative_) {
                        out.push_back({{f}, [this, attr] {
                                           return difference_facts(attr, selected_items(attr), templates_);
                                       }});
                    }
                    break;
                case Family::trend:
                    if (kind == CalloutKind::timeframe_brush) {
                        for (const auto& attr : series_attributes()) {
                            for (const auto& series : series_of(attr, package_.selection)) {
                                out.push_back({timeframe_families(cell), [this, attr, series] {
                                                   return trend_facts(attr, series.points,
                                                                      {options_.flat_threshold, series.label},
                                                                      templates_);
                                               }});
                            }
                        }
                    } else {
                        for (const auto& attr : series_attributes()) {
                            for (const auto& series : selected_series(attr)) {
                                out.push_back({{f}, [this, attr, series] {
                                                   auto outcome = trend_facts(
                                                       attr, series.points, {options_.flat_threshold, series.label},
                                                       templates_);
                                                   std::erase_if(outcome.facts,
                                                                 [](const DataFact& d) { return d.family != "trend"; });
                                                   return outcome;
                                               }});
                            }
                        }
                    }
                    break;
                case Family::start_end:
                case Family::extreme_points:
                case Family::range:
                    break;  // produced with the timeframe task
                case Family::compare_lines:
                    for (const auto& attr : series_attributes()) {
                        out.push_back({{f}, [this, attr] {
                                           auto series = selected_series(attr);
                                           if (series.size() < 2) {
                                               return FamilyOutcome{{}, "line comparison needs at least two lines"};
                                           }
                                           FamilyOutcome outcome;
                                           for (std::size_t i = 0; i < series.size(); ++i) {
                                               for (std::size_t j = i + 1; j < series.size(); ++j) {
                                                   outcome.facts.push_back(
                                                       compare_series(attr, series[i], series[j], templates_));
                                               }
                                           }
                                           return outcome;
                                       }});
                    }
                    break;
                case Family::correlation:
                    out.push_back({{Family::correlation, Family::trendline}, [this] { return correlation(); }});
                    break;
                case Family::trendline:
                    break;  // produced with the correlation task
                case Family::proportions:
                case Family::compare_proportions:
                case Family::sum_proportion:
                case Family::hierarchical_proportions:
                    out.push_back({{f}, [this, f] { return proportions(f); }});
                    break;
                case Family::chained_proportion:
                    out.push_back({{f}, [this] { return chain(); }});
                    break;
                default:
                    break;
            }
        }
        return out;
    }

private:
    auto selection_values(const std::string& attr) const -> std::vector<double> {
        const Column& col = ds_.column(attr);
        std::vector<double> out;
        out.reserve(package_.selection.size());
        for (std::size_t row : package_.selection) out.push_back(col.numeric(row));
        return out;
    }

    auto selection_labels(const std::string& attr) const -> std::vector<std::string> {
        const Column& col = ds_.column(attr);
        std::vector<std::string> out;
        for (std::size_t row : package_.selection) {
            if (!col.is_null(row)) out.push_back(col.label(row));
        }
        return out;
    }

    auto global_labels(const std::string& attr) const -> std::vector<std::string> {
        const Column& col = ds_.column(attr);
        std::vector<std::string> out;
        for (std::size_t row = 0; row < col.size(); ++row) {
            if (!col.is_null(row)) out.push_back(col.label(row));
        }
        return out;
    }

    auto item_label(std::size_t row) const -> std::string {
        if (spec_.identity_attr) {
            const Column& col = ds_.column(*spec_.identity_attr);
            if (!col.is_null(row)) return col.label(row);
        }
        if (spec_.x_attr) {
            const Column& col = ds_.column(*spec_.x_attr);
            if (col.type() != AttrType::quantitative && !col.is_null(row)) return col.label(row);
        }
        return "row " + std::to_string(row + 1);
    }

    // Clicked rows in click order; otherwise the selection in row order.
    auto item_rows() const -> std::vector<std::size_t> {
        if (package_.interaction.kind != CalloutKind::discrete_click) return package_.selection;
        std::vector<std::size_t> rows;
        for (std::size_t row : package_.interaction.row_keys) {
            if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
        }
        return rows;
    }

    auto selected_items(const std::string& attr) const -> std::vector<LabeledValue> {
        const Column& col = ds_.column(attr);
        std::vector<LabeledValue> items;
        for (std::size_t row : item_rows()) items.push_back({item_label(row), col.numeric(row)});
        return items;
    }

    auto legend_column() const -> const Column& {
        return ds_.column(spec_.color_attr ? *spec_.color_attr : *spec_.x_attr);
    }

    auto groups_compare(const std::string& attr) const -> FamilyOutcome {
        const Column& legend = legend_column();
        const Column& col = ds_.column(attr);
        const auto& groups = package_.interaction.categories;
        std::vector<std::vector<double>> values(groups.size());
        for (std::size_t row : package_.selection) {
            if (legend.is_null(row)) continue;
            auto it = std::find(groups.begin(), groups.end(), legend.label(row));
            if (it != groups.end()) values[static_cast<std::size_t>(it - groups.begin())].push_back(col.numeric(row));
        }
        FamilyOutcome outcome;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                auto pair = group_vs_group(attr, groups[i], values[i], groups[j], values[j], templates_);
                for (auto& fact : pair.facts) outcome.facts.push_back(std::move(fact));
                if (pair.skip_reason && !outcome.skip_reason) outcome.skip_reason = pair.skip_reason;
            }
        }
        return outcome;
    }

    auto series_attributes() const -> std::vector<std::string> {
        std::vector<std::string> out;
        for (const auto& attr : quantitative_) {
            if (attr != spec_.x_attr) out.push_back(attr);
        }
        return out;
    }

    auto series_of(const std::string& attr, std::span<const std::size_t> rows) const -> std::vector<Series> {
        const Column& x = ds_.column(*spec_.x_attr);
        const Column& y = ds_.column(attr);
        const Column* color = spec_.color_attr ? &ds_.column(*spec_.color_attr) : nullptr;
        std::vector<Series> out;
        std::map<std::string, std::size_t> index;
        for (std::size_t row : rows) {
            if (x.is_null(row) || y.is_null(row)) continue;
            std::string label = color != nullptr ? (color->is_null(row) ? std::string() : color->label(row)) : "";
            if (color != nullptr && color->is_null(row)) continue;
            auto [it, inserted] = index.emplace(label, out.size());
            if (inserted) out.push_back({label, {}});
            out[it->second].points.push_back({x.numeric(row), x.label(row), y.numeric(row)});
        }
        return out;
    }

    // Series of the selected lines, in the order they were selected.
    auto selected_series(const std::string& attr) const -> std::vector<Series> {
        auto all = series_of(attr, package_.selection);
        if (package_.interaction.kind != CalloutKind::line_select) return all;
        std::vector<Series> ordered;
        for (const auto& category : package_.interaction.categories) {
            for (const auto& s : all) {
                if (s.label == category) ordered.push_back(s);
            }
        }
        return ordered;
    }

    static auto timeframe_families(std::span<const FamilyEntry> cell) -> std::vector<Family> {
        std::vector<Family> out;
        for (const auto& entry : cell) {
            if (entry.implemented) out.push_back(entry.family);
        }
        return out;
    }

    auto correlation() const -> FamilyOutcome {
        auto xs = selection_values(*spec_.x_attr);
        auto ys = selection_values(*spec_.y_attr);
        auto result = correlation_trendline(*spec_.x_attr, *spec_.y_attr, xs, ys, templates_);
        if (auto* undefined = std::get_if<UndefinedCorrelation>(&result)) {
            return {{}, "undefined correlation: " + undefined->reason};
        }
        return {std::get<std::vector<DataFact>>(std::move(result)), std::nullopt};
    }

    auto sum_where(const std::function<bool(std::size_t)>& keep) const -> double {
        const Column& y = ds_.column(*spec_.y_attr);
        double total = 0.0;
        for (std::size_t row = 0; row < ds_.row_count(); ++row) {
            if (y.is_null(row) || !keep(row)) continue;
            if (y.numeric(row) < 0.0) fail("negative_value", *spec_.y_attr + " has negative values");
            total += y.numeric(row);
        }
        return total;
    }

    auto matches_path(std::size_t row, std::span<const std::string> path) const -> bool {
        for (std::size_t depth = 0; depth < path.size(); ++depth) {
            const Column& col = ds_.column(spec_.hierarchy_attrs[depth]);
            if (col.is_null(row) || col.label(row) != path[depth]) return false;
        }
        return true;
    }

    static auto join_path(std::span<const std::string> path) -> std::string {
        std::string out;
        for (const auto& part : path) {
            if (!out.empty()) out += " > ";
            out += part;
        }
        return out;
    }

    auto proportions(Family family) const -> FamilyOutcome {
        const std::string& measure = *spec_.y_attr;
        const double total = sum_where([](std::size_t) { return true; });
        std::vector<ProportionPart> parts;
        std::vector<ProportionPart> compare_parts;
        const auto& callout = package_.interaction;
        if (spec_.chart_type == ChartType::pie_donut) {
            const Column& x = ds_.column(*spec_.x_attr);
            std::vector<std::string> slices;
            for (std::size_t row : item_rows()) {
                if (x.is_null(row)) continue;
                auto label = x.label(row);
                if (std::find(slices.begin(), slices.end(), label) == slices.end()) slices.push_back(label);
            }
            for (const auto& slice : slices) {
                double value = sum_where([&](std::size_t row) { return !x.is_null(row) && x.label(row) == slice; });
                parts.push_back({slice, value, total, {}, std::nullopt, {}});
            }
            compare_parts = parts;
        } else if (spec_.chart_type == ChartType::stacked_bar) {
            const Column& x = ds_.column(*spec_.x_attr);
            const Column& color = ds_.column(*spec_.color_attr);
            for (const auto& ref : callout.segments) {
                auto in_bar = [&](std::size_t row) { return !x.is_null(row) && x.label(row) == ref.bar; };
                double whole = sum_where(in_bar);
                double value = sum_where(
                    [&](std::size_t row) { return in_bar(row) && !color.is_null(row) && color.label(row) == ref.segment; });
                parts.push_back({ref.segment, value, whole, ref.bar, std::nullopt, {}});
                compare_parts.push_back({ref.segment + " in " + ref.bar, value, whole, ref.bar, std::nullopt, {}});
            }
        } else {
            for (const auto& path : callout.paths) {
                double value = sum_where([&](std::size_t row) { return matches_path(row, path); });
                ProportionPart part{join_path(path), value, total, {}, std::nullopt, {}};
                if (path.size() >= 2) {
                    std::span<const std::string> parent(path.data(), path.size() - 1);
                    part.parent_value = sum_where([&](std::size_t row) { return matches_path(row, parent); });
                    part.parent_label = path[path.size() - 2];
                }
                parts.push_back(part);
                compare_parts.push_back({part.label, value, total, {}, std::nullopt, {}});
            }
        }
        if (!(total > 0.0)) return {{}, "the total " + measure + " is zero"};
        FamilyOutcome outcome;
        switch (family) {
            case Family::proportions:
                outcome.facts = proportion_share_facts(measure, parts, templates_);
                break;
            case Family::compare_proportions:
                if (compare_parts.size() < 2) return {{}, "comparison needs at least two selected segments"};
                outcome.facts = proportion_compare_facts(measure, compare_parts, templates_);
                break;
            case Family::sum_proportion: {
                if (parts.size() < 2) return {{}, "sum needs at least two selected segments"};
                double sum = 0.0;
                for (const auto& p : parts) sum += p.value;
                outcome.facts.push_back(proportion_sum_fact(measure, sum, total, templates_));
                break;
            }
            case Family::hierarchical_proportions: {
                std::set<std::size_t> rows;
                for (const auto& path : callout.paths) {
                    for (std::size_t row = 0; row < ds_.row_count(); ++row) {
                        if (matches_path(row, path)) rows.insert(row);
                    }
                }
                double sum = sum_where([&](std::size_t row) { return rows.count(row) > 0; });
                outcome.facts.push_back(proportion_sum_fact(measure, sum, total, templates_));
                break;
            }
            default:
                break;
        }
        return outcome;
    }

    auto chain() const -> FamilyOutcome {
        const auto& path = package_.interaction.path;
        std::vector<double> totals{sum_where([](std::size_t) { return true; })};
        for (std::size_t depth = 1; depth <= path.size(); ++depth) {
            std::span<const std::string> prefix(path.data(), depth);
            totals.push_back(sum_where([&](std::size_t row) { return matches_path(row, prefix); }));
        }
        return {{chained_proportion(*spec_.y_attr, path, totals, templates_)}, std::nullopt};
    }

    const callout::CalloutPackage& package_;
    const Dataset& ds_;
    const chart::ChartSpec& spec_;
    const EngineOptions& options_;
    const TemplateSet& templates_;
    std::vector<std::string> quantitative_;
    std::vector<std::string> categorical_;
};

struct Slot {
    FamilyOutcome outcome;
    std::exception_ptr error;
};

}  // namespace

auto to_wire(FamilyStatus status) -> std::string_view {
    switch (status) {
        case FamilyStatus::emitted: return "emitted";
        case FamilyStatus::skipped: return "skipped";
        case FamilyStatus::not_implemented: return "not_implemented";
    }
    return "";
}

auto processed_attributes(const callout::CalloutPackage& package, std::span<const std::string> attrs_of_interest)
    -> std::vector<std::string> {
    const auto& spec = package.spec;
    const Dataset& ds = *package.dataset;
    std::set<std::string> wanted;
    for (const auto& attr : {spec.x_attr, spec.y_attr, spec.color_attr}) {
        if (attr) wanted.insert(*attr);
    }
    wanted.insert(spec.hierarchy_attrs.begin(), spec.hierarchy_attrs.end());
    for (const auto& attr : attrs_of_interest) {
        if (ds.find(attr) == nullptr) fail("unknown_column", "no column named " + attr, "attrsOfInterest");
        wanted.insert(attr);
    }
    std::vector<std::string> out;
    for (const auto& col : ds.columns()) {
        if (wanted.count(col.name()) > 0) out.push_back(col.name());
    }
    return out;
}

auto compute_facts(const callout::CalloutPackage& package, std::span<const std::string> attrs_of_interest,
                   const EngineOptions& options) -> FactResult {
    if (!package.dataset) fail("missing_dataset", "callout package has no dataset");
    const auto chart_type = package.spec.chart_type;
    const auto kind = package.interaction.kind;
    auto cell = cell_families(chart_type, kind);
    if (cell.empty()) {
        fail("illegal_callout", std::string(callout::to_wire(kind)) + " is not supported on " +
                                    std::string(chart::to_wire(chart_type)));
    }
    if (std::none_of(cell.begin(), cell.end(), [](const FamilyEntry& e) { return e.implemented; })) {
        throw Error(ErrorKind::not_implemented, "not_implemented",
                    "no fact family is implemented for " + std::string(callout::to_wire(kind)) + " on " +
                        std::string(chart::to_wire(chart_type)));
    }
    auto attrs = processed_attributes(package, attrs_of_interest);
    if (package.selection.empty()) fail("empty_selection", "the callout selects no data points");

    Context context(package, attrs, options);
    FactResult result;
    result.stat_table = context.build_stat_table();
    auto tasks = context.tasks(cell, result.stat_table);

    std::vector<Slot> slots(tasks.size());
    auto run = [&](std::size_t i) {
        try {
            slots[i].outcome = tasks[i].run();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::internal) {
                slots[i].error = std::current_exception();
            } else {
                slots[i].outcome = {{}, e.what()};
            }
        } catch (...) {
            slots[i].error = std::current_exception();
        }
    };
    if (options.exec == kernels::Exec::parallel && tasks.size() > 1) {
        const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < tasks.size(); ++i) run(i);
    }

    std::map<Family, std::vector<std::string>> reasons;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (slots[i].error) std::rethrow_exception(slots[i].error);
        auto& outcome = slots[i].outcome;
        for (auto& fact : outcome.facts) {
            if (tasks[i].families.size() == 1) fact.family = std::string(to_wire(tasks[i].families.front()));
            result.facts.push_back(std::move(fact));
        }
        if (outcome.skip_reason) {
            for (Family f : tasks[i].families) reasons[f].push_back(*outcome.skip_reason);
        }
    }

    auto cell_index = [&cell](const DataFact& fact) {
        auto family = parse_family(fact.family);
        for (std::size_t i = 0; i < cell.size(); ++i) {
            if (family && cell[i].family == *family) return i;
        }
        throw Error(ErrorKind::internal, "family_outside_cell", "fact family " + fact.family + " is not in the cell");
    };
    std::stable_sort(result.facts.begin(), result.facts.end(),
                     [&](const DataFact& a, const DataFact& b) { return cell_index(a) < cell_index(b); });

    for (std::size_t i = 0; i < result.facts.size(); ++i) {
        auto& fact = result.facts[i];
        fact.id = "f" + std::to_string(i + 1);
        fact.source_node = package.spec.id;
        fact.provenance = package.interaction;
    }

    for (const auto& entry : cell) {
        FamilyReport report{entry.family, FamilyStatus::not_implemented, 0, {}};
        if (entry.implemented) {
            report.fact_count = static_cast<std::size_t>(std::count_if(
                result.facts.begin(), result.facts.end(),
                [&](const DataFact& f) { return f.family == to_wire(entry.family); }));
            report.status = report.fact_count > 0 ? FamilyStatus::emitted : FamilyStatus::skipped;
            if (report.fact_count == 0) {
                const auto& why = reasons[entry.family];
                report.detail = why.empty() ? "no applicable attributes" : why.front();
            }
        } else {
            report.detail = "not implemented";
        }
        result.reports.push_back(std::move(report));
    }
    return result;
}

auto fact_result_to_json(const FactResult& result) -> nlohmann::json {
    nlohmann::json facts = nlohmann::json::array();
    for (const auto& fact : result.facts) facts.push_back(fact_to_json(fact));
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : result.reports) {
        reports.push_back({{"family", to_wire(r.family)},
                           {"status", to_wire(r.status)},
                           {"factCount", r.fact_count},
                           {"detail", r.detail}});
    }
    return {{"facts", std::move(facts)}, {"statTable", stat_table_to_json(result.stat_table)},
            {"families", std::move(reports)}};
}

}  // namespace weaver::facts
