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

#include "weaver/tabular/dataset.hpp"

#include "weaver/common/error.hpp"
#include "weaver/common/format.hpp"
#include "weaver/common/hash.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace weaver::tabular {

namespace {

constexpr double kTypeThreshold = 0.95;
constexpr std::size_t kSampleCount = 5;

auto trim(std::string_view text) -> std::string_view {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

auto lower(std::string_view text) -> std::string {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

auto parse_digits(std::string_view text, int& out) -> bool {
    if (text.empty()) {
        return false;
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

auto to_string(AttrType type) -> std::string_view {
    switch (type) {
        case AttrType::quantitative:
            return "quantitative";
        case AttrType::categorical:
            return "categorical";
        case AttrType::temporal:
            return "temporal";
    }
    return "categorical";
}

auto parse_attr_type(std::string_view text) -> std::optional<AttrType> {
    if (text == "quantitative") return AttrType::quantitative;
    if (text == "categorical") return AttrType::categorical;
    if (text == "temporal") return AttrType::temporal;
    return std::nullopt;
}

auto value_label(const Value& value) -> std::string {
    if (const auto* number = std::get_if<double>(&value)) {
        return format_number(*number);
    }
    if (const auto* text = std::get_if<std::string>(&value)) {
        return *text;
    }
    return {};
}

auto value_text(const Value& value) -> std::string {
    if (const auto* number = std::get_if<double>(&value)) {
        return format_exact(*number);
    }
    if (const auto* text = std::get_if<std::string>(&value)) {
        return *text;
    }
    return {};
}

auto is_null_token(std::string_view text) -> bool {
    text = trim(text);
    if (text.empty()) {
        return true;
    }
    auto lowered = lower(text);
    return lowered == "na" || lowered == "null";
}

auto parse_number(std::string_view text) -> std::optional<double> {
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
        if (text.empty() || text.front() == '-') {
            return std::nullopt;
        }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

auto parse_time(std::string_view text) -> std::optional<double> {
    using namespace std::chrono;
    text = trim(text);
    int y = 0;
    if (text.size() == 4) {
        if (parse_digits(text, y) && y >= 1000 && y <= 2999) {
            return static_cast<double>(y);
        }
        return std::nullopt;
    }
    // YYYY-MM or YYYY-MM-DD, optionally followed by a time part.
    if (text.size() < 7 || text[4] != '-') {
        return std::nullopt;
    }
    int m = 0;
    int d = 1;
    if (!parse_digits(text.substr(0, 4), y) || !parse_digits(text.substr(5, 2), m)) {
        return std::nullopt;
    }
    if (text.size() > 7) {
        if (text.size() < 10 || text[7] != '-' || !parse_digits(text.substr(8, 2), d)) {
            return std::nullopt;
        }
        if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') {
            return std::nullopt;
        }
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    auto start = sys_days{year{y} / January / 1};
    auto next = sys_days{year{y + 1} / January / 1};
    double offset = static_cast<double>((sys_days{ymd} - start).count());
    double length = static_cast<double>((next - start).count());
    return static_cast<double>(y) + offset / length;
}

auto is_date_like_name(std::string_view name) -> bool {
    auto lowered = lower(name);
    for (std::string_view token : {"year", "date", "time", "month", "day"}) {
        if (lowered.find(token) != std::string::npos) {
            return true;
        }
    }
    return false;
}

auto infer_attribute_type(std::string_view column_name, std::span<const std::string> values) -> TypeInference {
    std::size_t non_null = 0;
    std::size_t numbers = 0;
    std::size_t times = 0;
    for (const auto& value : values) {
        if (is_null_token(value)) {
            continue;
        }
        ++non_null;
        if (parse_number(value)) {
            ++numbers;
        }
        if (parse_time(value)) {
            ++times;
        }
    }
    if (non_null == 0) {
        return {AttrType::categorical, true};
    }
    auto share = [non_null](std::size_t hits) {
        return static_cast<double>(hits) / static_cast<double>(non_null);
    };
    if (is_date_like_name(column_name) && share(times) >= kTypeThreshold) {
        return {AttrType::temporal, false};
    }
    if (share(numbers) >= kTypeThreshold) {
        return {AttrType::quantitative, false};
    }
    return {AttrType::categorical, false};
}

Column::Column(std::string name, AttrType type, std::vector<Value> cells, std::size_t parse_failures)
    : name_(std::move(name)), type_(type), cells_(std::move(cells)), parse_failures_(parse_failures) {
    numeric_.assign(cells_.size(), std::numeric_limits<double>::quiet_NaN());
    std::unordered_set<std::string> seen;
    for (std::size_t row = 0; row < cells_.size(); ++row) {
        const Value& value = cells_[row];
        if (tabular::is_null(value)) {
            ++null_count_;
            continue;
        }
        if (type_ == AttrType::quantitative) {
            numeric_[row] = std::get<double>(value);
        } else if (type_ == AttrType::temporal) {
            numeric_[row] = *parse_time(std::get<std::string>(value));
        }
        if (seen.insert(value_text(value)).second && samples_.size() < kSampleCount) {
            samples_.push_back(value);
        }
    }
    distinct_count_ = seen.size();
}

auto Column::from_text(std::string name, AttrType type, std::span<const std::string> raw) -> Column {
    std::vector<Value> cells;
    cells.reserve(raw.size());
    std::size_t failures = 0;
    for (const auto& text : raw) {
        if (is_null_token(text)) {
            cells.emplace_back(std::monostate{});
            continue;
        }
        switch (type) {
            case AttrType::quantitative:
                if (auto number = parse_number(text)) {
                    cells.emplace_back(*number);
                } else {
                    cells.emplace_back(std::monostate{});
                    ++failures;
                }
                break;
            case AttrType::temporal:
                if (parse_time(text)) {
                    cells.emplace_back(std::string(trim(text)));
                } else {
                    cells.emplace_back(std::monostate{});
                    ++failures;
                }
                break;
            case AttrType::categorical:
                cells.emplace_back(text);
                break;
        }
    }
    return Column(std::move(name), type, std::move(cells), failures);
}

auto Column::from_values(std::string name, AttrType type, std::vector<Value> cells) -> Column {
    std::size_t failures = 0;
    for (auto& value : cells) {
        if (tabular::is_null(value)) {
            continue;
        }
        switch (type) {
            case AttrType::quantitative:
                if (!std::holds_alternative<double>(value)) {
                    auto number = parse_number(value_text(value));
                    value = number ? Value{*number} : Value{};
                    failures += number ? 0 : 1;
                }
                break;
            case AttrType::temporal: {
                std::string text = value_text(value);
                if (parse_time(text)) {
                    value = std::move(text);
                } else {
                    value = std::monostate{};
                    ++failures;
                }
                break;
            }
            case AttrType::categorical:
                if (!std::holds_alternative<std::string>(value)) {
                    value = value_text(value);
                }
                break;
        }
    }
    return Column(std::move(name), type, std::move(cells), failures);
}

auto Column::domain() const -> std::vector<Value> {
    std::vector<Value> out;
    std::unordered_set<std::string> seen;
    for (const auto& value : cells_) {
        if (!tabular::is_null(value) && seen.insert(value_text(value)).second) {
            out.push_back(value);
        }
    }
    return out;
}

Dataset::Dataset(std::string id, std::string name, std::vector<Column> columns)
    : id_(std::move(id)), name_(std::move(name)), columns_(std::move(columns)) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (!index_.emplace(columns_[i].name(), i).second) {
            fail("duplicate_column", "duplicate column name '" + columns_[i].name() + "'", columns_[i].name());
        }
    }
    row_count_ = columns_.empty() ? 0 : columns_.front().size();
    for (const auto& column : columns_) {
        if (column.size() != row_count_) {
            throw Error(ErrorKind::internal, "ragged_dataset", "column '" + column.name() + "' has a different length");
        }
    }
}

auto Dataset::find(std::string_view column) const -> const Column* {
    auto it = index_.find(std::string(column));
    return it == index_.end() ? nullptr : &columns_[it->second];
}

auto Dataset::column(std::string_view column) const -> const Column& {
    if (const auto* found = find(column)) {
        return *found;
    }
    fail("unknown_column", "unknown column '" + std::string(column) + "' in dataset '" + name_ + "'",
         std::string(column));
}

auto Dataset::column_index(std::string_view column) const -> std::optional<std::size_t> {
    auto it = index_.find(std::string(column));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

auto parse_csv_records(std::string_view csv) -> std::vector<std::vector<std::string>> {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool line_has_content = false;

    if (csv.size() >= 3 && static_cast<unsigned char>(csv[0]) == 0xEF &&
        static_cast<unsigned char>(csv[1]) == 0xBB && static_cast<unsigned char>(csv[2]) == 0xBF) {
        csv.remove_prefix(3);
    }

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (line_has_content) {
            records.push_back(std::move(record));
        }
        record.clear();
        line_has_content = false;
    };

    for (std::size_t i = 0; i < csv.size(); ++i) {
        char c = csv[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < csv.size() && csv[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty()) {
                    fail("malformed_csv", "quote inside unquoted field");
                }
                in_quotes = true;
                field_started = true;
                line_has_content = true;
                break;
            case ',':
                end_field();
                line_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                break;
            default:
                field.push_back(c);
                field_started = true;
                line_has_content = true;
                break;
        }
    }
    if (in_quotes) {
        fail("malformed_csv", "unterminated quoted field");
    }
    if (line_has_content || !field.empty()) {
        end_record();
    }
    return records;
}

auto load_dataset(std::string_view csv, std::string name, const LoadOptions& options) -> Dataset {
    if (trim(csv).empty()) {
        fail("empty_input", "CSV input is empty");
    }
    auto records = parse_csv_records(csv);
    if (records.empty()) {
        fail("empty_input", "CSV input is empty");
    }
    const auto& header = records.front();
    std::unordered_set<std::string> names;
    for (const auto& column : header) {
        if (!names.insert(column).second) {
            fail("duplicate_column", "duplicate column name '" + column + "'", column);
        }
    }
    if (records.size() < 2) {
        fail("no_rows", "CSV has a header but no data rows");
    }
    const std::size_t width = header.size();
    const std::size_t rows = records.size() - 1;
    std::vector<std::vector<std::string>> raw(width, std::vector<std::string>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        auto& record = records[r + 1];
        if (record.size() > width) {
            fail("malformed_csv", "row " + std::to_string(r + 1) + " has more cells than the header");
        }
        for (std::size_t c = 0; c < record.size(); ++c) {
            raw[c][r] = std::move(record[c]);
        }
    }
    std::vector<Column> columns;
    columns.reserve(width);
    for (std::size_t c = 0; c < width; ++c) {
        AttrType type;
        if (auto it = options.forced_types.find(header[c]); it != options.forced_types.end()) {
            type = it->second;
        } else {
            type = infer_attribute_type(header[c], raw[c]).type;
        }
        columns.push_back(Column::from_text(header[c], type, raw[c]));
    }
    std::string id = options.id ? *options.id : "ds-" + sha256_hex(name + "\n" + std::string(csv)).substr(0, 12);
    return Dataset(std::move(id), std::move(name), std::move(columns));
}

namespace {

auto csv_escape(const std::string& text) -> std::string {
    bool needs_quotes = text.find_first_of(",\"\n\r") != std::string::npos ||
                        (!text.empty() && (text.front() == ' ' || text.back() == ' ')) || is_null_token(text);
    if (!needs_quotes) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

auto write_csv(const Dataset& dataset) -> std::string {
    std::string out;
    const auto& columns = dataset.columns();
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c > 0) out.push_back(',');
        out += csv_escape(columns[c].name());
    }
    out.push_back('\n');
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c > 0) out.push_back(',');
            const Value& value = columns[c].cell(r);
            if (!is_null(value)) {
                out += csv_escape(value_text(value));
            }
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace weaver::tabular
