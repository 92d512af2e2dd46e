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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace weaver::tabular {

enum class AttrType { quantitative, categorical, temporal };

auto to_string(AttrType type) -> std::string_view;
auto parse_attr_type(std::string_view text) -> std::optional<AttrType>;

// A cell: null, a number (quantitative), or text (categorical and temporal).
using Value = std::variant<std::monostate, double, std::string>;

inline auto is_null(const Value& value) -> bool { return std::holds_alternative<std::monostate>(value); }

// Display text; numbers go through format_number, null renders as "".
auto value_label(const Value& value) -> std::string;

// Lossless text used for CSV output and grouping keys.
auto value_text(const Value& value) -> std::string;

class Column {
public:
    // Parses raw cell text under `type`. Null spellings become null; cells that fail
    // to parse become null and are counted in parse_failures().
    static auto from_text(std::string name, AttrType type, std::span<const std::string> raw) -> Column;

    // Builds from already typed cells (derived datasets). Temporal text that does
    // not parse as a time is nulled and counted.
    static auto from_values(std::string name, AttrType type, std::vector<Value> cells) -> Column;

    [[nodiscard]] auto name() const -> const std::string& { return name_; }
    [[nodiscard]] auto type() const -> AttrType { return type_; }
    [[nodiscard]] auto size() const -> std::size_t { return cells_.size(); }
    [[nodiscard]] auto cell(std::size_t row) const -> const Value& { return cells_[row]; }
    [[nodiscard]] auto cells() const -> const std::vector<Value>& { return cells_; }
    [[nodiscard]] auto is_null(std::size_t row) const -> bool { return tabular::is_null(cells_[row]); }

    // Numeric view: the number for quantitative cells, the decimal-year key for
    // temporal cells, NaN for null and categorical cells.
    [[nodiscard]] auto numeric(std::size_t row) const -> double { return numeric_[row]; }
    [[nodiscard]] auto numeric_values() const -> std::span<const double> { return numeric_; }
    [[nodiscard]] auto is_numeric() const -> bool { return type_ != AttrType::categorical; }

    // Text of a categorical or temporal cell; label for numbers.
    [[nodiscard]] auto label(std::size_t row) const -> std::string { return value_label(cells_[row]); }

    [[nodiscard]] auto distinct_count() const -> std::size_t { return distinct_count_; }
    [[nodiscard]] auto sample_values() const -> const std::vector<Value>& { return samples_; }
    [[nodiscard]] auto null_count() const -> std::size_t { return null_count_; }
    [[nodiscard]] auto parse_failures() const -> std::size_t { return parse_failures_; }
    [[nodiscard]] auto all_null() const -> bool { return null_count_ == cells_.size(); }

    // Distinct non-null values in order of first appearance.
    [[nodiscard]] auto domain() const -> std::vector<Value>;

private:
    Column(std::string name, AttrType type, std::vector<Value> cells, std::size_t parse_failures);

    std::string name_;
    AttrType type_;
    std::vector<Value> cells_;
    std::vector<double> numeric_;
    std::vector<Value> samples_;
    std::size_t distinct_count_ = 0;
    std::size_t null_count_ = 0;
    std::size_t parse_failures_ = 0;
};

// Immutable typed table. Column names are unique and all columns have equal length.
class Dataset {
public:
    Dataset(std::string id, std::string name, std::vector<Column> columns);

    [[nodiscard]] auto id() const -> const std::string& { return id_; }
    [[nodiscard]] auto name() const -> const std::string& { return name_; }
    [[nodiscard]] auto columns() const -> const std::vector<Column>& { return columns_; }
    [[nodiscard]] auto row_count() const -> std::size_t { return row_count_; }

    [[nodiscard]] auto find(std::string_view column) const -> const Column*;
    [[nodiscard]] auto column(std::string_view column) const -> const Column&;  // throws unknown_column
    [[nodiscard]] auto column_index(std::string_view column) const -> std::optional<std::size_t>;

private:
    std::string id_;
    std::string name_;
    std::vector<Column> columns_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t row_count_ = 0;
};

struct TypeInference {
    AttrType type = AttrType::categorical;
    bool all_null = false;  // warning flag: no non-null cells to go on
};

// Quantitative if >=95% of non-null values are numbers; temporal (checked first)
// if >=95% are ISO dates or years in [1000, 2999] and the column name carries a
// date-ish token; categorical otherwise.
auto infer_attribute_type(std::string_view column_name, std::span<const std::string> values) -> TypeInference;

auto is_null_token(std::string_view text) -> bool;
auto parse_number(std::string_view text) -> std::optional<double>;
// Years map to themselves; ISO dates map to a decimal year (1952-07-02 -> ~1952.5).
auto parse_time(std::string_view text) -> std::optional<double>;
auto is_date_like_name(std::string_view name) -> bool;

struct LoadOptions {
    std::optional<std::string> id;
    std::map<std::string, AttrType, std::less<>> forced_types;
};

// RFC-4180 CSV with a header row. Errors: empty_input, duplicate_column, no_rows, malformed_csv.
auto load_dataset(std::string_view csv, std::string name, const LoadOptions& options = {}) -> Dataset;

auto write_csv(const Dataset& dataset) -> std::string;

// Raw record split; exposed for tests.
auto parse_csv_records(std::string_view csv) -> std::vector<std::vector<std::string>>;

}  // namespace weaver::tabular
