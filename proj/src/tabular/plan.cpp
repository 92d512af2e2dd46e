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

#include "weaver/tabular/plan.hpp"

#include "weaver/common/error.hpp"
#include "weaver/common/hash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <unordered_map>

namespace weaver::tabular {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Column-major working table threaded through the steps.
struct Table {
    std::vector<std::string> names;
    std::vector<AttrType> types;
    std::vector<std::vector<Value>> columns;
    std::size_t rows = 0;

    [[nodiscard]] auto index(const std::string& name) const -> std::size_t {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            fail("unknown_column", "unknown column '" + name + "'", name);
        }
        return static_cast<std::size_t>(it - names.begin());
    }

    [[nodiscard]] auto has(const std::string& name) const -> bool {
        return std::find(names.begin(), names.end(), name) != names.end();
    }

    void keep_rows(const std::vector<std::size_t>& order) {
        for (auto& column : columns) {
            std::vector<Value> next;
            next.reserve(order.size());
            for (std::size_t r : order) {
                next.push_back(column[r]);
            }
            column = std::move(next);
        }
        rows = order.size();
    }
};

auto numeric_of(const Value& value, AttrType type) -> double {
    if (is_null(value)) {
        return kNaN;
    }
    if (type == AttrType::quantitative) {
        return std::get<double>(value);
    }
    if (type == AttrType::temporal) {
        return parse_time(std::get<std::string>(value)).value_or(kNaN);
    }
    return kNaN;
}

[[noreturn]] void type_mismatch(const std::string& column, const std::string& message) {
    fail("type_mismatch", message, column);
}

// ---- filter -----------------------------------------------------------------

auto literal_number(const json& literal, AttrType type, const std::string& column) -> double {
    if (type == AttrType::quantitative) {
        if (literal.is_number()) {
            return literal.get<double>();
        }
        if (literal.is_string()) {
            if (auto number = parse_number(literal.get<std::string>())) {
                return *number;
            }
        }
        type_mismatch(column, "literal " + literal.dump() + " is not a number for quantitative column '" + column + "'");
    }
    // temporal
    if (literal.is_number()) {
        return literal.get<double>();
    }
    if (literal.is_string()) {
        if (auto key = parse_time(literal.get<std::string>())) {
            return *key;
        }
    }
    type_mismatch(column, "literal " + literal.dump() + " is not a time for temporal column '" + column + "'");
}

auto literal_text(const json& literal) -> std::string {
    return literal.is_string() ? literal.get<std::string>() : literal.dump();
}

void check_filter(const FilterStep& step, AttrType type) {
    const bool ordered = step.op == Comparator::lt || step.op == Comparator::le || step.op == Comparator::gt ||
                         step.op == Comparator::ge;
    if (type == AttrType::categorical && ordered) {
        type_mismatch(step.column, "comparator '" + std::string(to_string(step.op)) +
                                       "' needs a quantitative or temporal column, '" + step.column + "' is categorical");
    }
    if (type != AttrType::categorical && step.op == Comparator::contains) {
        type_mismatch(step.column, "comparator 'contains' needs a categorical column, '" + step.column + "' is " +
                                       std::string(to_string(type)));
    }
    if (step.op == Comparator::in) {
        if (!step.literal.is_array() || step.literal.empty()) {
            fail("invalid_plan", "'in' needs a non-empty array literal", step.column);
        }
        for (const auto& item : step.literal) {
            if (type != AttrType::categorical) {
                (void)literal_number(item, type, step.column);
            }
        }
    } else {
        if (step.literal.is_array() || step.literal.is_object() || step.literal.is_null()) {
            fail("invalid_plan", "comparator '" + std::string(to_string(step.op)) + "' needs a scalar literal",
                 step.column);
        }
        if (type != AttrType::categorical) {
            (void)literal_number(step.literal, type, step.column);
        }
    }
}

auto apply_filter(Table& table, const FilterStep& step) {
    std::size_t c = table.index(step.column);
    AttrType type = table.types[c];
    check_filter(step, type);
    const auto& cells = table.columns[c];
    std::vector<std::size_t> keep;

    if (type == AttrType::categorical) {
        std::set<std::string> members;
        if (step.op == Comparator::in) {
            for (const auto& item : step.literal) members.insert(literal_text(item));
        }
        std::string needle = step.op == Comparator::in ? std::string{} : literal_text(step.literal);
        for (std::size_t r = 0; r < table.rows; ++r) {
            if (is_null(cells[r])) continue;
            const auto& text = std::get<std::string>(cells[r]);
            bool match = false;
            switch (step.op) {
                case Comparator::eq: match = text == needle; break;
                case Comparator::ne: match = text != needle; break;
                case Comparator::in: match = members.count(text) > 0; break;
                case Comparator::contains: match = text.find(needle) != std::string::npos; break;
                default: break;
            }
            if (match) keep.push_back(r);
        }
    } else {
        std::vector<double> members;
        double rhs = 0.0;
        if (step.op == Comparator::in) {
            for (const auto& item : step.literal) members.push_back(literal_number(item, type, step.column));
        } else {
            rhs = literal_number(step.literal, type, step.column);
        }
        for (std::size_t r = 0; r < table.rows; ++r) {
            double lhs = numeric_of(cells[r], type);
            if (std::isnan(lhs)) continue;
            bool match = false;
            switch (step.op) {
                case Comparator::eq: match = lhs == rhs; break;
                case Comparator::ne: match = lhs != rhs; break;
                case Comparator::lt: match = lhs < rhs; break;
                case Comparator::le: match = lhs <= rhs; break;
                case Comparator::gt: match = lhs > rhs; break;
                case Comparator::ge: match = lhs >= rhs; break;
                case Comparator::in:
                    match = std::find(members.begin(), members.end(), lhs) != members.end();
                    break;
                case Comparator::contains: break;
            }
            if (match) keep.push_back(r);
        }
    }
    table.keep_rows(keep);
}

// ---- aggregate --------------------------------------------------------------

auto group_key(const Table& table, const std::vector<std::size_t>& columns, std::size_t row) -> std::string {
    std::string key;
    for (std::size_t c : columns) {
        const Value& value = table.columns[c][row];
        key += is_null(value) ? std::string("\x01") : "\x02" + value_text(value);
        key.push_back('\x1f');
    }
    return key;
}

void check_aggregate(const Table& table, const AggregateStep& step) {
    for (const auto& name : step.group_by) (void)table.index(name);
    std::size_t m = table.index(step.measure);
    if (step.fn != AggregateFn::count && table.types[m] != AttrType::quantitative) {
        type_mismatch(step.measure, "aggregate '" + std::string(to_string(step.fn)) + "' needs a quantitative measure, '" +
                                        step.measure + "' is " + std::string(to_string(table.types[m])));
    }
    std::set<std::string> unique(step.group_by.begin(), step.group_by.end());
    if (unique.size() != step.group_by.size()) {
        fail("invalid_plan", "aggregate group_by lists a column twice");
    }
    if (unique.count(step.output_name()) > 0) {
        fail("invalid_plan", "aggregate output '" + step.output_name() + "' collides with a group column");
    }
}

void apply_aggregate(Table& table, const AggregateStep& step) {
    check_aggregate(table, step);
    std::vector<std::size_t> groups;
    for (const auto& name : step.group_by) groups.push_back(table.index(name));
    std::size_t m = table.index(step.measure);

    std::unordered_map<std::string, std::size_t> slot;
    std::vector<std::size_t> first_row;
    std::vector<std::vector<double>> members;  // non-null measure values per group
    std::vector<std::size_t> counts;
    for (std::size_t r = 0; r < table.rows; ++r) {
        auto [it, inserted] = slot.emplace(group_key(table, groups, r), first_row.size());
        if (inserted) {
            first_row.push_back(r);
            members.emplace_back();
            counts.push_back(0);
        }
        const Value& value = table.columns[m][r];
        if (!is_null(value)) {
            ++counts[it->second];
            if (table.types[m] == AttrType::quantitative) {
                members[it->second].push_back(std::get<double>(value));
            }
        }
    }

    Table out;
    for (std::size_t g : groups) {
        out.names.push_back(table.names[g]);
        out.types.push_back(table.types[g]);
        std::vector<Value> cells;
        for (std::size_t r : first_row) cells.push_back(table.columns[g][r]);
        out.columns.push_back(std::move(cells));
    }
    std::vector<Value> result;
    for (std::size_t i = 0; i < first_row.size(); ++i) {
        const auto& values = members[i];
        switch (step.fn) {
            case AggregateFn::count:
                result.emplace_back(static_cast<double>(counts[i]));
                break;
            case AggregateFn::sum:
                result.emplace_back(std::accumulate(values.begin(), values.end(), 0.0));
                break;
            case AggregateFn::mean:
                if (values.empty()) {
                    result.emplace_back(std::monostate{});
                } else {
                    result.emplace_back(std::accumulate(values.begin(), values.end(), 0.0) /
                                        static_cast<double>(values.size()));
                }
                break;
            case AggregateFn::min:
                result.emplace_back(values.empty() ? Value{} : Value{*std::min_element(values.begin(), values.end())});
                break;
            case AggregateFn::max:
                result.emplace_back(values.empty() ? Value{} : Value{*std::max_element(values.begin(), values.end())});
                break;
        }
    }
    out.names.push_back(step.output_name());
    out.types.push_back(AttrType::quantitative);
    out.columns.push_back(std::move(result));
    out.rows = first_row.size();
    table = std::move(out);
}

// ---- derive -----------------------------------------------------------------

struct Expr {
    enum class Kind { number, column, negate, add, sub, mul, div, pct_of_total } kind = Kind::number;
    double number = 0.0;
    std::size_t column = 0;
    std::optional<std::size_t> group_column;
    std::unique_ptr<Expr> lhs;
    std::unique_ptr<Expr> rhs;
};

class ExprParser {
public:
    ExprParser(std::string_view text, const Table& table, std::string target)
        : text_(text), table_(table), target_(std::move(target)) {}

    auto parse() -> std::unique_ptr<Expr> {
        auto expr = parse_sum();
        skip_space();
        if (pos_ != text_.size()) {
            error("unexpected '" + std::string(text_.substr(pos_, 1)) + "'");
        }
        return expr;
    }

private:
    [[noreturn]] void error(const std::string& message) const {
        fail("invalid_expression", "expression '" + std::string(text_) + "': " + message, target_);
    }

    void skip_space() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    // Accepts an ASCII operator or its typographic spelling.
    auto accept(char ascii, std::string_view alternate = {}) -> bool {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ascii) {
            ++pos_;
            return true;
        }
        if (!alternate.empty() && text_.substr(pos_, alternate.size()) == alternate) {
            pos_ += alternate.size();
            return true;
        }
        return false;
    }

    static auto binary(Expr::Kind kind, std::unique_ptr<Expr> lhs, std::unique_ptr<Expr> rhs) {
        auto node = std::make_unique<Expr>();
        node->kind = kind;
        node->lhs = std::move(lhs);
        node->rhs = std::move(rhs);
        return node;
    }

    auto parse_sum() -> std::unique_ptr<Expr> {
        auto lhs = parse_product();
        while (true) {
            if (accept('+')) {
                lhs = binary(Expr::Kind::add, std::move(lhs), parse_product());
            } else if (accept('-', "\xE2\x88\x92")) {
                lhs = binary(Expr::Kind::sub, std::move(lhs), parse_product());
            } else {
                return lhs;
            }
        }
    }

    auto parse_product() -> std::unique_ptr<Expr> {
        auto lhs = parse_factor();
        while (true) {
            if (accept('*', "\xC3\x97")) {
                lhs = binary(Expr::Kind::mul, std::move(lhs), parse_factor());
            } else if (accept('/', "\xC3\xB7")) {
                lhs = binary(Expr::Kind::div, std::move(lhs), parse_factor());
            } else {
                return lhs;
            }
        }
    }

    auto column_ref(const std::string& name, bool numeric) -> std::size_t {
        if (!table_.has(name)) {
            fail("unknown_column", "expression references unknown column '" + name + "'", name);
        }
        std::size_t c = table_.index(name);
        if (numeric && table_.types[c] == AttrType::categorical) {
            type_mismatch(name, "expression uses categorical column '" + name + "' arithmetically");
        }
        return c;
    }

    auto read_name() -> std::string {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '[') {
            auto close = text_.find(']', pos_);
            if (close == std::string_view::npos) error("unterminated [column]");
            std::string name(text_.substr(pos_ + 1, close - pos_ - 1));
            pos_ = close + 1;
            return name;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '.')) {
            ++pos_;
        }
        if (start == pos_) error("expected a column name");
        return std::string(text_.substr(start, pos_ - start));
    }

    auto parse_factor() -> std::unique_ptr<Expr> {
        skip_space();
        if (pos_ >= text_.size()) error("unexpected end");
        char c = text_[pos_];
        if (accept('-', "\xE2\x88\x92")) {
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::negate;
            node->lhs = parse_factor();
            return node;
        }
        if (accept('(')) {
            auto inner = parse_sum();
            if (!accept(')')) error("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                    text_[pos_] == 'e' || text_[pos_] == 'E')) {
                ++pos_;
            }
            auto number = parse_number(text_.substr(start, pos_ - start));
            if (!number) error("bad number");
            auto node = std::make_unique<Expr>();
            node->number = *number;
            return node;
        }
        bool bracketed = c == '[';
        std::string name = read_name();
        skip_space();
        if (!bracketed && name == "pct_of_total" && pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::pct_of_total;
            node->lhs = parse_sum();
            if (accept(',')) {
                node->group_column = column_ref(read_name(), false);
            }
            if (!accept(')')) error("expected ')' after pct_of_total");
            return node;
        }
        auto node = std::make_unique<Expr>();
        node->kind = Expr::Kind::column;
        node->column = column_ref(name, true);
        return node;
    }

    std::string_view text_;
    const Table& table_;
    std::string target_;
    std::size_t pos_ = 0;
};

auto evaluate(const Expr& expr, const Table& table) -> std::vector<double> {
    const std::size_t n = table.rows;
    switch (expr.kind) {
        case Expr::Kind::number:
            return std::vector<double>(n, expr.number);
        case Expr::Kind::column: {
            std::vector<double> out(n);
            for (std::size_t r = 0; r < n; ++r) {
                out[r] = numeric_of(table.columns[expr.column][r], table.types[expr.column]);
            }
            return out;
        }
        case Expr::Kind::negate: {
            auto out = evaluate(*expr.lhs, table);
            for (auto& v : out) v = -v;
            return out;
        }
        case Expr::Kind::pct_of_total: {
            auto values = evaluate(*expr.lhs, table);
            std::unordered_map<std::string, double> totals;
            std::vector<std::string> keys(n);
            for (std::size_t r = 0; r < n; ++r) {
                if (expr.group_column) {
                    keys[r] = value_text(table.columns[*expr.group_column][r]);
                }
                if (!std::isnan(values[r])) totals[keys[r]] += values[r];
            }
            for (std::size_t r = 0; r < n; ++r) {
                double total = totals[keys[r]];
                values[r] = (std::isnan(values[r]) || total == 0.0) ? kNaN : 100.0 * values[r] / total;
            }
            return values;
        }
        default:
            break;
    }
    auto lhs = evaluate(*expr.lhs, table);
    auto rhs = evaluate(*expr.rhs, table);
    for (std::size_t r = 0; r < n; ++r) {
        switch (expr.kind) {
            case Expr::Kind::add: lhs[r] += rhs[r]; break;
            case Expr::Kind::sub: lhs[r] -= rhs[r]; break;
            case Expr::Kind::mul: lhs[r] *= rhs[r]; break;
            case Expr::Kind::div: lhs[r] = rhs[r] == 0.0 ? kNaN : lhs[r] / rhs[r]; break;
            default: break;
        }
    }
    return lhs;
}

void check_derive(const Table& table, const DeriveStep& step) {
    if (step.column.empty()) {
        fail("invalid_plan", "derive needs a new column name");
    }
    if (table.has(step.column)) {
        fail("invalid_plan", "derive target '" + step.column + "' already exists", step.column);
    }
    (void)ExprParser(step.expression, table, step.column).parse();
}

void apply_derive(Table& table, const DeriveStep& step) {
    check_derive(table, step);
    auto expr = ExprParser(step.expression, table, step.column).parse();
    auto values = evaluate(*expr, table);
    std::vector<Value> cells;
    cells.reserve(values.size());
    for (double v : values) {
        cells.push_back(std::isfinite(v) ? Value{v} : Value{});
    }
    table.names.push_back(step.column);
    table.types.push_back(AttrType::quantitative);
    table.columns.push_back(std::move(cells));
}

// ---- sort / limit -----------------------------------------------------------

void apply_sort(Table& table, const SortStep& step) {
    std::size_t c = table.index(step.column);
    AttrType type = table.types[c];
    const auto& cells = table.columns[c];
    std::vector<std::size_t> order(table.rows);
    std::iota(order.begin(), order.end(), 0);
    const bool descending = step.direction == SortDirection::descending;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        bool a_null = is_null(cells[a]);
        bool b_null = is_null(cells[b]);
        if (a_null || b_null) {
            return !a_null && b_null;  // nulls last
        }
        if (type == AttrType::categorical) {
            const auto& lhs = std::get<std::string>(cells[a]);
            const auto& rhs = std::get<std::string>(cells[b]);
            return descending ? rhs < lhs : lhs < rhs;
        }
        double lhs = numeric_of(cells[a], type);
        double rhs = numeric_of(cells[b], type);
        return descending ? rhs < lhs : lhs < rhs;
    });
    table.keep_rows(order);
}

void apply_limit(Table& table, const LimitStep& step) {
    if (step.n < 1) {
        fail("invalid_plan", "limit must be at least 1");
    }
    if (table.rows > step.n) {
        std::vector<std::size_t> order(step.n);
        std::iota(order.begin(), order.end(), 0);
        table.keep_rows(order);
    }
}

auto to_table(const Dataset& dataset) -> Table {
    Table table;
    table.rows = dataset.row_count();
    for (const auto& column : dataset.columns()) {
        table.names.push_back(column.name());
        table.types.push_back(column.type());
        table.columns.push_back(column.cells());
    }
    return table;
}

void apply(Table& table, const Step& step) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FilterStep>) apply_filter(table, s);
            else if constexpr (std::is_same_v<T, AggregateStep>) apply_aggregate(table, s);
            else if constexpr (std::is_same_v<T, DeriveStep>) apply_derive(table, s);
            else if constexpr (std::is_same_v<T, SortStep>) apply_sort(table, s);
            else apply_limit(table, s);
        },
        step);
}

// Schema-only walk used by validate_plan: same checks as execution, no row work.
void check_schema(Table& schema, const Step& step) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FilterStep>) {
                check_filter(s, schema.types[schema.index(s.column)]);
            } else if constexpr (std::is_same_v<T, AggregateStep>) {
                check_aggregate(schema, s);
                Table next;
                for (const auto& name : s.group_by) {
                    next.names.push_back(name);
                    next.types.push_back(schema.types[schema.index(name)]);
                }
                next.names.push_back(s.output_name());
                next.types.push_back(AttrType::quantitative);
                schema = std::move(next);
            } else if constexpr (std::is_same_v<T, DeriveStep>) {
                check_derive(schema, s);
                schema.names.push_back(s.column);
                schema.types.push_back(AttrType::quantitative);
            } else if constexpr (std::is_same_v<T, SortStep>) {
                (void)schema.index(s.column);
            } else {
                if (s.n < 1) fail("invalid_plan", "limit must be at least 1");
            }
        },
        step);
}

auto step_name(const Step& step) -> std::string {
    static constexpr std::string_view kNames[] = {"filter", "aggregate", "derive", "sort", "limit"};
    return std::string(kNames[step.index()]);
}

template <typename Map>
auto parse_enum(const json& doc, const char* key, const Map& names, const char* what) {
    auto text = doc.at(key).get<std::string>();
    for (const auto& [name, value] : names) {
        if (name == text) return value;
    }
    fail("malformed_plan", std::string("unknown ") + what + " '" + text + "'", key);
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& item : doc.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw Error(ErrorKind::invalid, "unknown_field", "unknown field '" + item.key() + "' in " + where, item.key());
        }
    }
}

const std::pair<std::string_view, Comparator> kComparators[] = {
    {"=", Comparator::eq},  {"!=", Comparator::ne}, {"<", Comparator::lt},  {"<=", Comparator::le},
    {">", Comparator::gt},  {">=", Comparator::ge}, {"in", Comparator::in}, {"contains", Comparator::contains},
};
const std::pair<std::string_view, AggregateFn> kAggregates[] = {
    {"sum", AggregateFn::sum}, {"mean", AggregateFn::mean}, {"count", AggregateFn::count},
    {"min", AggregateFn::min}, {"max", AggregateFn::max},
};

}  // namespace

auto to_string(Comparator op) -> std::string_view {
    for (const auto& [name, value] : kComparators) {
        if (value == op) return name;
    }
    return "=";
}

auto to_string(AggregateFn fn) -> std::string_view {
    for (const auto& [name, value] : kAggregates) {
        if (value == fn) return name;
    }
    return "sum";
}

auto AggregateStep::output_name() const -> std::string {
    return output.empty() ? std::string(to_string(fn)) + "_" + measure : output;
}

auto plan_to_json(const DataOperationPlan& plan) -> json {
    json steps = json::array();
    for (const auto& step : plan.steps) {
        json out;
        out["op"] = step_name(step);
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, FilterStep>) {
                    out["column"] = s.column;
                    out["comparator"] = to_string(s.op);
                    out["value"] = s.literal;
                } else if constexpr (std::is_same_v<T, AggregateStep>) {
                    out["groupBy"] = s.group_by;
                    out["measure"] = s.measure;
                    out["fn"] = to_string(s.fn);
                    if (!s.output.empty()) out["as"] = s.output;
                } else if constexpr (std::is_same_v<T, DeriveStep>) {
                    out["column"] = s.column;
                    out["expression"] = s.expression;
                } else if constexpr (std::is_same_v<T, SortStep>) {
                    out["column"] = s.column;
                    out["direction"] = s.direction == SortDirection::ascending ? "asc" : "desc";
                } else {
                    out["n"] = s.n;
                }
            },
            step);
        steps.push_back(std::move(out));
    }
    return json{{"sourceDataset", plan.source_dataset}, {"steps", std::move(steps)}};
}

auto plan_from_json(const json& doc) -> DataOperationPlan {
    if (!doc.is_object()) {
        fail("malformed_plan", "plan must be a JSON object");
    }
    reject_unknown(doc, {"sourceDataset", "steps"}, "plan");
    DataOperationPlan plan;
    try {
        plan.source_dataset = doc.value("sourceDataset", std::string{});
        for (const auto& item : doc.value("steps", json::array())) {
            auto op = item.at("op").get<std::string>();
            if (op == "filter") {
                reject_unknown(item, {"op", "column", "comparator", "value"}, "filter step");
                plan.steps.emplace_back(FilterStep{item.at("column").get<std::string>(),
                                                   parse_enum(item, "comparator", kComparators, "comparator"),
                                                   item.at("value")});
            } else if (op == "aggregate") {
                reject_unknown(item, {"op", "groupBy", "measure", "fn", "as"}, "aggregate step");
                plan.steps.emplace_back(AggregateStep{item.value("groupBy", std::vector<std::string>{}),
                                                      item.at("measure").get<std::string>(),
                                                      parse_enum(item, "fn", kAggregates, "aggregate fn"),
                                                      item.value("as", std::string{})});
            } else if (op == "derive") {
                reject_unknown(item, {"op", "column", "expression"}, "derive step");
                plan.steps.emplace_back(
                    DeriveStep{item.at("column").get<std::string>(), item.at("expression").get<std::string>()});
            } else if (op == "sort") {
                reject_unknown(item, {"op", "column", "direction"}, "sort step");
                auto direction = item.value("direction", std::string("asc"));
                if (direction != "asc" && direction != "desc") {
                    fail("malformed_plan", "sort direction must be 'asc' or 'desc'", "direction");
                }
                plan.steps.emplace_back(SortStep{item.at("column").get<std::string>(),
                                                 direction == "asc" ? SortDirection::ascending
                                                                    : SortDirection::descending});
            } else if (op == "limit") {
                reject_unknown(item, {"op", "n"}, "limit step");
                auto n = item.at("n").get<long long>();
                if (n < 1) fail("invalid_plan", "limit must be at least 1", "n");
                plan.steps.emplace_back(LimitStep{static_cast<std::size_t>(n)});
            } else {
                fail("malformed_plan", "unknown step op '" + op + "'", "op");
            }
        }
    } catch (const json::exception& e) {
        fail("malformed_plan", std::string("malformed plan: ") + e.what());
    }
    return plan;
}

auto validate_plan(const DataOperationPlan& plan, const Dataset& dataset) -> std::vector<std::string> {
    std::vector<std::string> problems;
    if (!plan.source_dataset.empty() && plan.source_dataset != dataset.id()) {
        problems.push_back("plan source '" + plan.source_dataset + "' does not match dataset '" + dataset.id() + "'");
    }
    Table schema;
    for (const auto& column : dataset.columns()) {
        schema.names.push_back(column.name());
        schema.types.push_back(column.type());
    }
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        try {
            check_schema(schema, plan.steps[i]);
        } catch (const Error& e) {
            problems.push_back("step " + std::to_string(i) + " (" + step_name(plan.steps[i]) + "): " + e.what());
            break;  // later steps see an undefined schema
        }
    }
    return problems;
}

auto execute_plan(const DataOperationPlan& plan, const Dataset& dataset) -> Dataset {
    if (!plan.source_dataset.empty() && plan.source_dataset != dataset.id()) {
        fail("invalid_plan", "plan source '" + plan.source_dataset + "' does not match dataset '" + dataset.id() + "'");
    }
    Table table = to_table(dataset);
    for (const auto& step : plan.steps) {
        apply(table, step);
    }
    std::vector<Column> columns;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        columns.push_back(Column::from_values(table.names[c], table.types[c], std::move(table.columns[c])));
    }
    std::string id = dataset.id() + "~" + sha256_hex(plan_to_json(plan).dump()).substr(0, 10);
    return Dataset(std::move(id), plan.steps.empty() ? dataset.name() : dataset.name() + " (derived)",
                   std::move(columns));
}

}  // namespace weaver::tabular
