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

#include "weaver/common/format.hpp"

#include <fmt/format.h>

#include <cmath>

namespace weaver {

namespace {

auto ends_with(std::string_view s, std::string_view suffix) -> bool {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Inserts thousands separators into the integer part of a plain decimal string.
auto group_thousands(std::string digits) -> std::string {
    std::size_t start = (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) ? 1 : 0;
    std::size_t dot = digits.find('.');
    std::size_t int_end = dot == std::string::npos ? digits.size() : dot;
    for (std::ptrdiff_t pos = static_cast<std::ptrdiff_t>(int_end) - 3;
         pos > static_cast<std::ptrdiff_t>(start); pos -= 3) {
        digits.insert(static_cast<std::size_t>(pos), ",");
    }
    return digits;
}

}  // namespace

auto format_number(double value) -> std::string {
    if (!std::isfinite(value)) {
        return std::isnan(value) ? "NaN" : (value > 0 ? "inf" : "-inf");
    }
    std::string text = fmt::format("{:.4f}", value);
    while (!text.empty() && text.back() == '0') {
        text.pop_back();
    }
    if (!text.empty() && text.back() == '.') {
        text.pop_back();
    }
    if (text == "-0") {
        text = "0";
    }
    return group_thousands(std::move(text));
}

auto format_percent(double percent, bool explicit_sign) -> std::string {
    std::string text = fmt::format("{:.2f}", percent);
    if (text == "-0.00") {
        text = "0.00";
    }
    if (explicit_sign && text != "0.00" && text.front() != '-') {
        text.insert(text.begin(), '+');
    }
    return group_thousands(std::move(text)) + "%";
}

auto format_payload_number(std::string_view key, double value) -> std::string {
    if (ends_with(key, "DeltaPct") || ends_with(key, "ChangePct")) {
        return format_percent(value, true);
    }
    if (ends_with(key, "Pct")) {
        return format_percent(value);
    }
    return format_number(value);
}

auto format_exact(double value) -> std::string {
    return fmt::format("{}", value);
}

}  // namespace weaver
