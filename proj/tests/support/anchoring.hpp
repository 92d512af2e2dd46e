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

#include "weaver/facts/fact.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace weaver::testing {

inline auto is_number_char(char ch) -> bool { return std::isdigit(static_cast<unsigned char>(ch)) != 0; }

// Occurrence of a formatted number not embedded in a longer number.
inline auto contains_number(const std::string& text, const std::string& number) -> bool {
    for (auto pos = text.find(number); pos != std::string::npos; pos = text.find(number, pos + 1)) {
        bool left_ok = pos == 0 || (!is_number_char(text[pos - 1]) &&
                                    !(pos >= 2 && (text[pos - 1] == '.' || text[pos - 1] == ',') &&
                                      is_number_char(text[pos - 2])));
        std::size_t end = pos + number.size();
        bool right_ok = end >= text.size() || (!is_number_char(text[end]) &&
                                               !(end + 1 < text.size() && (text[end] == '.' || text[end] == ',') &&
                                                 is_number_char(text[end + 1])));
        if (left_ok && right_ok) return true;
    }
    return false;
}

// "<fact id>:<number>" for every payload number missing from the text.
inline auto missing_numbers(const std::string& text, const std::vector<facts::DataFact>& facts)
    -> std::vector<std::string> {
    std::vector<std::string> missing;
    for (const auto& f : facts) {
        for (const auto& n : f.formatted_numbers()) {
            if (!contains_number(text, n)) missing.push_back(f.id + ":" + n);
        }
    }
    return missing;
}

}  // namespace weaver::testing
