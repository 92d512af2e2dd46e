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

#include <string>
#include <string_view>

namespace weaver {

// Raw value: rounded to 4 decimals, trailing zeros trimmed, thousands separators.
// 1234.50 -> "1,234.5", -0.00001 -> "0".
auto format_number(double value) -> std::string;

// Percentage with exactly two decimals: 95.238 -> "95.24%". With explicit_sign,
// positive values get a leading '+'.
auto format_percent(double percent, bool explicit_sign = false) -> std::string;

// Formatting rule for a named fact payload entry. Keys ending in "Pct" are
// percentages; keys ending in "DeltaPct" or "ChangePct" are signed percentages.
auto format_payload_number(std::string_view key, double value) -> std::string;

// Shortest text that parses back to the same double (used for CSV output).
auto format_exact(double value) -> std::string;

}  // namespace weaver
