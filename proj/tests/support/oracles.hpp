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

// Independent reference computations for tests. Deliberately naive: long
// double accumulation, full sorts, brute-force scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace weaver::oracle {

inline auto present(const std::vector<double>& values) -> std::vector<double> {
    std::vector<double> out;
    for (double v : values) {
        if (!std::isnan(v)) out.push_back(v);
    }
    return out;
}

inline auto mean(const std::vector<double>& values) -> double {
    auto v = present(values);
    long double sum = 0;
    for (double x : v) sum += x;
    return static_cast<double>(sum / static_cast<long double>(v.size()));
}

inline auto sample_std(const std::vector<double>& values) -> double {
    auto v = present(values);
    if (v.size() < 2) return 0.0;
    long double m = 0;
    for (double x : v) m += x;
    m /= static_cast<long double>(v.size());
    long double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(v.size() - 1)));
}

// Quantile by the textbook (n-1)p interpolation on a fully sorted copy.
inline auto quantile(std::vector<double> values, double p) -> double {
    auto v = present(values);
    std::sort(v.begin(), v.end());
    double pos = p * static_cast<double>(v.size() - 1);
    auto below = static_cast<std::size_t>(pos);
    if (below + 1 >= v.size()) return v.back();
    return v[below] * (1.0 - (pos - static_cast<double>(below))) + v[below + 1] * (pos - static_cast<double>(below));
}

inline auto median(const std::vector<double>& values) -> double { return quantile(values, 0.5); }

// Dense descending rank by counting distinct strictly greater values.
inline auto dense_rank(const std::vector<double>& population, double value) -> std::size_t {
    std::set<double> greater;
    for (double v : present(population)) {
        if (v > value) greater.insert(v);
    }
    return greater.size() + 1;
}

inline auto pearson(const std::vector<double>& x, const std::vector<double>& y) -> double {
    long double n = static_cast<long double>(x.size());
    long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        syy += static_cast<long double>(y[i]) * y[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    long double num = n * sxy - sx * sy;
    long double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
    return static_cast<double>(num / den);
}

// Slope and intercept from the 2x2 normal equations solved by Cramer's rule.
inline auto normal_equations(const std::vector<double>& x, const std::vector<double>& y) -> std::pair<double, double> {
    long double n = static_cast<long double>(x.size());
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    long double det = n * sxx - sx * sx;
    long double slope = (n * sxy - sx * sy) / det;
    long double intercept = (sxx * sy - sx * sxy) / det;
    return {static_cast<double>(slope), static_cast<double>(intercept)};
}

inline auto tally(const std::vector<std::string>& labels) -> std::map<std::string, std::size_t> {
    std::map<std::string, std::size_t> out;
    for (const auto& l : labels) ++out[l];
    return out;
}

inline auto rel_close(double a, double b, double tol = 1e-9) -> bool {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace weaver::oracle
