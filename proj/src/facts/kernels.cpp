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

#include "weaver/facts/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace weaver::kernels {

namespace {

struct Partial {
    std::size_t count = 0;
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
};

auto scan(std::span<const double> values) -> Partial {
    Partial p;
    for (double v : values) {
        if (std::isnan(v)) continue;
        ++p.count;
        p.sum += v;
        p.min = std::min(p.min, v);
        p.max = std::max(p.max, v);
    }
    return p;
}

auto squared_deviation(std::span<const double> values, double mean) -> double {
    double m2 = 0.0;
    for (double v : values) {
        if (!std::isnan(v)) m2 += (v - mean) * (v - mean);
    }
    return m2;
}

auto chunk_count(std::size_t n) -> std::size_t { return (n + kChunk - 1) / kChunk; }

auto chunk(std::span<const double> values, std::size_t i) -> std::span<const double> {
    std::size_t start = i * kChunk;
    return values.subspan(start, std::min(kChunk, values.size() - start));
}

auto use_parallel(Exec exec, std::size_t n) -> bool { return exec == Exec::parallel && n > kParallelThreshold; }

}  // namespace

auto Moments::sample_std() const -> double {
    if (count <= 1) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1));
}

auto moments(std::span<const double> values, Exec exec) -> Moments {
    Partial total;
    Moments out;
    if (!use_parallel(exec, values.size())) {
        total = scan(values);
        out.count = total.count;
        if (total.count == 0) return out;
        out.mean = total.sum / static_cast<double>(total.count);
        out.m2 = squared_deviation(values, out.mean);
    } else {
        const std::size_t chunks = chunk_count(values.size());
        std::vector<Partial> partials(chunks);
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < chunks; ++i) {
            partials[i] = scan(chunk(values, i));
        }
        for (const auto& p : partials) {
            total.count += p.count;
            total.sum += p.sum;
            total.min = std::min(total.min, p.min);
            total.max = std::max(total.max, p.max);
        }
        out.count = total.count;
        if (total.count == 0) return out;
        out.mean = total.sum / static_cast<double>(total.count);
        std::vector<double> m2(chunks);
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < chunks; ++i) {
            m2[i] = squared_deviation(chunk(values, i), out.mean);
        }
        for (double part : m2) out.m2 += part;
    }
    out.sum = total.sum;
    out.min = total.min;
    out.max = total.max;
    return out;
}

auto quantile_sorted(std::span<const double> sorted, double q) -> double {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    double h = static_cast<double>(sorted.size() - 1) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

auto summarize(std::span<const double> values, Exec exec) -> std::optional<Summary> {
    auto m = moments(values, exec);
    if (m.count == 0) return std::nullopt;
    std::vector<double> sorted;
    sorted.reserve(m.count);
    for (double v : values) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());
    return Summary{m.count, m.mean, quantile_sorted(sorted, 0.5), m.min, m.max, m.sample_std()};
}

auto tukey_fences(std::span<const double> values) -> Fences {
    std::vector<double> sorted;
    for (double v : values) {
        if (!std::isnan(v)) sorted.push_back(v);
    }
    std::sort(sorted.begin(), sorted.end());
    Fences f;
    f.q1 = quantile_sorted(sorted, 0.25);
    f.q3 = quantile_sorted(sorted, 0.75);
    f.iqr = f.q3 - f.q1;
    f.low = f.q1 - 1.5 * f.iqr;
    f.high = f.q3 + 1.5 * f.iqr;
    return f;
}

auto dense_rank_desc(std::span<const double> population, std::span<const double> queries, Exec exec)
    -> std::vector<std::size_t> {
    std::vector<double> distinct;
    distinct.reserve(population.size());
    for (double v : population) {
        if (!std::isnan(v)) distinct.push_back(v);
    }
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<std::size_t> ranks(queries.size(), 0);
    auto rank_of = [&](double q) -> std::size_t {
        if (std::isnan(q)) return 0;
        // Number of distinct values strictly greater than q, plus one.
        auto it = std::lower_bound(distinct.begin(), distinct.end(), q, std::greater<>());
        return static_cast<std::size_t>(it - distinct.begin()) + 1;
    };
    if (use_parallel(exec, queries.size() + population.size())) {
        const auto n = static_cast<std::ptrdiff_t>(queries.size());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            ranks[static_cast<std::size_t>(i)] = rank_of(queries[static_cast<std::size_t>(i)]);
        }
    } else {
        for (std::size_t i = 0; i < queries.size(); ++i) ranks[i] = rank_of(queries[i]);
    }
    return ranks;
}

auto category_counts(std::span<const std::int32_t> codes, std::size_t k, Exec exec) -> std::vector<std::size_t> {
    std::vector<std::size_t> counts(k, 0);
    auto tally = [k](std::span<const std::int32_t> part, std::vector<std::size_t>& into) {
        for (std::int32_t code : part) {
            if (code >= 0 && static_cast<std::size_t>(code) < k) ++into[static_cast<std::size_t>(code)];
        }
    };
    if (!use_parallel(exec, codes.size())) {
        tally(codes, counts);
        return counts;
    }
    const std::size_t chunks = (codes.size() + kChunk - 1) / kChunk;
    std::vector<std::vector<std::size_t>> partials(chunks, std::vector<std::size_t>(k, 0));
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < chunks; ++i) {
        std::size_t start = i * kChunk;
        tally(codes.subspan(start, std::min(kChunk, codes.size() - start)), partials[i]);
    }
    for (const auto& part : partials) {
        for (std::size_t c = 0; c < k; ++c) counts[c] += part[c];
    }
    return counts;
}

auto least_squares(std::span<const double> x, std::span<const double> y) -> std::optional<LinearFit> {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::nullopt;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;
    double slope = sxy / sxx;
    return LinearFit{slope, my - slope * mx};
}

auto pearson(std::span<const double> x, std::span<const double> y) -> std::optional<double> {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::nullopt;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

auto entropy(std::span<const double> distribution) -> double {
    double h = 0.0;
    for (double p : distribution) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

}  // namespace weaver::kernels
