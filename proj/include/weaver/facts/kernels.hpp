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
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

// Numeric kernels behind the fact families. Every kernel has a plain serial
// reference and an OpenMP path; the OpenMP path reduces over fixed-size chunks
// combined in chunk order, so its result does not depend on the thread count.
namespace weaver::kernels {

enum class Exec { serial, parallel };

// Inputs of these sizes or smaller always run serially.
inline constexpr std::size_t kParallelThreshold = 1 << 14;
inline constexpr std::size_t kChunk = 4096;

struct Moments {
    std::size_t count = 0;
    double sum = 0.0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations from the mean
    double min = 0.0;
    double max = 0.0;

    [[nodiscard]] auto sample_std() const -> double;  // n-1 denominator, 0 when count <= 1
};

// NaN entries are skipped.
auto moments(std::span<const double> values, Exec exec = Exec::serial) -> Moments;

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;

    friend auto operator==(const Summary&, const Summary&) -> bool = default;
};

// Count, mean, median, min, max and sample standard deviation over the non-NaN values.
// Returns nullopt when there are none.
auto summarize(std::span<const double> values, Exec exec = Exec::serial) -> std::optional<Summary>;

// Linear-interpolation quantile over sorted data (q in [0,1]).
auto quantile_sorted(std::span<const double> sorted, double q) -> double;

struct Fences {
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double low = 0.0;
    double high = 0.0;
};

// Tukey fences at 1.5 IQR with interpolated quartiles. NaN entries are skipped.
auto tukey_fences(std::span<const double> values) -> Fences;

// Dense descending rank of each query within the population: the largest
// population value has rank 1 and ties share a rank. NaN queries get rank 0.
auto dense_rank_desc(std::span<const double> population, std::span<const double> queries, Exec exec = Exec::serial)
    -> std::vector<std::size_t>;

// Occurrences of each code in [0, k); negative codes are ignored.
auto category_counts(std::span<const std::int32_t> codes, std::size_t k, Exec exec = Exec::serial)
    -> std::vector<std::size_t>;

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Ordinary least squares of y on x. Requires at least two points with distinct x.
auto least_squares(std::span<const double> x, std::span<const double> y) -> std::optional<LinearFit>;

// Pearson correlation; nullopt when either variable has zero variance or n < 2.
auto pearson(std::span<const double> x, std::span<const double> y) -> std::optional<double>;

// Shannon entropy (natural log) of a distribution; zero entries contribute 0.
auto entropy(std::span<const double> distribution) -> double;

}  // namespace weaver::kernels
