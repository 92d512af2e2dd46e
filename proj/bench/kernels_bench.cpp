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

#include "fixtures.hpp"
#include "weaver/facts/engine.hpp"
#include "weaver/facts/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace weaver;
using kernels::Exec;

namespace {

auto normal_values(std::size_t n) -> std::vector<double> {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> d(50.0, 12.0);
    std::vector<double> out(n);
    for (auto& v : out) v = d(rng);
    return out;
}

auto exec_of(const benchmark::State& state) -> Exec { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_moments(benchmark::State& state) {
    const auto values = normal_values(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::moments(values, exec_of(state)));
    label(state);
}

void BM_summarize(benchmark::State& state) {
    const auto values = normal_values(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::summarize(values, exec_of(state)));
    label(state);
}

void BM_category_counts(benchmark::State& state) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::int32_t> d(0, 63);
    std::vector<std::int32_t> codes(static_cast<std::size_t>(state.range(0)));
    for (auto& c : codes) c = d(rng);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::category_counts(codes, 64, exec_of(state)));
    label(state);
}

void BM_dense_rank(benchmark::State& state) {
    const auto population = normal_values(static_cast<std::size_t>(state.range(0)));
    const std::vector<double> queries(population.begin(), population.begin() + std::min<std::ptrdiff_t>(256, state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::dense_rank_desc(population, queries, exec_of(state)));
    label(state);
}

void BM_compute_facts(benchmark::State& state) {
    const auto countries = static_cast<std::size_t>(state.range(0));
    auto ds = testing::random_gapminder(11, countries, 40);
    auto spec = testing::scatter_spec(*ds);
    callout::Callout brush{{}, callout::CalloutKind::brush2d, callout::AxisRange{0.0, 1e9}, callout::AxisRange{0.0, 1e3}};
    auto pkg = testing::package(brush, spec, ds);
    facts::EngineOptions options;
    options.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(facts::compute_facts(pkg, {}, options));
    state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds->row_count()));
}

void sizes(benchmark::internal::Benchmark* b) {
    for (std::int64_t n : {1 << 12, 1 << 16, 1 << 20}) {
        b->Args({n, 0});
        b->Args({n, 1});
    }
}

}  // namespace

BENCHMARK(BM_moments)->Apply(sizes);
BENCHMARK(BM_summarize)->Apply(sizes);
BENCHMARK(BM_category_counts)->Apply(sizes);
BENCHMARK(BM_dense_rank)->Apply(sizes);
BENCHMARK(BM_compute_facts)->Args({100, 0})->Args({100, 1})->Args({500, 0})->Args({500, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
