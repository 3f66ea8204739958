// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "fbell/measurement.hpp"
#include "fbell/omp.hpp"
#include "fbell/sensing.hpp"
#include "fbell/tomography.hpp"

using namespace fbell;

namespace {

std::vector<CountTable> bench_tables() {
    const auto psi = canonical_bell(BellLabel::PsiPlus);
    const auto grid = FrequencyGrid::reference();
    NoiseConfig noise;
    std::vector<CountTable> tables;
    for (const auto& b : {MeasurementBasis::zz(), MeasurementBasis::xx()})
        tables.push_back(simulate_counts(coincidence_probs(psi, b, grid), noise, b, 1.0, tables.size() + 1));
    return tables;
}

ChainSettings bench_chain() {
    ChainSettings s;
    s.n_samples = 400;
    s.burn_in = 200;
    s.thin = 5;
    s.chains = 4;
    return s;
}

ScanConfig bench_scan() {
    ScanConfig cfg;
    cfg.state_label = BellLabel::PhiPlus;
    cfg.mode = ScanMode::common;
    cfg.phase_grid = ScanConfig::linear_grid(0.0, kPi, 256);
    cfg.seed = 3;
    return cfg;
}

}  // namespace

static void BM_Likelihood(benchmark::State& state) {
    const LikelihoodModel model(bench_tables());
    const Matrix4c rho = DensityMatrix::maximally_mixed().elements();
    for (auto _ : state) benchmark::DoNotOptimize(model(rho));
}
BENCHMARK(BM_Likelihood);

static void BM_ChainsSerial(benchmark::State& state) {
    const auto tables = bench_tables();
    const auto target = canonical_bell(BellLabel::PsiPlus);
    for (auto _ : state) benchmark::DoNotOptimize(sample_posterior_serial(tables, target, bench_chain(), 7));
}
BENCHMARK(BM_ChainsSerial)->Unit(benchmark::kMillisecond);

static void BM_ChainsParallel(benchmark::State& state) {
    const auto tables = bench_tables();
    const auto target = canonical_bell(BellLabel::PsiPlus);
    for (auto _ : state) benchmark::DoNotOptimize(sample_posterior(tables, target, bench_chain(), 7));
    state.counters["threads"] = parallel::max_threads();
}
BENCHMARK(BM_ChainsParallel)->Unit(benchmark::kMillisecond);

static void BM_ScanSerial(benchmark::State& state) {
    const auto cfg = bench_scan();
    for (auto _ : state) benchmark::DoNotOptimize(scan_serial(cfg, NoiseConfig{}));
}
BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);

static void BM_ScanParallel(benchmark::State& state) {
    const auto cfg = bench_scan();
    for (auto _ : state) benchmark::DoNotOptimize(scan(cfg, NoiseConfig{}));
    state.counters["threads"] = parallel::max_threads();
}
BENCHMARK(BM_ScanParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
