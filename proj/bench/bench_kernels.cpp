// Serial reference vs OpenMP kernels on data sized like a training run.

#include <random>

#include <benchmark/benchmark.h>

#include "triage/datagen.hpp"
#include "triage/kernels.hpp"
#include "triage/pca.hpp"
#include "triage/pipeline.hpp"

namespace {

using triage::Execution;
using triage::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = g(rng);
    return m;
}

void BM_Covariance(benchmark::State& state, Execution exec) {
    const Matrix z = random_matrix(static_cast<std::size_t>(state.range(0)), 16);
    for (auto _ : state) benchmark::DoNotOptimize(triage::kernels::covariance(z, exec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LossGrad(benchmark::State& state, Execution exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix z = random_matrix(n, 16);
    std::vector<double> y(n), w(16, 0.05);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<double>(i % 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(triage::kernels::logistic_loss_grad(w, 0.1, z, y, 1e-3, exec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Evaluate(benchmark::State& state, Execution exec) {
    const triage::Dataset data = triage::generate_dataset(triage::default_generator_config());
    triage::BundleConfig cfg;
    cfg.train.max_iters = 200;
    const triage::ModelBundle bundle = triage::train_bundle(data, cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(triage::evaluate(data, bundle, triage::CascadeMode::triggered_only, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(data.size()));
}

} // namespace

BENCHMARK_CAPTURE(BM_Covariance, serial, Execution::serial)->Arg(636)->Arg(100000);
BENCHMARK_CAPTURE(BM_Covariance, omp, Execution::parallel)->Arg(636)->Arg(100000);
BENCHMARK_CAPTURE(BM_LossGrad, serial, Execution::serial)->Arg(636)->Arg(100000);
BENCHMARK_CAPTURE(BM_LossGrad, omp, Execution::parallel)->Arg(636)->Arg(100000);
BENCHMARK_CAPTURE(BM_Evaluate, serial, Execution::serial);
BENCHMARK_CAPTURE(BM_Evaluate, omp, Execution::parallel);

BENCHMARK_MAIN();
