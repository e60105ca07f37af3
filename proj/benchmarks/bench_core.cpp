#include <benchmark/benchmark.h>

#include "dspem/em.hpp"
#include "dspem/mh.hpp"
#include "dspem/simulate.hpp"

using namespace dspem;

namespace {

Dataset bench_dataset(int n, bool ds_plus) {
    return simulate_dataset(disease_model(5), scenario(2), n, ds_plus, 12345);
}

}  // namespace

static void BM_LogLikelihood(benchmark::State& state) {
    const Dataset data = bench_dataset(static_cast<int>(state.range(0)), true);
    const DatasetSummary summary(data);
    const Theta theta(0.04, 1.2, 2.8, 2.5, 1.1, 1.1);
    const LogLikelihood ll(theta, summary);
    Rng rng(1);
    const SimplexPoint z = sample_dirichlet(DirichletParams::uniform(), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ll(z));
    }
}
BENCHMARK(BM_LogLikelihood)->Arg(100)->Arg(500);

static void BM_EvaluatorBuild(benchmark::State& state) {
    const Dataset data = bench_dataset(100, true);
    const DatasetSummary summary(data);
    const Theta theta(0.04, 1.2, 2.8, 2.5, 1.1, 1.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(LogLikelihood(theta, summary));
    }
}
BENCHMARK(BM_EvaluatorBuild);

static void BM_ChainSweeps(benchmark::State& state) {
    const Dataset data = bench_dataset(100, false);
    const auto [theta, alpha] = init_psi(data, ModelVariant::Full);
    ChainConfig config;
    config.n_samples = static_cast<int>(state.range(0));
    config.n_burnin = 100;
    Rng rng(2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_chain(theta, alpha, data, config, rng));
    }
}
BENCHMARK(BM_ChainSweeps)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_MStepTheta(benchmark::State& state) {
    const Dataset data = bench_dataset(100, true);
    const auto [theta, alpha] = init_psi(data, ModelVariant::Full);
    ChainConfig config;
    config.n_samples = static_cast<int>(state.range(0));
    config.n_burnin = 100;
    Rng rng(3);
    const SampleBank bank = run_chain(theta, alpha, data, config, rng).bank;
    for (auto _ : state) {
        benchmark::DoNotOptimize(m_step_theta(bank, data, theta, ModelVariant::Full));
    }
}
BENCHMARK(BM_MStepTheta)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_DirichletMle(benchmark::State& state) {
    Rng rng(4);
    SampleBank bank;
    std::array<double, 9> av = {40, 12, 3, 11, 2, 1, 4, 1.5, 1};
    const DirichletParams alpha(av);
    for (int i = 0; i < 10000; ++i)
        bank.samples.push_back(sample_dirichlet(alpha, rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(m_step_alpha(bank));
    }
}
BENCHMARK(BM_DirichletMle)->Unit(benchmark::kMillisecond);

static void BM_FitSmall(benchmark::State& state) {
    const Dataset data = bench_dataset(100, true);
    EmConfig cfg;
    cfg.mc_samples = 2000;
    cfg.max_iter = 5;
    cfg.min_iter = 1;
    std::uint64_t seed = 5;
    for (auto _ : state) {
        Rng rng(seed++);
        benchmark::DoNotOptimize(fit(data, cfg, ModelVariant::Full, rng));
    }
}
BENCHMARK(BM_FitSmall)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
