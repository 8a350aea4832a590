#include "seqrc/forecaster.hpp"
#include "seqrc/lorenz63.hpp"
#include "seqrc/metrics.hpp"
#include "seqrc/readout.hpp"
#include "seqrc/reservoir.hpp"
#include "seqrc/vorticity.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace seqrc;

namespace {

ModelSpec spec_for(bool sequential, Index input_dim, Index total)
{
    if (sequential) return SequentialSpec{input_dim, 8, total / 8, {}};
    return ReservoirSpec{input_dim, total, {}};
}

RowMatrix random_rows(Index rows, Index cols, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    RowMatrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
    return m;
}

// args: sequential flag, input dim, total state size
void BM_ReservoirStep(benchmark::State& state)
{
    const auto reservoir = Reservoir::build(spec_for(state.range(0) != 0, state.range(1), state.range(2)));
    auto s = reservoir.zero_state();
    const Vector x = Vector::Constant(state.range(1), 0.1);
    for (auto _ : state) {
        reservoir.step(s, x);
        benchmark::DoNotOptimize(s);
    }
    state.SetLabel(state.range(0) ? "seqrc" : "rc");
}
BENCHMARK(BM_ReservoirStep)->Args({0, 3, 256})->Args({1, 3, 256})->Args({0, 4096, 512})->Args({1, 4096, 512});

void BM_FitRidge(benchmark::State& state)
{
    const Index t = state.range(0), f = state.range(1);
    const RowMatrix r = random_rows(t, f, 1), y = random_rows(t, 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fit_ridge(r, y, 1e-8));
}
BENCHMARK(BM_FitRidge)->Args({2000, 260})->Args({2000, 513})->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State& state)
{
    Lorenz63Params p;
    p.discard = 1000;
    p.n_steps = 2100;
    const auto data = lorenz63_generate(p);
    const auto spec = spec_for(state.range(0) != 0, 3, 256);
    for (auto _ : state) benchmark::DoNotOptimize(train(spec, data));
    state.SetLabel(state.range(0) ? "seqrc" : "rc");
}
BENCHMARK(BM_Train)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state)
{
    const Index n = state.range(0);
    const RowMatrix a = random_rows(1, n * n, 3), b = random_rows(1, n * n, 4);
    const Vector fa = a.row(0).transpose(), fb = b.row(0).transpose();
    for (auto _ : state) benchmark::DoNotOptimize(ssim(fa, fb, FieldShape{n, n}, 8.0));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(128);

void BM_VorticityStep(benchmark::State& state)
{
    VorticityParams p;
    p.n = state.range(0);
    VorticitySolver solver(p, grf_initial(p));
    for (auto _ : state) solver.step();
}
BENCHMARK(BM_VorticityStep)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
