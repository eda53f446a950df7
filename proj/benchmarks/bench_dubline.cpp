#include <benchmark/benchmark.h>

#include "dubline/admm.hpp"
#include "dubline/phantom.hpp"
#include "dubline/radon.hpp"
#include "dubline/ssim.hpp"
#include "dubline/unfold.hpp"

using namespace dubline;

namespace {

const RadonOperator& shared_operator(std::size_t n) {
    static const RadonOperator op64 = build_operator(64, 64, default_angle_set());
    static const RadonOperator op128 = build_operator(128, 128, default_angle_set());
    static const RadonOperator op256 = build_operator(256, 256, default_angle_set());
    return n == 64 ? op64 : n == 128 ? op128 : op256;
}

Image phantom(std::size_t n) { return generate(random_phantom_spec(7), n, n).image; }

void BM_BuildOperator(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_operator(n, n, default_angle_set()));
}
BENCHMARK(BM_BuildOperator)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Project(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RadonOperator& op = shared_operator(n);
    const Image y = phantom(n);
    for (auto _ : state) benchmark::DoNotOptimize(op.project(y));
    state.counters["nnz"] = static_cast<double>(op.nonzeros());
}
BENCHMARK(BM_Project)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RadonOperator& op = shared_operator(n);
    const Sinogram s = op.project(phantom(n));
    for (auto _ : state) benchmark::DoNotOptimize(op.synthesize(s));
}
BENCHMARK(BM_Synthesize)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_SoftThreshold(benchmark::State& state) {
    const Sinogram s = shared_operator(256).project(phantom(256));
    for (auto _ : state) benchmark::DoNotOptimize(soft_threshold(s.matrix(), 0.01));
}
BENCHMARK(BM_SoftThreshold)->Unit(benchmark::kMicrosecond);

void BM_AdmmIterations(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RadonOperator& op = shared_operator(n);
    const Image y = phantom(n);
    AdmmConfig cfg;
    cfg.max_iter = static_cast<std::size_t>(state.range(1));
    cfg.fixed_iterations = true;
    for (auto _ : state) benchmark::DoNotOptimize(solve(op, y, cfg));
}
BENCHMARK(BM_AdmmIterations)->Args({64, 100})->Args({256, 10})->Unit(benchmark::kMillisecond);

void BM_UnfoldedForward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RadonOperator& op = shared_operator(n);
    const UnfoldedModel model = init_model(static_cast<std::size_t>(state.range(1)), 16, 0, OperatorSpec::of(op));
    const Image y = phantom(n);
    for (auto _ : state) benchmark::DoNotOptimize(forward(model, op, y));
}
BENCHMARK(BM_UnfoldedForward)->Args({64, 8})->Args({256, 4})->Args({256, 8})->Unit(benchmark::kMillisecond);

void BM_SsimGradient(benchmark::State& state) {
    const Image a = phantom(256);
    const Image b = generate(random_phantom_spec(8), 256, 256).image;
    Image grad;
    for (auto _ : state) benchmark::DoNotOptimize(ssim_with_gradient(a, b, SsimConfig{}, grad));
}
BENCHMARK(BM_SsimGradient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
