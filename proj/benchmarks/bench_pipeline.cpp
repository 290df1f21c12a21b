#include "bifkit/bifurcation_detector.hpp"
#include "bifkit/continuation.hpp"
#include "bifkit/coupling_algebra.hpp"
#include "bifkit/domain_mesh.hpp"
#include "bifkit/ground_state.hpp"
#include "bifkit/weighted_spectrum.hpp"

#include <benchmark/benchmark.h>

using namespace bifkit;

namespace {

constexpr double kTwoPi = 6.283185307179586;

void BM_GroundState(benchmark::State& state) {
    const auto disc = make_discretization(DomainSpec::interval(kTwoPi), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_omega(disc, 1e-10));
}
BENCHMARK(BM_GroundState)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_BallGroundState(benchmark::State& state) {
    const auto disc = make_discretization(DomainSpec::ball(4.0, 3), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_omega(disc, 1e-10));
}
BENCHMARK(BM_BallGroundState)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Spectrum(benchmark::State& state) {
    const auto disc = make_discretization(DomainSpec::interval(kTwoPi), static_cast<int>(state.range(0)));
    const auto omega = solve_omega(disc, 1e-10);
    for (auto _ : state) benchmark::DoNotOptimize(compute_spectrum(disc, omega, 20));
}
BENCHMARK(BM_Spectrum)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_BifurcationScan(benchmark::State& state) {
    const auto disc = make_discretization(DomainSpec::interval(kTwoPi), 1024);
    const auto spectrum = compute_spectrum(disc, solve_omega(disc, 1e-10), 20);
    const CouplingConfig focusing({1, 2, 3});
    const CouplingConfig mixed({-2, -1, 3, 4});
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_bifurcations(focusing, spectrum));
        benchmark::DoNotOptimize(find_bifurcations(mixed, spectrum));
    }
}
BENCHMARK(BM_BifurcationScan)->Unit(benchmark::kMillisecond);

void BM_Continuation(benchmark::State& state) {
    const auto disc = make_discretization(DomainSpec::interval(kTwoPi), static_cast<int>(state.range(0)));
    const auto omega = solve_omega(disc, 1e-10);
    const auto spectrum = compute_spectrum(disc, omega, 20);
    const CouplingConfig config({1, 2, 3});
    const auto origin = find_bifurcations(config, spectrum).points.front();
    const ContinuationEngine engine(disc, config, omega, spectrum);
    const Partition part = Partition::parse(3, "1|23");
    ContinuationSettings settings;
    settings.max_steps = 50;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            engine.continue_branch(origin, part, engine.branch_switch(origin, part, settings), settings));
    }
}
BENCHMARK(BM_Continuation)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
