#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "safeplan/barrier.hpp"
#include "safeplan/cbf.hpp"
#include "safeplan/gridmap.hpp"
#include "safeplan/planner.hpp"

using namespace safeplan;

namespace {

const OccupancyGrid& single_obstacle()
{
    static const OccupancyGrid g = inflate(load_map(SAFEPLAN_FIXTURES "/single_obstacle.txt"), 0.2);
    return g;
}

const std::vector<BarrierFunction>& single_barriers()
{
    static const std::vector<BarrierFunction> b = [] {
        std::vector<BarrierFunction> out;
        for (const auto& r : partition_regions(single_obstacle()))
            out.push_back(fit_region(single_obstacle(), r, {}).barrier);
        return out;
    }();
    return b;
}

}  // namespace

static void BM_FitRegion(benchmark::State& state)
{
    const auto& grid = single_obstacle();
    const auto regions = partition_regions(grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_region(grid, regions.front(), {}));
}
BENCHMARK(BM_FitRegion)->Unit(benchmark::kMillisecond);

static void BM_SolveQp(benchmark::State& state)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    std::vector<LinearConstraint> cs(static_cast<std::size_t>(state.range(0)));
    for (auto& c : cs)
        c = {d(rng), d(rng) + 2.0, 0};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_qp(cs, 0.3, {}));
}
BENCHMARK(BM_SolveQp)->Arg(1)->Arg(4)->Arg(16);

static void BM_Plan(benchmark::State& state)
{
    const auto& grid = single_obstacle();
    const auto& barriers = single_barriers();
    PlannerConfig cfg;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        cfg.rng_seed = seed++;
        benchmark::DoNotOptimize(plan(grid, barriers, cfg, {0.9, 0.8, 0.0}, {7.45, 6.8}));
    }
}
BENCHMARK(BM_Plan)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
