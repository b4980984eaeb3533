#include <benchmark/benchmark.h>

#include "bvwave/scenario.hpp"

namespace {

void bm_assemble(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto mesh = bvwave::build_uniform_mesh(k);
    for (auto _ : state) {
        auto m = bvwave::assemble_mass(mesh);
        auto s = bvwave::assemble_stiffness(mesh);
        benchmark::DoNotOptimize(m);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(bm_assemble)->Arg(4)->Arg(5)->Arg(6);

void bm_forward_solve(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto sc = bvwave::build_reference_scenario(bvwave::PhiVariant::corrected);
    const auto lv = bvwave::make_level(k, sc.T, 1 << (k + 1), bvwave::SchemeParams{});
    const Eigen::VectorXd g = bvwave::actuator_load(sc, lv.mesh, bvwave::midpoint_rule());
    const bvwave::TimeLoad f = bvwave::load_of_step_forcing(sc.exact_u, g, lv.grid);
    for (auto _ : state) {
        auto y = lv.op->solve_forward(&f, nullptr, nullptr);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(bm_forward_solve)->Arg(4)->Arg(5);

void bm_p1_extraction(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto sc = bvwave::build_reference_scenario(bvwave::PhiVariant::corrected);
    const auto lv = bvwave::make_level(k, sc.T, 1 << (k + 1), bvwave::SchemeParams{});
    const Eigen::VectorXd g = bvwave::actuator_load(sc, lv.mesh, bvwave::midpoint_rule());
    const bvwave::TimeLoad f = bvwave::load_of_step_forcing(sc.exact_u, g, lv.grid);
    const auto y = lv.op->solve_forward(&f, nullptr, nullptr);
    for (auto _ : state) {
        auto p1 = bvwave::compute_p1(y, {g});
        auto mx = bvwave::global_max_abs(p1[0]);
        benchmark::DoNotOptimize(mx);
    }
}
BENCHMARK(bm_p1_extraction)->Arg(5);

} // namespace

BENCHMARK_MAIN();
