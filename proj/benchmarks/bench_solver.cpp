#include <benchmark/benchmark.h>

#include <cmath>

#include "chronoscale/delta_calculus.hpp"
#include "chronoscale/dynamics.hpp"
#include "chronoscale/existence.hpp"
#include "chronoscale/oracle.hpp"

using namespace chronoscale;

namespace {

PiecewiseRHS exp_rhs(TransitionKind kind) {
    return PiecewiseRHS{[](double, const Vector& y) { return y; }, [](double, const Vector& y) { return y; }, kind, 1};
}

// Slow decay across each gap, so long discrete runs stay bounded.
PiecewiseRHS decay_rhs() {
    return PiecewiseRHS{[](double, const Vector& y) { return Vector(-y); },
                        [](double, const Vector& y) { return Vector(-1e-3 * y); }, TransitionKind::Increment, 1};
}

void BM_SolveInterval(benchmark::State& state) {
    const TimeScale ts = make_scale(spec::RealLine{0, static_cast<double>(state.range(0))});
    const PiecewiseRHS rhs{[](double t, const Vector& y) { return Vector(-y * std::cos(t)); },
                           [](double, const Vector& y) { return y; }, TransitionKind::Increment, 1};
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_ivp(ts, rhs, 0, Vector::Constant(1, 1), static_cast<double>(state.range(0))));
    }
}
BENCHMARK(BM_SolveInterval)->Arg(1)->Arg(10)->Arg(100);

void BM_SolveIntegers(benchmark::State& state) {
    const TimeScale z = make_scale(spec::HIntegers{});
    const double end = static_cast<double>(state.range(0));
    const PiecewiseRHS rhs = decay_rhs();
    for (auto _ : state) benchmark::DoNotOptimize(solve_ivp(z, rhs, 0, Vector::Constant(1, 1), end));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolveIntegers)->Arg(100)->Arg(1000);

void BM_SolvePeriodic(benchmark::State& state) {
    const TimeScale ts = make_scale(spec::PeriodicUnion{1, 1, 0});
    const PiecewiseRHS rhs = exp_rhs(TransitionKind::DeltaRate);
    for (auto _ : state) benchmark::DoNotOptimize(solve_ivp(ts, rhs, 0, Vector::Constant(1, 1), 20));
}
BENCHMARK(BM_SolvePeriodic);

void BM_StateDependentGap(benchmark::State& state) {
    const StateDomain dom{[](const Vector& x) {
        return make_scale(spec::PieceList{{{-kInfinity, 1 + x[0]}, {3 + x[0], kInfinity}}});
    }};
    const PiecewiseRHS rhs{[](double, const Vector&) { return Vector::Constant(1, 0.5); },
                           [](double, const Vector&) { return Vector::Zero(1); }, TransitionKind::Increment, 1};
    for (auto _ : state) benchmark::DoNotOptimize(solve_ivp_state_dependent(dom, rhs, 0, Vector::Zero(1), 6));
}
BENCHMARK(BM_StateDependentGap);

void BM_DeltaIntegralMixed(benchmark::State& state) {
    const TimeScale ts = make_scale(spec::PeriodicUnion{0.5, 0.25, 0});
    const ScaleFunction g{[](double t) { return Vector::Constant(1, std::sin(t)); }, 1, true};
    for (auto _ : state) benchmark::DoNotOptimize(delta_integral(ts, g, 0, 30));
}
BENCHMARK(BM_DeltaIntegralMixed);

void BM_Picard(benchmark::State& state) {
    TheoremInputs in;
    in.b = 2;
    in.M = 3;
    in.N = 0;
    in.y0 = Vector::Constant(1, 1);
    const TimeScale ts = make_scale(spec::RealLine{-1, 1});
    PicardOptions opts;
    opts.cross_check = false;
    opts.uniqueness_probe = false;
    for (auto _ : state) benchmark::DoNotOptimize(picard_run(ts, exp_rhs(TransitionKind::Increment), in, opts));
}
BENCHMARK(BM_Picard)->Unit(benchmark::kMillisecond);

void BM_Recursion(benchmark::State& state) {
    const TimeScale z = make_scale(spec::HIntegers{});
    const PiecewiseRHS rhs = decay_rhs();
    for (auto _ : state) benchmark::DoNotOptimize(discrete_recursion(z, rhs, 0, Vector::Constant(1, 1), 1000));
}
BENCHMARK(BM_Recursion);

}  // namespace
BENCHMARK_MAIN();
