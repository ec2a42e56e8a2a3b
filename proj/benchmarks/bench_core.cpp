#include <cmath>

#include <benchmark/benchmark.h>

#include "dicke/awf.hpp"
#include "dicke/classical.hpp"
#include "dicke/evolve.hpp"
#include "dicke/hilbert.hpp"
#include "dicke/specfun.hpp"
#include "dicke/states.hpp"

using namespace dicke;

namespace {

hilbert::ModelParams model(int n_max, double Gp = 0.2) {
    hilbert::ModelParams p;
    p.Gp = Gp;
    p.n_max = n_max;
    return p;
}

JointState initial_state(const hilbert::ModelParams& params) {
    const double s = std::sqrt(4.0 * params.J.value());
    const auto pt = states::energy_matched_field_point(0.0, 0.54 * s, 21.0, params);
    const auto cp = states::phase_point_to_parameters(pt, params.J);
    return states::product_state(cp.w, cp.nu, params);
}

void BM_BuildHamiltonian(benchmark::State& state) {
    const auto params = model(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(hilbert::build_hamiltonian(params));
}
BENCHMARK(BM_BuildHamiltonian)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_DiagonalizeDense(benchmark::State& state) {
    const auto H = hilbert::build_hamiltonian(model(static_cast<int>(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(evolve::diagonalize(H));
}
BENCHMARK(BM_DiagonalizeDense)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_DiagonalizeByParity(benchmark::State& state) {
    const auto params = model(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(evolve::diagonalize_by_parity(params));
}
BENCHMARK(BM_DiagonalizeByParity)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_PropagatorSweep(benchmark::State& state) {
    const auto params = model(40);
    const auto dec = evolve::diagonalize_by_parity(params);
    const evolve::Propagator prop(dec, initial_state(params));
    const auto times = evolve::uniform_times(0.0, 10.0, 0.05);
    for (auto _ : state) {
        double acc = 0.0;
        prop.sweep(times, [&](std::size_t, const JointState& psi) { acc += psi.squaredNorm(); });
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(times.size()));
}
BENCHMARK(BM_PropagatorSweep)->Unit(benchmark::kMillisecond);

void BM_WignerOnGrid(benchmark::State& state) {
    const auto params = model(40);
    const auto psi = initial_state(params);
    const auto rho = evolve::reduce_atomic(psi, hilbert::build_basis(params));
    const auto coeffs = awf::multipole_coeffs(rho);
    awf::GridSpec spec;
    spec.n_theta = static_cast<int>(state.range(0));
    spec.n_phi = 2 * spec.n_theta;
    for (auto _ : state) benchmark::DoNotOptimize(awf::wigner_on_grid(coeffs, spec));
}
BENCHMARK(BM_WignerOnGrid)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Wigner3j(benchmark::State& state) {
    const HalfInt J = HalfInt::from_twice(21);
    const specfun::ThreeJArgs args{J, HalfInt(10), J, HalfInt::from_twice(-5), HalfInt(3),
                                   HalfInt::from_twice(-1)};
    for (auto _ : state) benchmark::DoNotOptimize(specfun::wigner_3j(args));
}
BENCHMARK(BM_Wigner3j);

void BM_ClassicalIntegrate(benchmark::State& state) {
    const auto params = model(120);
    const double s = std::sqrt(4.0 * params.J.value());
    const auto pt = states::energy_matched_field_point(0.0, 0.54 * s, 21.0, params);
    for (auto _ : state) benchmark::DoNotOptimize(classical::integrate(pt, 100.0, params));
}
BENCHMARK(BM_ClassicalIntegrate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
