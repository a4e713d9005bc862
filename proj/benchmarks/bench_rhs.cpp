#include <benchmark/benchmark.h>

#include "kerrbath/evolve.hpp"
#include "kerrbath/fock.hpp"
#include "kerrbath/kernels.hpp"

using namespace kerrbath;

namespace {

SystemParams weak_coupling() {
    SystemParams p;
    p.lambda_bar = default_cutoff(p.mu_bar, p.intensity);
    return p;
}

void BM_BandedRhs(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const SystemParams p = weak_coupling();
    MasterEquation rhs(EvolutionMode::born_markov_asymptotic, p, d);
    const Matrix rho = coherent_state_density(cplx(std::sqrt(0.15 * d)), FockSpace(d)).matrix();
    Matrix out(d, d);
    for (auto _ : state) {
        rhs(rho, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_BandedRhs)->Arg(32)->Arg(64)->Arg(109)->Arg(182);

void BM_DenseRhs(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const SystemParams p = weak_coupling();
    const auto ops = make_ladder(FockSpace(d), p.mu_bar);
    const auto c = asymptotic_coefficients(p, d);
    const Matrix rho = coherent_state_density(cplx(std::sqrt(0.15 * d)), FockSpace(d)).matrix();
    for (auto _ : state) {
        Matrix out = free_rhs(rho, ops, p.mu_bar) + dissipation_rhs(rho, ops, c) + noise_rhs(rho, ops, c);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_DenseRhs)->Arg(32)->Arg(64)->Arg(109);

void BM_TransientCoefficient(benchmark::State& state) {
    const BathSpec bath{1e-4, 10.0, 1.0};
    const double tau = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(transient_at(11.1, bath, tau));
}
BENCHMARK(BM_TransientCoefficient)->Arg(1)->Arg(10)->Arg(50);

void BM_AsymptoticB2(benchmark::State& state) {
    const BathSpec bath{1e-4, 111.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(asymptotic_b2(11.1, bath));
}
BENCHMARK(BM_AsymptoticB2);

}  // namespace

BENCHMARK_MAIN();
