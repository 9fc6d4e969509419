#include "sdd/billiard.hpp"
#include "sdd/fokker_planck.hpp"
#include "sdd/lorentz_stats.hpp"
#include "sdd/packing.hpp"
#include "sdd/sampler.hpp"

#include <benchmark/benchmark.h>

using namespace sdd;

namespace {

const DiscField& setup_one_field() {
    static const DiscField field = make_two_domain_field(TwoDomainSetup{}, 7);
    return field;
}

void BM_BilliardEvents(benchmark::State& state) {
    const DiscField& field = setup_one_field();
    Rng rng(1);
    Billiard<double> b(field, random_start(field, rng));
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        b.advance_events(n);
        benchmark::DoNotOptimize(b.state().pos.x);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_BilliardEvents)->Arg(10'000);

void BM_PeriodicPacking(benchmark::State& state) {
    const double phi = static_cast<double>(state.range(0)) / 100.0;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto f = generate_periodic(20.0, 0.5, phi, seed++);
        benchmark::DoNotOptimize(f.discs().size());
    }
}
BENCHMARK(BM_PeriodicPacking)->Arg(80)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_SamplerSteps(benchmark::State& state) {
    const Region dom = Region::interval(-1, 1);
    const DiffusionModel m(dom, ScalarField::two_piece(dom, 0.0, 1.0, 2.0), ScalarField::constant(dom, 0.5));
    SamplerConfig c;
    c.scheme = static_cast<Scheme>(state.range(0));
    c.h = 1e-3;
    c.steps = 100'000;
    c.burn_in = 0;
    c.bins = BinEdges{-1, 1, 20};
    for (auto _ : state) {
        auto t = run(m, c);
        benchmark::DoNotOptimize(t.final_position.x);
        ++c.seed;
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.steps));
    state.SetLabel(std::string(to_string(c.scheme)));
}
BENCHMARK(BM_SamplerSteps)
    ->Arg(static_cast<int>(Scheme::em_driftfree))
    ->Arg(static_cast<int>(Scheme::maem))
    ->Unit(benchmark::kMillisecond);

void BM_FokkerPlanckStep(benchmark::State& state) {
    const Region dom = Region::interval(-1, 1);
    const DiffusionModel m(dom, ScalarField::two_piece(dom, 0.0, 1.0, 2.0), ScalarField::constant(dom, 0.5));
    const Grid1D g = Grid1D::over(m, static_cast<std::size_t>(state.range(0)));
    const auto p0 = sample_profile(ScalarField::parse("[-1, 0]: 1 | [0, 1]: 0"), g);
    for (auto _ : state) {
        auto p = evolve(m, p0, 0.1, 1e-3, {0.5});
        benchmark::DoNotOptimize(p.rho.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 100);
}
BENCHMARK(BM_FokkerPlanckStep)->Arg(400)->Arg(4000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
