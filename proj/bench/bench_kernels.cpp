// Serial reference vs OpenMP kernels: jump-channel construction and trajectory sampling.

#include <benchmark/benchmark.h>

#include "semigroup/demo.hpp"
#include "semigroup/unravel.hpp"

using namespace semigroup;

namespace {

struct ChannelFixture {
    SystemModel model = demo_model(0.1);
    BathState bath = BathState::gibbs(model, kDemoBeta);
    SectorOperators sec = build_sectors(model);
    double eta = 0.4;
    std::vector<std::vector<Matrix>> blocks = scattering_blocks(model, sec, eta);
};

void channels(benchmark::State& state, Execution exec)
{
    static const ChannelFixture f;
    for (auto _ : state) {
        auto set = build_jump_channels(f.blocks, f.model, f.bath, f.eta, kDefaultWeightFloor, exec);
        benchmark::DoNotOptimize(set.channels.data());
    }
}

void trajectories(benchmark::State& state, Execution exec)
{
    RandomStream rng(11, 0);
    const GeneratorBundle b = random_bundle(rng, 4, 6, Mode::trace_enforced);
    const Vector psi = random_ket(rng, 4);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto ens = sample_trajectories(b, psi, 2.0, n, 42, exec);
        benchmark::DoNotOptimize(ens.averaged_state.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

} // namespace

BENCHMARK_CAPTURE(channels, serial, Execution::serial)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(channels, parallel, Execution::parallel)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(trajectories, serial, Execution::serial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(trajectories, parallel, Execution::parallel)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
