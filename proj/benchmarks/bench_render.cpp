#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "talagen/machine.hpp"
#include "talagen/render.hpp"
#include "talagen/rhythm.hpp"
#include "talagen/sample_bank.hpp"
#include "talagen/streaming.hpp"

namespace {

using namespace talagen;

const TalaDefinition& tintal() { return *find_tala(builtin_talas(), "tintal"); }

std::shared_ptr<const StrokeSampleBank> bank() {
    static const auto b = std::make_shared<const StrokeSampleBank>(synthetic_bank(44100));
    return b;
}

void BM_RenderTala(benchmark::State& state) {
    const double seconds = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_tala(tintal(), 120.0, seconds, *bank()).data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seconds * 44100));
}
BENCHMARK(BM_RenderTala)->Arg(10)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_OnsetGrid(benchmark::State& state) {
    const RenderState s{0, state.range(0) == 0 ? 120.0 : 97.375, 48000};
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(onset_sample_index(s, i++, 1, 4));
    }
}
BENCHMARK(BM_OnsetGrid)->Arg(0)->Arg(1);

// One real-time block; at 44.1 kHz a 512-sample block has an 11.6 ms budget.
void BM_StreamingBlock(benchmark::State& state) {
    const auto block = static_cast<std::size_t>(state.range(0));
    auto built = build_machine(default_layout(tintal(), 4, true), builtin_talas());
    auto stream = std::make_unique<SequenceStream>(std::make_shared<const Wfst>(std::move(built.machine)), 0,
                                                   built.cycle_beats);
    StreamingRenderer renderer(std::move(stream), bank(), RenderState{0, 350.0, 44100});
    std::vector<float> out(block);
    for (auto _ : state) {
        benchmark::DoNotOptimize(renderer.render_block(out).mark_count);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(block));
}
BENCHMARK(BM_StreamingBlock)->Arg(64)->Arg(512)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
