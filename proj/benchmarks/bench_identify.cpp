#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "talagen/alignment.hpp"
#include "talagen/identify.hpp"
#include "talagen/rhythm.hpp"
#include "talagen/synthetic.hpp"

namespace {

using namespace talagen;

void BM_NwScore(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> symbol(0, 7);
    std::vector<int> x(16), y(n);
    for (auto& v : x) v = symbol(rng);
    for (auto& v : y) v = symbol(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(nw_score(x, y));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NwScore)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oN);

// About two minutes of tintal at 120 BPM: 15 cycles of 16 strokes.
Transcription two_minutes() {
    SyntheticOptions options;
    options.cycles = 15;
    options.min_bpm = options.max_bpm = 120.0;
    return synthesize_transcription(*find_tala(builtin_talas(), "tintal"), options, 3);
}

void BM_IdentifyTwoMinutes(benchmark::State& state) {
    const auto y = two_minutes();
    const auto method = static_cast<IdentifyMethod>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(identify_tala(y, builtin_talas(), method));
    }
    state.SetLabel(std::string(to_string(method)));
}
BENCHMARK(BM_IdentifyTwoMinutes)
    ->Arg(static_cast<int>(IdentifyMethod::Nw))
    ->Arg(static_cast<int>(IdentifyMethod::Ratio))
    ->Arg(static_cast<int>(IdentifyMethod::Both))
    ->Unit(benchmark::kMillisecond);

void BM_MatchingScoreByLength(benchmark::State& state) {
    SyntheticOptions options;
    options.cycles = static_cast<std::size_t>(state.range(0));
    const auto& tala = *find_tala(builtin_talas(), "jhaptal");
    const auto y = synthesize_transcription(tala, options, 1).labels();
    for (auto _ : state) {
        benchmark::DoNotOptimize(nw_matching_score(y, tala));
    }
    state.counters["strokes"] = static_cast<double>(y.size());
}
BENCHMARK(BM_MatchingScoreByLength)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
