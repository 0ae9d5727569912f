#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <new>
#include <random>

#include "oracles.hpp"
#include "talagen/error.hpp"
#include "talagen/machine.hpp"
#include "talagen/streaming.hpp"

// Counts every allocation made by this test binary. GCC cannot see that the
// replaced new and delete pair up.
#pragma GCC diagnostic ignored "-Wmismatched-new-delete"
namespace {
std::atomic<std::size_t> g_allocations{0};
}  // namespace

void* operator new(std::size_t size) {
    ++g_allocations;
    if (void* p = std::malloc(size == 0 ? 1 : size)) return p;
    throw std::bad_alloc();
}
void operator delete(void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }

using namespace talagen;

namespace {

const TalaDefinition& tala(const char* name) { return *find_tala(builtin_talas(), name); }

std::shared_ptr<const StrokeSampleBank> bank(int sr) {
    static const auto b44 = std::make_shared<const StrokeSampleBank>(synthetic_bank(44100));
    static const auto b48 = std::make_shared<const StrokeSampleBank>(synthetic_bank(48000));
    return sr == 44100 ? b44 : b48;
}

std::unique_ptr<SequenceStream> stream(const char* name, std::uint64_t seed = 0, bool filler = true) {
    auto built = build_machine(default_layout(tala(name), 4, filler), builtin_talas());
    return std::make_unique<SequenceStream>(std::make_shared<const Wfst>(std::move(built.machine)), seed,
                                            built.cycle_beats);
}

std::vector<Beat> beats_of(const char* name, std::size_t n, std::uint64_t seed = 0) {
    auto s = stream(name, seed);
    std::vector<Beat> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back(*s->next_beat());
    return out;
}

struct Run {
    std::vector<float> audio;
    std::vector<BeatMark> marks;
};

// Streams `total` samples in blocks of random size, posting `bpm_at[k]` just
// before the block that starts at or after `sample_at[k]`.
Run stream_run(StreamingRenderer& r, std::size_t total, std::mt19937& rng,
               const std::vector<std::pair<std::int64_t, double>>& changes = {}, std::int64_t* change_blocks = nullptr) {
    Run run;
    std::uniform_int_distribution<std::size_t> size(64, 3000);
    std::vector<float> block(3000);
    std::size_t next = 0;
    while (run.audio.size() < total) {
        while (next < changes.size() && r.position() >= changes[next].first) {
            REQUIRE(r.set_bpm(changes[next].second));
            if (change_blocks) change_blocks[next] = r.position();
            ++next;
        }
        const std::size_t n = std::max<std::size_t>(64, std::min(size(rng), total - run.audio.size()));
        const auto status = r.render_block({block.data(), n});
        run.audio.insert(run.audio.end(), block.begin(), block.begin() + static_cast<long>(n));
        for (const auto& m : status.beats()) {
            if (m.sample_index < static_cast<std::int64_t>(total)) run.marks.push_back(m);
        }
    }
    run.audio.resize(total);
    return run;
}

}  // namespace

TEST_CASE("blocks concatenate to the offline render") {
    std::mt19937 rng(1);
    for (int sr : {44100, 48000}) {
        for (double bpm : {60.0, 97.5, 240.0}) {
            const std::size_t total = static_cast<std::size_t>(sr) * 10;
            StreamingRenderer r(stream("tintal", 3), bank(sr), {0, bpm, sr});
            const auto run = stream_run(r, total, rng);

            const RenderState state{0, bpm, sr};
            std::size_t count = 0;
            while (onset_sample_index(state, count, 0, 1) < static_cast<std::int64_t>(total)) ++count;
            const auto offline = render(schedule_beats(beats_of("tintal", count, 3), state), *bank(sr), total);
            CHECK(run.audio == offline);
        }
    }
}

TEST_CASE("a tempo change takes effect at the next beat boundary") {
    std::mt19937 rng(2);
    const int sr = 48000;
    StreamingRenderer r(stream("tintal"), bank(sr), {0, 120, sr});
    std::int64_t posted[1];
    const auto run = stream_run(r, sr * 12, rng, {{5 * 24000 + 7000, 180.0}}, posted);  // mid beat 5
    std::vector<std::int64_t> starts;
    for (const auto& m : run.marks) starts.push_back(m.sample_index);
    REQUIRE(starts.size() > 12);
    // Beats started before the block that carried the command keep the old period.
    std::size_t first_new = 0;
    while (starts[first_new] < posted[0]) ++first_new;
    for (std::size_t k = 1; k < starts.size(); ++k) {
        const auto gap = starts[k] - starts[k - 1];
        CHECK(gap == (k <= first_new ? 24000 : 16000));
    }
    CHECK(run.marks[first_new].bpm == 180.0);
    CHECK(run.marks[first_new - 1].bpm == 120.0);
}

TEST_CASE("random tempo trajectories match the offline schedule") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> tempo(10.0, 350.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int sr = trial % 2 ? 44100 : 48000;
        const std::size_t total = static_cast<std::size_t>(sr) * 20;
        std::vector<std::pair<std::int64_t, double>> changes;
        std::uniform_int_distribution<std::int64_t> when(0, static_cast<std::int64_t>(total) - 1);
        const int n_changes = trial % 6;
        for (int k = 0; k < n_changes; ++k) changes.push_back({when(rng), std::round(tempo(rng) * 8) / 8});
        std::sort(changes.begin(), changes.end());
        const double initial = std::round(tempo(rng));

        StreamingRenderer r(stream("jhaptal", static_cast<std::uint64_t>(trial)), bank(sr), {0, initial, sr});
        std::vector<std::int64_t> posted(changes.size(), std::numeric_limits<std::int64_t>::max());
        const auto run = stream_run(r, total, rng, changes, posted.data());

        // Oracle: a change posted at sample B applies from the first beat
        // whose onset, under the tempo in force, is at or after B.
        RenderState state{0, initial, sr};
        std::size_t base = 0, beat = 0, next = 0;
        std::vector<TempoChange> applied;
        while (true) {
            const auto onset = onset_sample_index(state, beat - base, 0, 1);
            if (onset >= static_cast<std::int64_t>(total)) break;
            bool rebased = false;
            while (next < changes.size() && onset >= posted[next]) {
                state.bpm = changes[next].second;
                rebased = true;
                applied.push_back({beat, state.bpm});
                ++next;
            }
            if (rebased) {
                state.n0 = onset;
                base = beat;
            }
            ++beat;
        }
        const auto offline = render(schedule_beats(beats_of("jhaptal", beat, static_cast<std::uint64_t>(trial)),
                                                   {0, initial, sr}, applied),
                                    *bank(sr), total);
        REQUIRE(run.audio == offline);
        REQUIRE(run.marks.size() == beat);
    }
}

TEST_CASE("beat marks report cycle positions and sam") {
    std::mt19937 rng(4);
    StreamingRenderer r(stream("rupak"), bank(44100), {0, 350, 44100});
    const auto run = stream_run(r, 44100 * 6, rng);
    REQUIRE(run.marks.size() > 14);
    for (std::size_t k = 0; k < run.marks.size(); ++k) {
        CHECK(run.marks[k].beat_index == k);
        CHECK(run.marks[k].cycle_position == k % 7);
        CHECK(run.marks[k].is_sam == (k % 7 == 0));
        CHECK(run.marks[k].sample_index == onset_sample_index({0, 350, 44100}, k, 0, 1));
    }
}

TEST_CASE("switching talas restarts the cycle at a beat boundary") {
    std::vector<float> block(4410);
    StreamingRenderer r(stream("tintal"), bank(44100), {0, 120, 44100});
    std::vector<BeatMark> marks;
    for (int k = 0; k < 30; ++k) {
        const auto s = r.render_block(block);
        marks.insert(marks.end(), s.beats().begin(), s.beats().end());
    }
    auto next = stream("rupak");
    REQUIRE(r.switch_sequence(next));
    CHECK(next == nullptr);
    for (int k = 0; k < 60; ++k) {
        const auto s = r.render_block(block);
        marks.insert(marks.end(), s.beats().begin(), s.beats().end());
    }
    REQUIRE(marks.size() == 18);
    const std::size_t before = 6;  // beats started in the first 3 s at 120 BPM
    for (std::size_t k = 0; k < before; ++k) CHECK(marks[k].cycle_position == k);
    CHECK(marks[before].is_sam);
    CHECK(marks[before].cycle_position == 0);
    for (std::size_t k = before; k < marks.size(); ++k) {
        CHECK(marks[k].cycle_position == (k - before) % 7);
        CHECK(marks[k].is_sam == ((k - before) % 7 == 0));
        CHECK(marks[k].beat_index == k);
    }
    auto old = r.reclaim();
    REQUIRE(old != nullptr);
    CHECK(old->beats_emitted() == before);
    CHECK(r.reclaim() == nullptr);
}

TEST_CASE("stop drops pending strokes and lets ringing ones decay") {
    const int sr = 44100;
    const auto impulse = std::make_shared<const StrokeSampleBank>(
        oracle::impulse_bank(sr, all_stroke_labels(builtin_talas()), 0.5f));
    StreamingRenderer r(stream("tintal"), bank(sr), {0, 60, sr});
    std::vector<float> block(1000);
    for (int k = 0; k < 50; ++k) r.render_block(block);  // 50000 samples; last beat at 44100 rings
    CHECK(r.stop());
    bool finished = false;
    std::size_t blocks = 0;
    std::vector<float> after;
    while (!finished) {
        const auto s = r.render_block(block);
        CHECK(s.beats().empty());
        CHECK(s.stopping);
        finished = s.finished;
        after.insert(after.end(), block.begin(), block.end());
        REQUIRE(++blocks < 100);
    }
    // Only the tail of the stroke started at 44100 remains; 250 ms long.
    const auto tail = bank(sr)->waveform(tala("tintal").theka.beats[1].events[0]);
    for (std::size_t n = 0; n < after.size(); ++n) {
        const std::size_t k = n + 50000 - 44100;
        REQUIRE(after[n] == (k < tail.size() ? tail[k] : 0.0f));
    }
    CHECK(r.stop());
    CHECK(r.render_block(block).finished);

    // A stop posted before a stroke has started removes it entirely.
    StreamingRenderer early(stream("tintal"), impulse, {0, 60, sr});
    early.stop();
    const auto s = early.render_block(block);
    CHECK(s.finished);
    CHECK(std::all_of(block.begin(), block.end(), [](float x) { return x == 0.0f; }));
}

TEST_CASE("bank and argument checks") {
    const auto partial = std::make_shared<const StrokeSampleBank>(oracle::impulse_bank(44100, {"Dha", "Dhin"}));
    CHECK_THROWS_WITH_AS(StreamingRenderer(stream("tintal"), partial, {0, 60, 44100}), doctest::Contains("Tin"),
                         ValidationError);
    CHECK_THROWS_AS(StreamingRenderer(stream("tintal"), bank(48000), {0, 60, 44100}), ValidationError);
    CHECK_THROWS_AS(StreamingRenderer(stream("tintal"), bank(44100), {0, 400, 44100}), ValidationError);
    CHECK_THROWS_AS(StreamingRenderer(nullptr, bank(44100), {0, 60, 44100}), ValidationError);

    const auto small = std::make_shared<const StrokeSampleBank>(
        oracle::impulse_bank(44100, all_stroke_labels({tala("rupak")})));
    StreamingRenderer r(stream("rupak"), small, {0, 60, 44100});
    auto other = stream("tintal");
    CHECK_THROWS_AS(r.switch_sequence(other), ValidationError);
    CHECK(other != nullptr);
    CHECK_FALSE(r.set_bpm(5));
    CHECK_FALSE(r.set_bpm(std::numeric_limits<double>::quiet_NaN()));
    CHECK(r.set_bpm(350));
    std::vector<float> tiny(63);
    CHECK_THROWS_AS(r.render_block(tiny), ValidationError);
}

TEST_CASE("render_block does not allocate") {
    const int sr = 48000;
    PulseFill pulse;
    pulse.enabled = true;
    StreamingRenderer r(stream("tintal", 5), bank(sr), {0, 30, sr}, pulse);
    std::vector<float> block(256);
    for (int k = 0; k < 8; ++k) r.render_block(block);  // first-use statics

    auto switched = stream("ektal");
    std::size_t during = 0;
    for (int k = 0; k < 4000; ++k) {
        if (k == 500) REQUIRE(r.set_bpm(200));
        if (k == 1000) REQUIRE(r.switch_sequence(switched));
        if (k == 1500) REQUIRE(r.set_bpm(20));
        if (k == 3500) REQUIRE(r.stop());
        const auto before = g_allocations.load();
        r.render_block(block);
        during += g_allocations.load() - before;
    }
    CHECK(during == 0);
    CHECK(r.reclaim() != nullptr);
}
