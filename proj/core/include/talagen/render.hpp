#pragma once

// Offline rendering. Stroke j of beat i (a beat of |b| strokes) starts at
//
//   n = n0 + floor((i + j / |b|) * 60 * Fs / BPM)
//
// where i counts beats since the last tempo change, which also rebased n0.
// The output is the sum of every scheduled waveform at its onset.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <span>
#include <string_view>
#include <vector>

#include "talagen/rhythm.hpp"
#include "talagen/sample_bank.hpp"
#include "talagen/wav.hpp"
#include "talagen/wfst.hpp"

namespace talagen {

inline constexpr double kMinBpm = 10.0;
inline constexpr double kMaxBpm = 350.0;

struct RenderState {
    std::int64_t n0 = 0;
    double bpm = 60.0;
    int sample_rate = 44100;
};

/// Throws ValidationError unless bpm lies in [10, 350] and the sample rate
/// is 44100 or 48000.
void validate(const RenderState& state);

/// Onset sample of stroke `j` in a beat of `beat_size` strokes, `i` beats
/// after n0. Integer tempos are evaluated in exact integer arithmetic.
std::int64_t onset_sample_index(const RenderState& state, std::size_t i, std::size_t j, std::size_t beat_size);

/// Quiet tick at every half-beat while the tempo is below `below_bpm`.
struct PulseFill {
    bool enabled = false;
    double below_bpm = 40.0;
    float gain = 0.25f;
};

/// Label reserved for pulse ticks; render() draws it from pulse_tick().
inline constexpr std::string_view kPulseTickName = "~tick";

/// 30 ms click at 1.5 kHz, scaled by `gain`.
std::vector<float> pulse_tick(int sample_rate, float gain);

struct ScheduledStroke {
    std::int64_t sample_index = 0;
    StrokeLabel label;
};

/// Calls `emit(sample_index, label)` for the strokes of one beat in onset
/// order, skipping rests, with the pulse tick at j = 1/2 when enabled. Both
/// renderers go through this so their schedules agree sample for sample.
template <class Emit>
void schedule_beat(const RenderState& state, std::size_t i, const Beat& beat, const PulseFill& pulse, Emit&& emit) {
    static const StrokeLabel tick{std::string(kPulseTickName)};
    const bool with_tick = pulse.enabled && state.bpm < pulse.below_bpm;
    const std::int64_t tick_at = with_tick ? onset_sample_index(state, i, 1, 2) : 0;
    bool tick_done = !with_tick;
    const std::size_t size = beat.size();
    for (std::size_t j = 0; j < size; ++j) {
        const std::int64_t n = onset_sample_index(state, i, j, size);
        if (!tick_done && tick_at < n) {
            emit(tick_at, tick);
            tick_done = true;
        }
        if (!beat.events[j].is_rest()) {
            emit(n, beat.events[j]);
        }
    }
    if (!tick_done) {
        emit(tick_at, tick);
    }
}

/// Tempo in effect from the start of beat `beat_index` (counted from the
/// first rendered beat).
struct TempoChange {
    std::size_t beat_index = 0;
    double bpm = 60.0;
};

/// Schedules `beats` starting at `initial.n0`. Changes must be sorted by
/// beat index; each rebases n0 to the onset of its beat.
std::vector<ScheduledStroke> schedule_beats(std::span<const Beat> beats, const RenderState& initial,
                                            std::span<const TempoChange> changes = {}, const PulseFill& pulse = {});

/// x[n] = sum_k h_k[n - n_k] over [0, length), adding strokes in schedule
/// order. Throws if a label is missing from the bank.
std::vector<float> render(std::span<const ScheduledStroke> schedule, const StrokeSampleBank& bank,
                          std::size_t length, const PulseFill& pulse = {});

struct RenderOptions {
    bool with_filler = true;
    std::size_t cycles_per_call = 4;
    std::uint64_t seed = 0;
    WavFormat format = WavFormat::Pcm16;
    PulseFill pulse;
};

struct RenderReport {
    std::size_t samples = 0;
    std::size_t beats = 0;
    std::size_t clipped = 0;
    std::vector<ScheduledStroke> schedule;
};

/// Renders `duration_sec` of whatever `stream` emits at a constant tempo,
/// pulling beats until the next onset would fall past the end. Throws
/// ValidationError for a bad tempo, sample rate or duration and Error when the
/// bank lacks a stroke the machine can emit.
std::vector<float> render_sequence(SequenceStream& stream, double bpm, double duration_sec,
                                   const StrokeSampleBank& bank, const PulseFill& pulse = {},
                                   RenderReport* report = nullptr);

/// Renders `duration_sec` of the tala's call cycle at a constant tempo. The
/// bank rate is the output rate. Throws ValidationError for a bad tempo,
/// sample rate or duration and Error when the bank lacks strokes.
std::vector<float> render_tala(const TalaDefinition& tala, double bpm, double duration_sec,
                               const StrokeSampleBank& bank, const RenderOptions& options = {},
                               RenderReport* report = nullptr);

/// render_tala followed by write_wav.
RenderReport render_tala_to_wav(const TalaDefinition& tala, double bpm, double duration_sec,
                                const StrokeSampleBank& bank, const std::filesystem::path& path,
                                const RenderOptions& options = {});

}  // namespace talagen
