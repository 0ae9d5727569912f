#include "talagen/render.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "talagen/error.hpp"
#include "talagen/machine.hpp"
#include "talagen/wfst.hpp"

namespace talagen {

void validate(const RenderState& state) {
    if (!std::isfinite(state.bpm) || state.bpm < kMinBpm || state.bpm > kMaxBpm) {
        std::ostringstream msg;
        msg << "tempo " << state.bpm << " BPM is outside [" << kMinBpm << ", " << kMaxBpm << "]";
        throw ValidationError(msg.str());
    }
    if (state.sample_rate != 44100 && state.sample_rate != 48000) {
        throw ValidationError("sample rate " + std::to_string(state.sample_rate) + " Hz is not 44100 or 48000");
    }
    if (state.n0 < 0) {
        throw ValidationError("start sample must be non-negative");
    }
}

std::int64_t onset_sample_index(const RenderState& state, std::size_t i, std::size_t j, std::size_t beat_size) {
    if (beat_size == 0) {
        return onset_sample_index(state, i, 0, 1);
    }
    const auto size = static_cast<std::int64_t>(beat_size);
    const auto numer = static_cast<std::int64_t>(i) * size + static_cast<std::int64_t>(j);
    const double rounded = std::round(state.bpm);
    if (rounded == state.bpm) {
        // floor(numer * 60 * Fs / (size * bpm)) exactly.
        const auto bpm = static_cast<std::int64_t>(rounded);
        const std::int64_t scaled = numer * 60 * static_cast<std::int64_t>(state.sample_rate);
        return state.n0 + scaled / (size * bpm);
    }
    const long double offset = static_cast<long double>(numer) * 60.0L * state.sample_rate /
                               (static_cast<long double>(size) * static_cast<long double>(state.bpm));
    return state.n0 + static_cast<std::int64_t>(std::floor(offset));
}

std::vector<float> pulse_tick(int sample_rate, float gain) {
    const auto length = static_cast<std::size_t>(std::lround(0.030 * sample_rate));
    std::vector<float> out(length);
    for (std::size_t n = 0; n < length; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        const double env = std::exp(-t / 0.006) * (0.5 - 0.5 * std::cos(std::numbers::pi * (length - n) / length));
        out[n] = static_cast<float>(gain * env * std::sin(2.0 * std::numbers::pi * 1500.0 * t));
    }
    return out;
}

std::vector<ScheduledStroke> schedule_beats(std::span<const Beat> beats, const RenderState& initial,
                                            std::span<const TempoChange> changes, const PulseFill& pulse) {
    validate(initial);
    for (std::size_t c = 1; c < changes.size(); ++c) {
        if (changes[c].beat_index < changes[c - 1].beat_index) {
            throw ValidationError("tempo changes must be sorted by beat index");
        }
    }
    RenderState state = initial;
    std::size_t base = 0;
    std::size_t next_change = 0;
    std::vector<ScheduledStroke> out;
    for (std::size_t g = 0; g < beats.size(); ++g) {
        while (next_change < changes.size() && changes[next_change].beat_index <= g) {
            state.n0 = onset_sample_index(state, g - base, 0, 1);
            base = g;
            state.bpm = changes[next_change].bpm;
            validate(state);
            ++next_change;
        }
        schedule_beat(state, g - base, beats[g], pulse,
                      [&](std::int64_t n, const StrokeLabel& label) { out.push_back({n, label}); });
    }
    return out;
}

std::vector<float> render(std::span<const ScheduledStroke> schedule, const StrokeSampleBank& bank,
                          std::size_t length, const PulseFill& pulse) {
    std::vector<float> out(length, 0.0f);
    std::vector<float> tick;
    for (const auto& s : schedule) {
        std::span<const float> h;
        if (s.label.name == kPulseTickName) {
            if (tick.empty()) {
                tick = pulse_tick(bank.sample_rate(), pulse.gain);
            }
            h = tick;
        } else {
            h = bank.waveform(s.label);
        }
        if (s.sample_index < 0) {
            throw ValidationError("negative onset sample index");
        }
        const auto start = static_cast<std::size_t>(s.sample_index);
        if (start >= length) {
            continue;
        }
        const std::size_t count = std::min(h.size(), length - start);
        for (std::size_t k = 0; k < count; ++k) {
            out[start + k] += h[k];
        }
    }
    return out;
}

namespace {

void require_duration(double duration_sec) {
    if (!std::isfinite(duration_sec) || duration_sec <= 0.0) {
        throw ValidationError("duration must be positive");
    }
}

std::string join(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        out += (out.empty() ? "" : ", ") + n;
    }
    return out;
}

}  // namespace

std::vector<float> render_sequence(SequenceStream& stream, double bpm, double duration_sec,
                                   const StrokeSampleBank& bank, const PulseFill& pulse, RenderReport* report) {
    const RenderState state{0, bpm, bank.sample_rate()};
    validate(state);
    require_duration(duration_sec);
    std::vector<std::string> missing;
    for (const auto& label : output_strokes(stream.machine())) {
        if (!bank.contains(label)) {
            missing.push_back(label.name);
        }
    }
    if (!missing.empty()) {
        throw Error("sample bank lacks strokes: " + join(missing));
    }

    const auto length = static_cast<std::size_t>(std::llround(duration_sec * bank.sample_rate()));
    std::vector<Beat> beats;
    while (onset_sample_index(state, beats.size(), 0, 1) < static_cast<std::int64_t>(length)) {
        const Beat* beat = stream.next_beat();
        if (beat == nullptr) {
            break;
        }
        beats.push_back(*beat);
    }
    auto schedule = schedule_beats(beats, state, {}, pulse);
    auto audio = render(schedule, bank, length, pulse);
    if (report != nullptr) {
        report->samples = length;
        report->beats = beats.size();
        report->schedule = std::move(schedule);
    }
    return audio;
}

std::vector<float> render_tala(const TalaDefinition& tala, double bpm, double duration_sec,
                               const StrokeSampleBank& bank, const RenderOptions& options, RenderReport* report) {
    validate(RenderState{0, bpm, bank.sample_rate()});
    require_duration(duration_sec);
    if (const auto missing = bank.missing_strokes(tala); !missing.empty()) {
        throw Error("sample bank lacks strokes of " + tala.name + ": " + join(missing));
    }
    const std::vector<TalaDefinition> talas{tala};
    auto built = build_machine(default_layout(tala, options.cycles_per_call, options.with_filler), talas);
    SequenceStream stream(std::make_shared<const Wfst>(std::move(built.machine)), options.seed, built.cycle_beats);
    return render_sequence(stream, bpm, duration_sec, bank, options.pulse, report);
}

RenderReport render_tala_to_wav(const TalaDefinition& tala, double bpm, double duration_sec,
                                const StrokeSampleBank& bank, const std::filesystem::path& path,
                                const RenderOptions& options) {
    RenderReport report;
    auto audio = render_tala(tala, bpm, duration_sec, bank, options, &report);
    const auto written = write_wav(path, audio, bank.sample_rate(), options.format);
    report.clipped = written.clipped;
    return report;
}

}  // namespace talagen
