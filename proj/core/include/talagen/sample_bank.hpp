#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "talagen/classify.hpp"
#include "talagen/rhythm.hpp"

namespace talagen {

/// Stroke label -> impulse response with its onset at sample 0. All waveforms
/// share one sample rate and peak within [-1, 1]. Rest maps to silence.
class StrokeSampleBank {
public:
    explicit StrokeSampleBank(int sample_rate);

    /// Throws on Rest, an empty waveform, or a peak above 1.
    void add(const StrokeLabel& label, std::vector<float> waveform);

    int sample_rate() const noexcept { return sample_rate_; }
    bool contains(const StrokeLabel& label) const;
    std::vector<StrokeLabel> labels() const;

    /// Waveform for `label`; empty for Rest; throws Error for unknown labels.
    std::span<const float> waveform(const StrokeLabel& label) const;

    /// Strokes of the theka and filler missing from the bank.
    std::vector<std::string> missing_strokes(const TalaDefinition& tala) const;

private:
    int sample_rate_;
    std::map<std::string, std::vector<float>, std::less<>> waveforms_;
};

/// Vocabulary and filler strokes of every tala, sorted and without duplicates.
std::vector<StrokeLabel> all_stroke_labels(const std::vector<TalaDefinition>& talas);

/// 250 ms decaying two-partial tones, one per label; label k of the sorted
/// set gets a fundamental spaced evenly in log-frequency between 150 Hz and
/// 4.8 kHz. Deterministic for a given label set.
StrokeSampleBank synthetic_bank(int sample_rate, const std::vector<StrokeLabel>& labels);

/// Synthetic bank over every built-in stroke.
StrokeSampleBank synthetic_bank(int sample_rate = 44100);

/// Directory of `<label>.wav` files. An optional manifest.json of the form
/// {"strokes": {"Dha": "dha_01.wav", ...}} overrides file names. Every file
/// must share one sample rate.
StrokeSampleBank load_sample_bank(const std::filesystem::path& dir);

/// Each waveform as a labeled clip, for template building.
std::vector<LabeledClip> bank_clips(const StrokeSampleBank& bank);

}  // namespace talagen
