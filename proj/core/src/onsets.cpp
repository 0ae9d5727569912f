#include "talagen/onsets.hpp"

#include <algorithm>
#include <cmath>

#include "talagen/error.hpp"
#include "talagen/features.hpp"

namespace talagen {

std::vector<double> spectral_flux(std::span<const float> samples, int sample_rate, const OnsetConfig& config) {
    const auto spec = magnitude_spectrogram(samples, sample_rate, {config.window_sec, config.hop_sec});
    std::vector<double> flux(spec.frames, 0.0);
    std::vector<float> previous(spec.bins, 0.0f);
    for (std::size_t t = 0; t < spec.frames; ++t) {
        const auto cur = spec.frame(t);
        double sum = 0.0;
        for (std::size_t k = 0; k < spec.bins; ++k) {
            const double d = static_cast<double>(cur[k]) - previous[k];
            if (d > 0.0) {
                sum += d;
            }
        }
        flux[t] = sum;
        std::copy(cur.begin(), cur.end(), previous.begin());
    }
    return flux;
}

std::vector<double> detect_onsets(const Waveform& audio, const OnsetConfig& config) {
    if (audio.samples.empty()) {
        throw Error("detect_onsets: empty audio");
    }
    const auto flux = spectral_flux(audio.samples, audio.sample_rate, config);
    const double peak = *std::max_element(flux.begin(), flux.end());
    std::vector<double> onsets;
    if (!(peak > 0.0)) {
        return onsets;
    }
    const double threshold = config.threshold * peak;
    const double hop = std::max(1.0, std::round(config.hop_sec * audio.sample_rate)) / audio.sample_rate;

    double last_value = 0.0;
    for (std::size_t t = 0; t < flux.size(); ++t) {
        const double v = flux[t];
        const double before = t > 0 ? flux[t - 1] : 0.0;
        const double after = t + 1 < flux.size() ? flux[t + 1] : 0.0;
        if (v < threshold || v <= before || v < after) {
            continue;
        }
        const double time = static_cast<double>(t) * hop;
        if (!onsets.empty() && time - onsets.back() < config.min_gap_sec) {
            // Within the gap keep the stronger peak.
            if (v > last_value) {
                onsets.back() = time;
                last_value = v;
            }
            continue;
        }
        onsets.push_back(time);
        last_value = v;
    }
    return onsets;
}

std::size_t nostroke_boundary(std::span<const float> segment, int sample_rate, const EnvelopeConfig& config) {
    std::size_t peak_index = 0;
    float peak = 0.0f;
    for (std::size_t i = 0; i < segment.size(); ++i) {
        const float a = std::abs(segment[i]);
        if (a > peak) {
            peak = a;
            peak_index = i;
        }
    }
    if (!(peak > 0.0f)) {
        throw Error("nostroke_boundary: silent segment");
    }

    // Prefix sums of squares give the centered moving RMS in O(1) per sample.
    std::vector<double> prefix(segment.size() + 1, 0.0);
    for (std::size_t i = 0; i < segment.size(); ++i) {
        prefix[i + 1] = prefix[i] + static_cast<double>(segment[i]) * segment[i];
    }
    const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(config.rms_window_sec * sample_rate)));
    const std::size_t half = window / 2;
    const auto rms_at = [&](std::size_t n) {
        const std::size_t lo = n >= half ? n - half : 0;
        const std::size_t hi = std::min(segment.size(), n + (window - half));
        return std::sqrt((prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo));
    };

    const double threshold = config.threshold * peak;
    std::size_t boundary = segment.size();
    for (std::size_t n = segment.size(); n-- > peak_index + 1;) {
        if (rms_at(n) >= threshold) {
            break;
        }
        boundary = n;
    }
    return boundary;
}

}  // namespace talagen
