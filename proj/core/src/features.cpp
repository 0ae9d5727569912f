#include "talagen/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "talagen/error.hpp"

namespace talagen {

namespace {

std::size_t to_samples(double sec, int sample_rate) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(sec * sample_rate)));
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

Spectrogram magnitude_spectrogram(std::span<const float> samples, int sample_rate, const StftConfig& config) {
    Spectrogram out;
    out.window = to_samples(config.window_sec, sample_rate);
    out.hop = to_samples(config.hop_sec, sample_rate);
    out.frames = 1 + samples.size() / out.hop;

    detail::RealFft fft(out.window);
    out.bins = fft.bins();
    out.magnitude.resize(out.frames * out.bins);

    std::vector<double> hann(out.window);
    for (std::size_t i = 0; i < out.window; ++i) {
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(out.window));
    }

    const auto half = static_cast<std::ptrdiff_t>(out.window / 2);
    const auto len = static_cast<std::ptrdiff_t>(samples.size());
    auto buf = fft.input();
    for (std::size_t t = 0; t < out.frames; ++t) {
        const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t * out.hop) - half;
        for (std::size_t i = 0; i < out.window; ++i) {
            const std::ptrdiff_t n = start + static_cast<std::ptrdiff_t>(i);
            buf[i] = (n >= 0 && n < len) ? hann[i] * samples[static_cast<std::size_t>(n)] : 0.0;
        }
        fft.execute();
        float* row = out.magnitude.data() + t * out.bins;
        for (std::size_t k = 0; k < out.bins; ++k) {
            row[k] = static_cast<float>(fft.magnitude(k));
        }
    }
    return out;
}

std::vector<std::vector<float>> mel_filterbank(int bands, std::size_t fft_size, int sample_rate, double fmin_hz,
                                               double fmax_hz) {
    const std::size_t bins = fft_size / 2 + 1;
    const double nyquist = sample_rate / 2.0;
    if (fmax_hz <= 0.0 || fmax_hz > nyquist) {
        fmax_hz = nyquist;
    }
    const double mel_lo = hz_to_mel(fmin_hz);
    const double mel_hi = hz_to_mel(fmax_hz);
    std::vector<double> edges(static_cast<std::size_t>(bands) + 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / static_cast<double>(bands + 1));
    }

    std::vector<std::vector<float>> fb(static_cast<std::size_t>(bands), std::vector<float>(bins, 0.0f));
    for (std::size_t b = 0; b < fb.size(); ++b) {
        const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
        for (std::size_t k = 0; k < bins; ++k) {
            const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
            double w = 0.0;
            if (f > lo && f <= mid) {
                w = (f - lo) / (mid - lo);
            } else if (f > mid && f < hi) {
                w = (hi - f) / (hi - mid);
            }
            fb[b][k] = static_cast<float>(w);
        }
    }
    return fb;
}

FeatureMatrix log_mel(std::span<const float> samples, int sample_rate, const FeatureConfig& config) {
    if (samples.empty()) {
        throw Error("log_mel: empty audio");
    }
    if (sample_rate < 8000) {
        throw Error("log_mel: sample rate " + std::to_string(sample_rate) + " Hz is below 8 kHz");
    }
    const auto spec = magnitude_spectrogram(samples, sample_rate, {config.window_sec, config.hop_sec});
    const auto fb = mel_filterbank(config.mel_bands, spec.window, sample_rate, config.fmin_hz, config.fmax_hz);

    FeatureMatrix out;
    out.bands = config.mel_bands;
    out.frames = spec.frames;
    out.hop_sec = static_cast<double>(spec.hop) / sample_rate;
    out.values.resize(out.frames * static_cast<std::size_t>(out.bands));

    std::vector<double> logs(out.values.size());
    for (std::size_t t = 0; t < spec.frames; ++t) {
        const auto mag = spec.frame(t);
        for (std::size_t b = 0; b < fb.size(); ++b) {
            double energy = 0.0;
            for (std::size_t k = 0; k < mag.size(); ++k) {
                const double m = mag[k];
                energy += fb[b][k] * m * m;
            }
            logs[t * fb.size() + b] = std::log(energy + 1e-10);
        }
    }

    double mean = 0.0;
    for (double v : logs) {
        mean += v;
    }
    mean /= static_cast<double>(logs.size());
    double var = 0.0;
    for (double v : logs) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(logs.size());
    if (var <= config.variance_floor) {
        std::fill(out.values.begin(), out.values.end(), 0.0f);
        return out;
    }
    const double scale = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < logs.size(); ++i) {
        out.values[i] = static_cast<float>((logs[i] - mean) * scale);
    }
    return out;
}

FeatureMatrix log_mel(const Waveform& audio, const FeatureConfig& config) {
    return log_mel(audio.samples, audio.sample_rate, config);
}

}  // namespace talagen
