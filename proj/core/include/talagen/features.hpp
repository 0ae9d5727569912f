#pragma once

// Short-time spectra and log-Mel features.

#include <cstddef>
#include <span>
#include <vector>

#include "talagen/wav.hpp"

namespace talagen {

/// Centered framing with zero padding: frame t is centered on sample t*hop,
/// so a signal of L samples yields 1 + L/hop frames.
struct StftConfig {
    double window_sec = 0.0464;
    double hop_sec = 0.010;
};

struct Spectrogram {
    std::size_t bins = 0;
    std::size_t frames = 0;
    std::size_t hop = 0;        // samples
    std::size_t window = 0;     // samples
    std::vector<float> magnitude;  // frame-major: magnitude[t * bins + k]

    std::span<const float> frame(std::size_t t) const { return {magnitude.data() + t * bins, bins}; }
};

/// Hann-windowed magnitude spectrogram.
Spectrogram magnitude_spectrogram(std::span<const float> samples, int sample_rate, const StftConfig& config);

struct FeatureConfig {
    double window_sec = 0.0464;
    double hop_sec = 0.010;
    int mel_bands = 128;
    double fmin_hz = 0.0;
    double fmax_hz = 0.0;          // 0 means Nyquist
    double variance_floor = 1e-12; // keeps constant input at zero after standardization
};

/// F x T log-Mel energies, stored frame-major.
struct FeatureMatrix {
    int bands = 0;
    std::size_t frames = 0;
    double hop_sec = 0.0;
    std::vector<float> values;

    float at(int band, std::size_t frame) const { return values[frame * static_cast<std::size_t>(bands) + static_cast<std::size_t>(band)]; }
    std::span<const float> frame(std::size_t t) const {
        return {values.data() + t * static_cast<std::size_t>(bands), static_cast<std::size_t>(bands)};
    }
};

/// Triangular HTK-scale filters; row b holds the weights of band b over `bins` FFT bins.
std::vector<std::vector<float>> mel_filterbank(int bands, std::size_t fft_size, int sample_rate, double fmin_hz,
                                               double fmax_hz);

/// Log-Mel spectrogram standardized to zero mean and unit variance over all cells.
/// Throws on empty audio or a sample rate below 8 kHz.
FeatureMatrix log_mel(const Waveform& audio, const FeatureConfig& config = {});

/// Same, over a raw sample span.
FeatureMatrix log_mel(std::span<const float> samples, int sample_rate, const FeatureConfig& config = {});

}  // namespace talagen
