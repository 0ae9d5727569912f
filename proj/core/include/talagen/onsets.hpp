#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "talagen/wav.hpp"

namespace talagen {

struct OnsetConfig {
    double window_sec = 0.0232;
    double hop_sec = 0.005;
    double threshold = 0.30;     // fraction of the recording's maximum flux
    double min_gap_sec = 0.050;  // minimum distance between reported onsets
};

/// Half-wave rectified spectral flux, one value per STFT frame.
std::vector<double> spectral_flux(std::span<const float> samples, int sample_rate, const OnsetConfig& config);

/// Peak-picked spectral flux onsets in seconds, strictly increasing. The
/// threshold is relative to the flux maximum, so output does not depend on
/// overall gain. Silence yields no onsets.
std::vector<double> detect_onsets(const Waveform& audio, const OnsetConfig& config = {});

struct EnvelopeConfig {
    double rms_window_sec = 0.010;
    double threshold = 0.03;  // fraction of the segment's peak absolute amplitude
};

/// First sample after the peak from which the centered moving-RMS envelope
/// stays below threshold x peak until the end of the segment; returns
/// `segment.size()` when it never settles. Throws on an all-zero segment.
std::size_t nostroke_boundary(std::span<const float> segment, int sample_rate, const EnvelopeConfig& config = {});

}  // namespace talagen
