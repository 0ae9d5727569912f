#pragma once

// Segment-classify transcription: nearest-centroid templates over the
// log-Mel window that follows each detected onset.

#include <span>
#include <vector>

#include "talagen/features.hpp"
#include "talagen/rhythm.hpp"
#include "talagen/transcription.hpp"
#include "talagen/wav.hpp"

namespace talagen {

struct ClassifyConfig {
    double window_sec = 0.150;  // post-onset analysis window
    FeatureConfig features{};
};

/// Flattened log-Mel matrix of [onset, onset + window), zero padded past the
/// end and standardized over the window.
std::vector<float> segment_features(std::span<const float> samples, int sample_rate, double onset_sec,
                                    const ClassifyConfig& config = {});

struct StrokeTemplate {
    StrokeLabel label;
    std::vector<float> centroid;
};

/// Per-class centroids. Order is the vocabulary order used for tie-breaks.
class TemplateBank {
public:
    TemplateBank(std::vector<StrokeTemplate> templates, ClassifyConfig config = {});

    const std::vector<StrokeTemplate>& templates() const noexcept { return templates_; }
    const ClassifyConfig& config() const noexcept { return config_; }
    std::size_t dimension() const noexcept { return templates_.front().centroid.size(); }

    /// Index of the nearest centroid (squared Euclidean); the first wins ties.
    std::size_t nearest(std::span<const float> features) const;

private:
    std::vector<StrokeTemplate> templates_;
    ClassifyConfig config_;
};

struct LabeledClip {
    Waveform audio;
    StrokeLabel label;
};

/// One centroid per label, in order of first appearance. The analysis window
/// starts at the first sample of each clip.
TemplateBank build_templates(const std::vector<LabeledClip>& clips, const ClassifyConfig& config = {});

/// As above, with classes fixed to `vocabulary`; throws if any has no clip.
TemplateBank build_templates(const std::vector<LabeledClip>& clips, const std::vector<StrokeLabel>& vocabulary,
                             const ClassifyConfig& config = {});

/// Labels each onset with its nearest template. Throws if an onset is at or
/// past the end of the audio or onsets are not strictly increasing.
Transcription classify_segments(const Waveform& audio, std::span<const double> onsets, const TemplateBank& bank);

}  // namespace talagen
