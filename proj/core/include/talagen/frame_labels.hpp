#pragma once

// Post-processing of per-frame class predictions, as produced by frame-wise
// transcribers.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "talagen/onsets.hpp"
#include "talagen/transcription.hpp"

namespace talagen {

inline constexpr std::string_view kNoStroke = "No-stroke";

struct FrameLabelSequence {
    std::vector<std::string> labels;
    double hop_sec = 0.010;

    friend bool operator==(const FrameLabelSequence&, const FrameLabelSequence&) = default;
};

/// One left-to-right pass: a frame whose two neighbours agree with each other
/// but not with it takes their label. Updates are visible to later frames.
/// Endpoints are never changed.
FrameLabelSequence smooth_frame_labels(FrameLabelSequence seq);

/// Frame 0 and every frame whose label differs from its predecessor start a
/// stroke at index * hop_sec. No-stroke onsets are dropped.
Transcription frame_labels_to_onsets(const FrameLabelSequence& seq);

/// Frame labels for one isolated stroke: `label` up to the 3%-envelope
/// boundary, No-stroke afterwards.
FrameLabelSequence stroke_frame_labels(std::span<const float> segment, int sample_rate, const std::string& label,
                                       double hop_sec = 0.010, const EnvelopeConfig& envelope = {});

}  // namespace talagen
