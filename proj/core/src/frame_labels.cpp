#include "talagen/frame_labels.hpp"

#include <algorithm>
#include <cmath>

#include "talagen/error.hpp"

namespace talagen {

FrameLabelSequence smooth_frame_labels(FrameLabelSequence seq) {
    auto& l = seq.labels;
    for (std::size_t i = 1; i + 1 < l.size(); ++i) {
        if (l[i - 1] == l[i + 1] && l[i] != l[i - 1]) {
            l[i] = l[i - 1];
        }
    }
    return seq;
}

Transcription frame_labels_to_onsets(const FrameLabelSequence& seq) {
    Transcription out;
    for (std::size_t i = 0; i < seq.labels.size(); ++i) {
        const auto& label = seq.labels[i];
        if (i > 0 && label == seq.labels[i - 1]) {
            continue;
        }
        if (label == kNoStroke) {
            continue;
        }
        out.events.push_back({static_cast<double>(i) * seq.hop_sec, StrokeLabel(label)});
    }
    return out;
}

FrameLabelSequence stroke_frame_labels(std::span<const float> segment, int sample_rate, const std::string& label,
                                       double hop_sec, const EnvelopeConfig& envelope) {
    const auto boundary = nostroke_boundary(segment, sample_rate, envelope);
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hop_sec * sample_rate)));
    const std::size_t frames = std::max<std::size_t>(1, (segment.size() + hop - 1) / hop);
    FrameLabelSequence seq;
    seq.hop_sec = hop_sec;
    seq.labels.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        seq.labels.push_back(f * hop < boundary ? label : std::string(kNoStroke));
    }
    return seq;
}

}  // namespace talagen
