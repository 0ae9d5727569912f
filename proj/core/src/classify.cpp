#include "talagen/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "talagen/error.hpp"

namespace talagen {

std::vector<float> segment_features(std::span<const float> samples, int sample_rate, double onset_sec,
                                    const ClassifyConfig& config) {
    const auto start = static_cast<std::size_t>(std::llround(onset_sec * sample_rate));
    const auto length = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(config.window_sec * sample_rate)));
    std::vector<float> segment(length, 0.0f);
    if (start < samples.size()) {
        const auto n = std::min(length, samples.size() - start);
        std::copy_n(samples.begin() + static_cast<std::ptrdiff_t>(start), n, segment.begin());
    }
    return log_mel(segment, sample_rate, config.features).values;
}

TemplateBank::TemplateBank(std::vector<StrokeTemplate> templates, ClassifyConfig config)
    : templates_(std::move(templates)), config_(config) {
    if (templates_.empty()) {
        throw Error("template bank needs at least one class");
    }
    const auto dim = templates_.front().centroid.size();
    for (const auto& t : templates_) {
        if (t.centroid.size() != dim || dim == 0) {
            throw Error("template for " + t.label.name + " has dimension " + std::to_string(t.centroid.size()) +
                        ", expected " + std::to_string(dim));
        }
    }
}

std::size_t TemplateBank::nearest(std::span<const float> features) const {
    if (features.size() != dimension()) {
        throw Error("feature dimension " + std::to_string(features.size()) + " does not match templates (" +
                    std::to_string(dimension()) + ")");
    }
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < templates_.size(); ++c) {
        const auto& centroid = templates_[c].centroid;
        double d = 0.0;
        for (std::size_t i = 0; i < centroid.size(); ++i) {
            const double diff = static_cast<double>(features[i]) - centroid[i];
            d += diff * diff;
        }
        if (d < best_distance) {
            best_distance = d;
            best = c;
        }
    }
    return best;
}

namespace {

TemplateBank centroids(const std::vector<LabeledClip>& clips, const std::vector<StrokeLabel>& classes,
                       const ClassifyConfig& config) {
    std::vector<StrokeTemplate> templates;
    for (const auto& label : classes) {
        std::vector<double> sum;
        std::size_t count = 0;
        for (const auto& clip : clips) {
            if (!(clip.label == label)) {
                continue;
            }
            if (clip.audio.samples.empty()) {
                throw Error("empty clip for " + label.name);
            }
            const auto f = segment_features(clip.audio.samples, clip.audio.sample_rate, 0.0, config);
            if (sum.empty()) {
                sum.assign(f.size(), 0.0);
            } else if (sum.size() != f.size()) {
                throw Error("clips for " + label.name + " disagree on sample rate");
            }
            for (std::size_t i = 0; i < f.size(); ++i) {
                sum[i] += f[i];
            }
            ++count;
        }
        if (count == 0) {
            throw Error("no clips for class " + label.name);
        }
        StrokeTemplate t{label, std::vector<float>(sum.size())};
        for (std::size_t i = 0; i < sum.size(); ++i) {
            t.centroid[i] = static_cast<float>(sum[i] / static_cast<double>(count));
        }
        templates.push_back(std::move(t));
    }
    return TemplateBank(std::move(templates), config);
}

}  // namespace

TemplateBank build_templates(const std::vector<LabeledClip>& clips, const ClassifyConfig& config) {
    std::vector<StrokeLabel> classes;
    for (const auto& clip : clips) {
        if (std::find(classes.begin(), classes.end(), clip.label) == classes.end()) {
            classes.push_back(clip.label);
        }
    }
    if (classes.empty()) {
        throw Error("build_templates: no clips");
    }
    return centroids(clips, classes, config);
}

TemplateBank build_templates(const std::vector<LabeledClip>& clips, const std::vector<StrokeLabel>& vocabulary,
                             const ClassifyConfig& config) {
    if (vocabulary.empty()) {
        throw Error("build_templates: empty vocabulary");
    }
    return centroids(clips, vocabulary, config);
}

Transcription classify_segments(const Waveform& audio, std::span<const double> onsets, const TemplateBank& bank) {
    Transcription out;
    const double end_sec = audio.duration_sec();
    for (std::size_t k = 0; k < onsets.size(); ++k) {
        const double t = onsets[k];
        if (!(t >= 0.0) || t >= end_sec) {
            throw Error("onset at " + std::to_string(t) + " s lies outside the audio (" + std::to_string(end_sec) +
                        " s)");
        }
        if (k > 0 && !(t > onsets[k - 1])) {
            throw Error("onsets must be strictly increasing");
        }
        const auto f = segment_features(audio.samples, audio.sample_rate, t, bank.config());
        out.events.push_back({t, bank.templates()[bank.nearest(f)].label});
    }
    return out;
}

}  // namespace talagen
