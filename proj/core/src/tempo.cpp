#include "talagen/tempo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "talagen/error.hpp"
#include "talagen/render.hpp"

namespace talagen {

bool TapHistory::add(double t_sec) {
    if (!std::isfinite(t_sec) || (count_ > 0 && t_sec <= last())) {
        return false;
    }
    if (count_ < kCapacity) {
        taps_[(first_ + count_) % kCapacity] = t_sec;
        ++count_;
    } else {
        taps_[first_] = t_sec;
        first_ = (first_ + 1) % kCapacity;
    }
    return true;
}

double TapHistory::at(std::size_t k) const {
    if (k >= count_) {
        throw std::out_of_range("tap index out of range");
    }
    return taps_[(first_ + k) % kCapacity];
}

double clamp_bpm(double bpm) {
    return std::clamp(bpm, kMinBpm, kMaxBpm);
}

std::optional<double> estimate_bpm(const TapHistory& taps, TapEstimator estimator) {
    const std::size_t n = taps.size();
    if (n < 3) {
        return std::nullopt;
    }
    double interval = 0.0;
    if (estimator == TapEstimator::LastInterval) {
        interval = taps.at(n - 1) - taps.at(n - 2);
    } else {
        const std::size_t intervals = std::min<std::size_t>(4, n - 1);
        interval = (taps.at(n - 1) - taps.at(n - 1 - intervals)) / static_cast<double>(intervals);
    }
    return clamp_bpm(60.0 / interval);
}

std::string_view to_string(TempoSource source) {
    switch (source) {
        case TempoSource::Default:
            return "default";
        case TempoSource::Text:
            return "text";
        case TempoSource::Buttons:
            return "buttons";
        case TempoSource::Tap:
            return "tap";
    }
    return "default";
}

std::optional<TempoAdjustment> parse_adjustment(std::string_view text) {
    using K = TempoAdjustment::Kind;
    if (text == "+1") return TempoAdjustment{K::Plus1};
    if (text == "-1") return TempoAdjustment{K::Minus1};
    if (text == "+5") return TempoAdjustment{K::Plus5};
    if (text == "-5") return TempoAdjustment{K::Minus5};
    if (text == "double" || text == "x2") return TempoAdjustment{K::Double};
    if (text == "half" || text == "/2") return TempoAdjustment{K::Half};
    return std::nullopt;
}

TempoState apply_adjustment(const TempoState& state, const TempoAdjustment& adjustment) {
    double bpm = state.bpm;
    switch (adjustment.kind) {
        case TempoAdjustment::Kind::Plus1:
            bpm += 1.0;
            break;
        case TempoAdjustment::Kind::Minus1:
            bpm -= 1.0;
            break;
        case TempoAdjustment::Kind::Plus5:
            bpm += 5.0;
            break;
        case TempoAdjustment::Kind::Minus5:
            bpm -= 5.0;
            break;
        case TempoAdjustment::Kind::Double:
            bpm *= 2.0;
            break;
        case TempoAdjustment::Kind::Half:
            bpm /= 2.0;
            break;
        case TempoAdjustment::Kind::Set:
            if (!std::isfinite(adjustment.value)) {
                throw ValidationError("tempo must be a finite number");
            }
            bpm = adjustment.value;
            break;
    }
    const auto source = adjustment.kind == TempoAdjustment::Kind::Set ? TempoSource::Text : TempoSource::Buttons;
    return {clamp_bpm(bpm), source};
}

std::optional<TempoState> register_tap(TapHistory& taps, double t_sec, TapEstimator estimator) {
    if (!taps.add(t_sec)) {
        return std::nullopt;
    }
    if (auto bpm = estimate_bpm(taps, estimator)) {
        return TempoState{*bpm, TempoSource::Tap};
    }
    return std::nullopt;
}

}  // namespace talagen
