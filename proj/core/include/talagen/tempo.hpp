#pragma once

// Tap tempo and button adjustments. Every result is clamped to [10, 350] BPM.

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace talagen {

/// The last 16 tap times in seconds, strictly increasing.
class TapHistory {
public:
    static constexpr std::size_t kCapacity = 16;

    /// False, leaving the history unchanged, for a non-finite time or one not
    /// after the previous tap.
    bool add(double t_sec);
    void clear() noexcept { count_ = 0; }

    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    /// k = 0 is the oldest retained tap.
    double at(std::size_t k) const;
    double last() const { return at(count_ - 1); }

private:
    std::array<double, kCapacity> taps_{};
    std::size_t first_ = 0;
    std::size_t count_ = 0;
};

enum class TapEstimator {
    LastInterval,   // 60 / (t_k - t_{k-1})
    MovingAverage,  // 60 / mean of the last four intervals
};

/// Needs at least three taps; nullopt otherwise.
std::optional<double> estimate_bpm(const TapHistory& taps, TapEstimator estimator = TapEstimator::LastInterval);

double clamp_bpm(double bpm);

/// Default at start-up, Text for a typed tempo (Set), Buttons for the
/// relative actions, Tap for tap estimates.
enum class TempoSource { Default, Text, Buttons, Tap };
std::string_view to_string(TempoSource source);

struct TempoState {
    double bpm = 60.0;
    TempoSource source = TempoSource::Default;
};

struct TempoAdjustment {
    enum class Kind { Plus1, Minus1, Plus5, Minus5, Double, Half, Set };
    Kind kind = Kind::Set;
    double value = 0.0;  // used by Set
};

/// "+1", "-1", "+5", "-5", "double" or "half".
std::optional<TempoAdjustment> parse_adjustment(std::string_view text);

/// Throws ValidationError for Set with a non-finite value.
TempoState apply_adjustment(const TempoState& state, const TempoAdjustment& adjustment);

/// Records a tap and, once the estimator has enough taps, returns the new
/// tap-sourced state.
std::optional<TempoState> register_tap(TapHistory& taps, double t_sec,
                                       TapEstimator estimator = TapEstimator::LastInterval);

}  // namespace talagen
