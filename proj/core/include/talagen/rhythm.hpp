#pragma once

// Strokes, beats, beat cycles and tala definitions.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace talagen {

enum class StrokeCategory { Damped, ResonantTreble, ResonantBass, ResonantBoth };

std::string_view to_string(StrokeCategory category);
std::optional<StrokeCategory> parse_stroke_category(std::string_view text);

/// A named tabla stroke (bol). The name "-" is reserved for Rest, a beat
/// position without a stroke. Equality compares names only.
struct StrokeLabel {
    std::string name;
    std::optional<StrokeCategory> category;

    static constexpr std::string_view kRestName = "-";

    StrokeLabel() = default;
    StrokeLabel(std::string n) : name(std::move(n)) {}  // NOLINT: implicit by intent
    StrokeLabel(const char* n) : name(n) {}             // NOLINT
    StrokeLabel(std::string n, std::optional<StrokeCategory> c) : name(std::move(n)), category(c) {}

    static StrokeLabel rest() { return StrokeLabel(std::string(kRestName)); }
    bool is_rest() const noexcept { return name == kRestName; }

    friend bool operator==(const StrokeLabel& a, const StrokeLabel& b) noexcept { return a.name == b.name; }
    friend bool operator<(const StrokeLabel& a, const StrokeLabel& b) noexcept { return a.name < b.name; }
};

using StrokeSequence = std::vector<StrokeLabel>;

struct Beat {
    std::vector<StrokeLabel> events;

    Beat() = default;
    Beat(std::initializer_list<StrokeLabel> e) : events(e) {}
    explicit Beat(std::vector<StrokeLabel> e) : events(std::move(e)) {}

    std::size_t size() const noexcept { return events.size(); }
    bool is_silent() const noexcept;

    friend bool operator==(const Beat&, const Beat&) = default;
};

/// Stroke names joined by spaces, e.g. "Ti Ra Ki Ta".
std::string to_string(const Beat& beat);

struct BeatCycle {
    std::vector<Beat> beats;
    std::vector<int> vibhags;

    std::size_t size() const noexcept { return beats.size(); }

    friend bool operator==(const BeatCycle&, const BeatCycle&) = default;
};

/// Concatenates the events of every beat; Rest entries are dropped unless
/// `keep_rests` is set.
StrokeSequence flatten(const BeatCycle& cycle, bool keep_rests);

struct TalaDefinition {
    std::string name;
    BeatCycle theka;
    StrokeSequence x_ref;            // non-rest strokes of the theka, in order
    std::vector<StrokeLabel> vocabulary;
    std::vector<int> ratio;          // stroke counts over `vocabulary`, divided by their gcd
    std::optional<Beat> filler;      // beat substituted at the end of a call cycle

    std::size_t beats() const noexcept { return theka.size(); }
    std::size_t strokes() const noexcept { return x_ref.size(); }

    friend bool operator==(const TalaDefinition&, const TalaDefinition&) = default;
};

/// Builds a definition, deriving x_ref from the theka. No validation.
TalaDefinition make_tala(std::string name, std::vector<Beat> beats, std::vector<int> vibhags,
                         std::vector<StrokeLabel> vocabulary, std::vector<int> ratio,
                         std::optional<Beat> filler = std::nullopt);

/// Counts of each vocabulary stroke in `x_ref` reduced by their greatest
/// common divisor, which is the canonical ratio vector.
std::vector<int> reduced_counts(const StrokeSequence& x_ref, const std::vector<StrokeLabel>& vocabulary);

/// Every broken invariant, one message each. Empty means valid.
std::vector<std::string> validate_tala(const TalaDefinition& tala);

/// Tintal, Ektal, Jhaptal, Rupak and Deepchandi.
const std::vector<TalaDefinition>& builtin_talas();

/// Lookup among `talas` by name (ASCII id such as "tintal"); nullptr if absent.
const TalaDefinition* find_tala(const std::vector<TalaDefinition>& talas, std::string_view name);

}  // namespace talagen
