#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "talagen/rhythm.hpp"

namespace talagen {

struct TimedStroke {
    double onset_sec = 0.0;
    StrokeLabel label;

    friend bool operator==(const TimedStroke& a, const TimedStroke& b) {
        return a.onset_sec == b.onset_sec && a.label == b.label;
    }
};

/// Time-ordered strokes. Onsets are non-negative and non-decreasing; no Rest labels.
struct Transcription {
    std::vector<TimedStroke> events;

    std::size_t size() const noexcept { return events.size(); }
    bool empty() const noexcept { return events.empty(); }
    StrokeSequence labels() const;

    friend bool operator==(const Transcription&, const Transcription&) = default;
};

/// Empty when the invariants hold; otherwise a description of the first violation.
std::string check_transcription(const Transcription& t);

/// CSV with header `onset_sec,label`, one stroke per row, six decimals.
std::string write_transcription_csv(const Transcription& t);

/// Throws ParseError naming the 1-based row (header is row 1) on malformed or
/// unsorted input.
Transcription read_transcription_csv(std::string_view text);

Transcription load_transcription(const std::filesystem::path& path);
void save_transcription(const Transcription& t, const std::filesystem::path& path);

}  // namespace talagen
