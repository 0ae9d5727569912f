#pragma once

// Self-generated transcriptions: the call-cycle machine is walked, strokes are
// timed with the onset grid, and an optional fraction of strokes is replaced
// by a different label drawn uniformly from a pool.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "talagen/identify.hpp"
#include "talagen/rhythm.hpp"
#include "talagen/transcription.hpp"

namespace talagen {

struct SyntheticOptions {
    std::size_t cycles = 4;
    bool with_filler = true;
    double substitution_rate = 0.0;
    /// Replacement labels; empty means every built-in stroke.
    std::vector<StrokeLabel> substitution_pool;
    /// Tempo drawn uniformly from [min_bpm, max_bpm].
    double min_bpm = 60.0;
    double max_bpm = 180.0;
    /// First onset drawn uniformly from [0, max_start_sec).
    double max_start_sec = 2.0;
};

/// Deterministic in (tala, options, seed).
Transcription synthesize_transcription(const TalaDefinition& tala, const SyntheticOptions& options, std::uint64_t seed);

/// `per_tala` items for each tala, tala-major. Item k uses seed + k.
std::vector<LabeledTranscription> synthetic_corpus(const std::vector<TalaDefinition>& talas, std::size_t per_tala,
                                                   const SyntheticOptions& options, std::uint64_t seed);

}  // namespace talagen
