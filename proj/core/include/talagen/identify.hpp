#pragma once

// Tala identification from a stroke sequence: sliding-window NW matching
// score and stroke-ratio cosine score.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "talagen/alignment.hpp"
#include "talagen/rhythm.hpp"
#include "talagen/transcription.hpp"

namespace talagen {

struct NwMatch {
    double sigma_nw = 0.0;    // mean of the per-group maximum window scores
    double sigma_norm = 0.0;  // sigma_nw / m, in [-1, 1]
    std::size_t groups = 0;
};

/// Windows y[t, t+m) for t = 0..n-m are scored against x_ref and grouped by
/// floor(t / m); the group maxima are averaged. When n < 2m the first group
/// also considers every cyclic rotation of x_ref against y[0, m).
/// Throws NeedMoreStrokes when n < m.
NwMatch nw_matching_score(std::span<const StrokeLabel> y, const TalaDefinition& tala, const NwParams& params = {});

/// Counts of each vocabulary stroke in y, followed by the count of strokes
/// outside the vocabulary. Rests are ignored. Throws on an empty sequence.
std::vector<double> stroke_ratio_vector(std::span<const StrokeLabel> y, const TalaDefinition& tala);

/// The tala's ratio with a trailing 0 for the out-of-vocabulary slot.
std::vector<double> extended_ratio(const TalaDefinition& tala);

/// Cosine similarity R.T / (|R| |T|). Throws on length mismatch, negative
/// entries or a zero-norm vector.
double stroke_ratio_score(std::span<const double> reference, std::span<const double> test);

enum class IdentifyMethod { Nw, Ratio, Both };

std::string_view to_string(IdentifyMethod method);
std::optional<IdentifyMethod> parse_identify_method(std::string_view text);

struct CandidateScore {
    std::string name;
    std::size_t m = 0;
    bool nw_eligible = false;  // n >= m
    double sigma_nw = 0.0;
    double sigma_norm = 0.0;
    double ratio_score = 0.0;
};

struct IdentificationResult {
    IdentifyMethod method = IdentifyMethod::Both;
    std::vector<CandidateScore> candidates;  // input order
    std::vector<std::size_t> ranking;        // indices into candidates, best first
    double elapsed_ms = 0.0;

    const CandidateScore& best() const { return candidates.at(ranking.front()); }
};

/// Ranks candidates by sigma_norm (Nw), ratio score (Ratio), or sigma_norm
/// with the ratio score deciding near-ties below 1e-6 (Both). Candidates too
/// long for the NW score rank after the eligible ones; remaining ties keep
/// candidate order.
IdentificationResult identify_tala(const Transcription& y, const std::vector<TalaDefinition>& candidates,
                                   IdentifyMethod method, const NwParams& params = {});

struct LabeledTranscription {
    Transcription transcription;
    std::string tala;
};

struct IdentificationReport {
    std::size_t items = 0;
    std::size_t correct = 0;
    double accuracy_pct = 0.0;
    double mean_elapsed_ms = 0.0;
};

/// Rank-1 accuracy over a labeled corpus. An item whose scoring fails counts
/// as incorrect.
IdentificationReport evaluate_identification(const std::vector<LabeledTranscription>& corpus,
                                             const std::vector<TalaDefinition>& candidates, IdentifyMethod method,
                                             const NwParams& params = {});

}  // namespace talagen
