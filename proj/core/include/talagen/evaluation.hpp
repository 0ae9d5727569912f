#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "talagen/transcription.hpp"

namespace talagen {

struct ClassScore {
    std::string label;
    std::size_t reference = 0;
    std::size_t predicted = 0;
    std::size_t matched = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct OnsetEvaluation {
    std::vector<ClassScore> classes;  // sorted by label
    double average_f1 = 0.0;          // over classes present in the reference
};

/// Per-class onset f1 with a symmetric tolerance collar. Within each class a
/// maximum one-to-one matching pairs predictions and references at most
/// `collar_sec` apart. An empty reference scores 1 only against an empty prediction.
OnsetEvaluation eval_onsets(const Transcription& predicted, const Transcription& reference, double collar_sec = 0.050);

/// Size of a maximum matching between two sorted time lists under the collar.
std::size_t match_onsets(const std::vector<double>& predicted, const std::vector<double>& reference, double collar_sec);

}  // namespace talagen
