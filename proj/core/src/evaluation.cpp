#include "talagen/evaluation.hpp"

#include <algorithm>
#include <map>

#include "talagen/error.hpp"

namespace talagen {

namespace {

constexpr double kTimeEpsilon = 1e-9;

}  // namespace

std::size_t match_onsets(const std::vector<double>& predicted, const std::vector<double>& reference, double collar_sec) {
    // Every candidate edge spans an interval of the same width, so scanning
    // both sorted lists and matching the earliest compatible pair is optimal.
    const double collar = collar_sec + kTimeEpsilon;
    std::size_t i = 0, j = 0, matched = 0;
    while (i < predicted.size() && j < reference.size()) {
        if (predicted[i] < reference[j] - collar) {
            ++i;
        } else if (predicted[i] > reference[j] + collar) {
            ++j;
        } else {
            ++matched;
            ++i;
            ++j;
        }
    }
    return matched;
}

OnsetEvaluation eval_onsets(const Transcription& predicted, const Transcription& reference, double collar_sec) {
    if (!(collar_sec > 0.0)) {
        throw Error("eval_onsets: collar must be positive");
    }
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_class;
    for (const auto& e : predicted.events) {
        by_class[e.label.name].first.push_back(e.onset_sec);
    }
    for (const auto& e : reference.events) {
        by_class[e.label.name].second.push_back(e.onset_sec);
    }

    OnsetEvaluation out;
    double sum = 0.0;
    std::size_t counted = 0;
    for (auto& [label, times] : by_class) {
        auto& [pred, ref] = times;
        std::sort(pred.begin(), pred.end());
        std::sort(ref.begin(), ref.end());
        ClassScore s;
        s.label = label;
        s.predicted = pred.size();
        s.reference = ref.size();
        s.matched = match_onsets(pred, ref, collar_sec);
        if (s.matched > 0) {
            s.precision = static_cast<double>(s.matched) / static_cast<double>(s.predicted);
            s.recall = static_cast<double>(s.matched) / static_cast<double>(s.reference);
            s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
        }
        if (s.reference > 0) {
            sum += s.f1;
            ++counted;
        }
        out.classes.push_back(std::move(s));
    }
    if (counted > 0) {
        out.average_f1 = sum / static_cast<double>(counted);
    } else {
        out.average_f1 = predicted.empty() ? 1.0 : 0.0;
    }
    return out;
}

}  // namespace talagen
