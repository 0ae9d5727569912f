#include "talagen/identify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "talagen/error.hpp"

namespace talagen {

namespace {

// Maps stroke names to small integers so alignment compares ints.
class Interner {
public:
    int id(const StrokeLabel& s) {
        auto [it, inserted] = ids_.try_emplace(s.name, static_cast<int>(ids_.size()));
        return it->second;
    }
    std::vector<int> encode(std::span<const StrokeLabel> seq) {
        std::vector<int> out;
        out.reserve(seq.size());
        for (const auto& s : seq) {
            out.push_back(id(s));
        }
        return out;
    }

private:
    std::unordered_map<std::string, int> ids_;
};

constexpr double kTieEpsilon = 1e-6;

NwMatch match_encoded(std::span<const int> y, std::span<const int> ref, const NwParams& params) {
    const std::size_t n = y.size(), m = ref.size();
    if (n < m) {
        throw NeedMoreStrokes(m - n);
    }
    const std::size_t groups = (n - m) / m + 1;
    std::vector<int> best(groups, 0);
    std::vector<bool> seen(groups, false);
    for (std::size_t t = 0; t + m <= n; ++t) {
        const int s = nw_score(ref, y.subspan(t, m), params);
        const std::size_t g = t / m;
        if (!seen[g] || s > best[g]) {
            best[g] = s;
            seen[g] = true;
        }
    }
    if (n < 2 * m) {
        std::vector<int> rotated(ref.begin(), ref.end());
        for (std::size_t r = 1; r < m; ++r) {
            std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
            best[0] = std::max(best[0], nw_score(std::span<const int>(rotated), y.first(m), params));
        }
    }
    NwMatch out;
    out.groups = groups;
    out.sigma_nw = static_cast<double>(std::accumulate(best.begin(), best.end(), 0L)) / static_cast<double>(groups);
    out.sigma_norm = out.sigma_nw / static_cast<double>(m);
    return out;
}

}  // namespace

NwMatch nw_matching_score(std::span<const StrokeLabel> y, const TalaDefinition& tala, const NwParams& params) {
    detail::require_valid(params);
    if (tala.x_ref.empty()) {
        throw Error("tala " + tala.name + " has an empty reference sequence");
    }
    Interner interner;
    const auto ref = interner.encode(tala.x_ref);
    const auto seq = interner.encode(y);
    return match_encoded(seq, ref, params);
}

std::vector<double> stroke_ratio_vector(std::span<const StrokeLabel> y, const TalaDefinition& tala) {
    if (y.empty()) {
        throw Error("stroke_ratio_vector: empty sequence");
    }
    std::vector<double> counts(tala.vocabulary.size() + 1, 0.0);
    for (const auto& s : y) {
        if (s.is_rest()) {
            continue;
        }
        auto it = std::find(tala.vocabulary.begin(), tala.vocabulary.end(), s);
        counts[static_cast<std::size_t>(it - tala.vocabulary.begin())] += 1.0;
    }
    return counts;
}

std::vector<double> extended_ratio(const TalaDefinition& tala) {
    std::vector<double> r(tala.ratio.begin(), tala.ratio.end());
    r.push_back(0.0);
    return r;
}

double stroke_ratio_score(std::span<const double> reference, std::span<const double> test) {
    if (reference.size() != test.size()) {
        throw Error("stroke_ratio_score: vectors differ in length");
    }
    double rmax = 0.0, tmax = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        if (!(reference[i] >= 0.0) || !(test[i] >= 0.0) || !std::isfinite(reference[i]) || !std::isfinite(test[i])) {
            throw Error("stroke_ratio_score: negative or non-finite count");
        }
        rmax = std::max(rmax, reference[i]);
        tmax = std::max(tmax, test[i]);
    }
    if (!(rmax > 0.0) || !(tmax > 0.0)) {
        throw Error("stroke_ratio_score: zero-norm vector");
    }
    // Dividing by the largest entry first makes c*T and T identical whenever
    // c*T is exactly representable, so integer rescaling cannot move the score.
    double dot = 0.0, rr = 0.0, tt = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double r = reference[i] / rmax;
        const double t = test[i] / tmax;
        dot += r * t;
        rr += r * r;
        tt += t * t;
    }
    return std::min(1.0, dot / std::sqrt(rr * tt));
}

std::string_view to_string(IdentifyMethod method) {
    switch (method) {
        case IdentifyMethod::Nw: return "nw";
        case IdentifyMethod::Ratio: return "ratio";
        case IdentifyMethod::Both: return "both";
    }
    return "both";
}

std::optional<IdentifyMethod> parse_identify_method(std::string_view text) {
    for (auto m : {IdentifyMethod::Nw, IdentifyMethod::Ratio, IdentifyMethod::Both}) {
        if (to_string(m) == text) {
            return m;
        }
    }
    return std::nullopt;
}

IdentificationResult identify_tala(const Transcription& y, const std::vector<TalaDefinition>& candidates,
                                   IdentifyMethod method, const NwParams& params) {
    detail::require_valid(params);
    if (y.empty()) {
        throw Error("identify_tala: empty transcription");
    }
    if (candidates.empty()) {
        throw Error("identify_tala: no candidate talas");
    }
    const auto start = std::chrono::steady_clock::now();

    const auto labels = y.labels();
    Interner interner;
    const auto seq = interner.encode(labels);

    IdentificationResult result;
    result.method = method;
    bool any_eligible = false;
    for (const auto& tala : candidates) {
        CandidateScore c;
        c.name = tala.name;
        c.m = tala.x_ref.size();
        c.nw_eligible = c.m > 0 && labels.size() >= c.m;
        if (method != IdentifyMethod::Ratio && c.nw_eligible) {
            const auto match = match_encoded(seq, interner.encode(tala.x_ref), params);
            c.sigma_nw = match.sigma_nw;
            c.sigma_norm = match.sigma_norm;
        }
        if (method != IdentifyMethod::Nw) {
            const auto t = stroke_ratio_vector(labels, tala);
            c.ratio_score = stroke_ratio_score(extended_ratio(tala), t);
        }
        any_eligible = any_eligible || c.nw_eligible;
        result.candidates.push_back(std::move(c));
    }
    if (method != IdentifyMethod::Ratio && !any_eligible) {
        std::size_t shortest = candidates.front().x_ref.size();
        for (const auto& t : candidates) {
            shortest = std::min(shortest, t.x_ref.size());
        }
        throw NeedMoreStrokes(shortest - labels.size());
    }

    auto& rank = result.ranking;
    rank.resize(candidates.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    const auto& cs = result.candidates;
    if (method == IdentifyMethod::Ratio) {
        std::stable_sort(rank.begin(), rank.end(),
                         [&](std::size_t a, std::size_t b) { return cs[a].ratio_score > cs[b].ratio_score; });
    } else {
        std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
            if (cs[a].nw_eligible != cs[b].nw_eligible) {
                return cs[a].nw_eligible;
            }
            return cs[a].sigma_norm > cs[b].sigma_norm;
        });
        if (method == IdentifyMethod::Both) {
            // Runs of near-equal sigma_norm are re-ordered by ratio score.
            std::size_t begin = 0;
            while (begin < rank.size()) {
                std::size_t end = begin + 1;
                while (end < rank.size() && cs[rank[end]].nw_eligible == cs[rank[begin]].nw_eligible &&
                       std::abs(cs[rank[end]].sigma_norm - cs[rank[end - 1]].sigma_norm) < kTieEpsilon) {
                    ++end;
                }
                std::stable_sort(rank.begin() + static_cast<std::ptrdiff_t>(begin),
                                 rank.begin() + static_cast<std::ptrdiff_t>(end),
                                 [&](std::size_t a, std::size_t b) { return cs[a].ratio_score > cs[b].ratio_score; });
                begin = end;
            }
        }
    }

    result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

IdentificationReport evaluate_identification(const std::vector<LabeledTranscription>& corpus,
                                             const std::vector<TalaDefinition>& candidates, IdentifyMethod method,
                                             const NwParams& params) {
    if (candidates.empty()) {
        throw Error("evaluate_identification: no candidate talas");
    }
    if (corpus.empty()) {
        throw Error("evaluate_identification: empty corpus");
    }
    IdentificationReport report;
    double total_ms = 0.0;
    for (const auto& item : corpus) {
        ++report.items;
        try {
            const auto r = identify_tala(item.transcription, candidates, method, params);
            total_ms += r.elapsed_ms;
            if (r.best().name == item.tala) {
                ++report.correct;
            }
        } catch (const Error&) {
        }
    }
    report.accuracy_pct = 100.0 * static_cast<double>(report.correct) / static_cast<double>(report.items);
    report.mean_elapsed_ms = total_ms / static_cast<double>(report.items);
    return report;
}

}  // namespace talagen
