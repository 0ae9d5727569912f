#include "talagen/synthetic.hpp"

#include <memory>
#include <random>

#include "talagen/error.hpp"
#include "talagen/machine.hpp"
#include "talagen/sample_bank.hpp"
#include "talagen/wfst.hpp"

namespace talagen {

Transcription synthesize_transcription(const TalaDefinition& tala, const SyntheticOptions& options, std::uint64_t seed) {
    if (options.cycles == 0) {
        throw ValidationError("synthetic transcription needs at least one cycle");
    }
    if (!(options.substitution_rate >= 0.0 && options.substitution_rate <= 1.0)) {
        throw ValidationError("substitution rate must lie in [0, 1]");
    }
    if (!(options.min_bpm > 0.0 && options.min_bpm <= options.max_bpm) || !(options.max_start_sec >= 0.0)) {
        throw ValidationError("invalid synthetic tempo or start range");
    }
    std::vector<StrokeLabel> pool = options.substitution_pool;
    if (pool.empty()) {
        pool = all_stroke_labels(builtin_talas());
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double bpm = options.min_bpm + (options.max_bpm - options.min_bpm) * unit(rng);
    const double start = options.max_start_sec * unit(rng);
    const double beat_sec = 60.0 / bpm;

    const std::vector<TalaDefinition> talas{tala};
    auto built = build_machine(default_layout(tala, options.cycles, options.with_filler), talas);
    SequenceStream stream(std::make_shared<const Wfst>(std::move(built.machine)), seed, built.cycle_beats);

    Transcription out;
    const std::size_t total_beats = options.cycles * tala.beats();
    for (std::size_t i = 0; i < total_beats; ++i) {
        const Beat* beat = stream.next_beat();
        if (beat == nullptr) {
            break;
        }
        for (std::size_t j = 0; j < beat->size(); ++j) {
            const StrokeLabel& label = beat->events[j];
            if (label.is_rest()) {
                continue;
            }
            StrokeLabel emitted = label;
            if (options.substitution_rate > 0.0 && unit(rng) < options.substitution_rate) {
                std::vector<const StrokeLabel*> others;
                for (const auto& p : pool) {
                    if (!(p == label) && !p.is_rest()) {
                        others.push_back(&p);
                    }
                }
                if (!others.empty()) {
                    std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
                    emitted = *others[pick(rng)];
                }
            }
            const double t = start + (static_cast<double>(i) + static_cast<double>(j) / beat->size()) * beat_sec;
            out.events.push_back({t, std::move(emitted)});
        }
    }
    return out;
}

std::vector<LabeledTranscription> synthetic_corpus(const std::vector<TalaDefinition>& talas, std::size_t per_tala,
                                                   const SyntheticOptions& options, std::uint64_t seed) {
    std::vector<LabeledTranscription> corpus;
    std::uint64_t k = 0;
    for (const auto& tala : talas) {
        for (std::size_t r = 0; r < per_tala; ++r, ++k) {
            corpus.push_back({synthesize_transcription(tala, options, seed + k), tala.name});
        }
    }
    return corpus;
}

}  // namespace talagen
