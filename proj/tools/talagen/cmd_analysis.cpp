#include <chrono>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "commands.hpp"
#include "common.hpp"
#include "talagen/classify.hpp"
#include "talagen/error.hpp"
#include "talagen/identify.hpp"
#include "talagen/onsets.hpp"
#include "talagen/synthetic.hpp"
#include "talagen/transcription.hpp"
#include "talagen/wav.hpp"

namespace talagen::cli {

using nlohmann::json;

int run_transcribe(const TranscribeOptions& o) {
    const auto audio = read_wav(o.input);
    const auto bank = load_bank(o.bank, audio.sample_rate, builtin_talas());
    const auto templates = build_templates(bank_clips(*bank));
    OnsetConfig onset;
    onset.threshold = o.threshold;
    onset.min_gap_sec = o.min_gap;
    const auto onsets = audio.samples.empty() ? std::vector<double>{} : detect_onsets(audio, onset);
    const auto t = classify_segments(audio, onsets, templates);
    write_text(o.out, write_transcription_csv(t));
    if (!o.out.empty() && o.out != "-") {
        std::cerr << "wrote " << t.size() << " strokes to " << o.out << "\n";
    }
    return 0;
}

int run_identify(const IdentifyOptions& o) {
    const auto method = parse_identify_method(o.method);
    if (!method) {
        throw Error("--method must be nw, ratio or both");
    }
    if (o.format != "text" && o.format != "json") {
        throw Error("--format must be text or json");
    }
    const auto talas = load_talas(o.talas);
    const auto y = load_transcription(o.input);
    const auto result = identify_tala(y, talas, *method);

    if (o.format == "json") {
        json candidates = json::array();
        for (const auto& c : result.candidates) {
            candidates.push_back({{"name", c.name},
                                  {"m", c.m},
                                  {"nw_eligible", c.nw_eligible},
                                  {"sigma_nw", c.sigma_nw},
                                  {"sigma_norm", c.sigma_norm},
                                  {"ratio_score", c.ratio_score}});
        }
        json ranking = json::array();
        for (auto k : result.ranking) {
            ranking.push_back(result.candidates[k].name);
        }
        const json doc{{"method", std::string(to_string(result.method))},
                       {"strokes", y.size()},
                       {"candidates", candidates},
                       {"ranking", ranking},
                       {"best", result.best().name},
                       {"elapsed_ms", result.elapsed_ms}};
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    std::ostringstream out;
    out << std::fixed;
    out << "method: " << to_string(result.method) << ", " << y.size() << " strokes\n";
    out << std::left << std::setw(6) << "rank" << std::setw(14) << "tala" << std::right << std::setw(5) << "m"
        << std::setw(12) << "sigma_nw" << std::setw(12) << "sigma_norm" << std::setw(12) << "ratio" << "\n";
    for (std::size_t r = 0; r < result.ranking.size(); ++r) {
        const auto& c = result.candidates[result.ranking[r]];
        out << std::left << std::setw(6) << r + 1 << std::setw(14) << c.name << std::right << std::setw(5) << c.m;
        if (c.nw_eligible && result.method != IdentifyMethod::Ratio) {
            out << std::setprecision(3) << std::setw(12) << c.sigma_nw << std::setprecision(4) << std::setw(12)
                << c.sigma_norm;
        } else {
            out << std::setw(12) << "-" << std::setw(12) << "-";
        }
        if (result.method != IdentifyMethod::Nw) {
            out << std::setprecision(4) << std::setw(12) << c.ratio_score;
        } else {
            out << std::setw(12) << "-";
        }
        out << "\n";
    }
    out << "rank-1: " << result.best().name << "\n";
    out << std::setprecision(3) << "Time (ms): " << result.elapsed_ms << "\n";
    std::cout << out.str();
    return 0;
}

int run_evaluate(const EvaluateOptions& o) {
    const auto talas = load_talas(o.talas);
    SyntheticOptions opts;
    opts.cycles = o.cycles;
    opts.substitution_rate = o.substitution;
    const auto corpus = synthetic_corpus(talas, o.per_tala, opts, o.seed);
    json rows = json::array();
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << corpus.size() << " synthetic transcriptions, " << o.substitution * 100.0 << "% substituted strokes\n";
    out << std::left << std::setw(10) << "Method" << std::right << std::setw(14) << "Accuracy (%)" << std::setw(12)
        << "Time (ms)" << "\n";
    for (auto method : {IdentifyMethod::Nw, IdentifyMethod::Ratio, IdentifyMethod::Both}) {
        const auto r = evaluate_identification(corpus, talas, method);
        out << std::left << std::setw(10) << to_string(method) << std::right << std::setw(14) << r.accuracy_pct
            << std::setprecision(3) << std::setw(12) << r.mean_elapsed_ms << std::setprecision(2) << "\n";
        rows.push_back({{"method", std::string(to_string(method))},
                        {"items", r.items},
                        {"accuracy_pct", r.accuracy_pct},
                        {"mean_elapsed_ms", r.mean_elapsed_ms}});
    }
    if (o.format == "json") {
        std::cout << rows.dump(2) << "\n";
    } else {
        std::cout << out.str();
    }
    return 0;
}

}  // namespace talagen::cli
