// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "talagen/alignment.hpp"
#include "talagen/classify.hpp"
#include "talagen/evaluation.hpp"
#include "talagen/identify.hpp"
#include "talagen/machine.hpp"
#include "talagen/onsets.hpp"
#include "talagen/render.hpp"
#include "talagen/sample_bank.hpp"
#include "talagen/streaming.hpp"
#include "talagen/synthetic.hpp"
#include "talagen/tempo.hpp"
#include "talagen/wfst.hpp"

using namespace talagen;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) {
                detail << "; ";
            }
            pass = false;
            detail << "failed: " << what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<TalaDefinition> identification_talas() {
    std::vector<TalaDefinition> out;
    for (const char* name : {"tintal", "ektal", "jhaptal", "rupak"}) {
        out.push_back(*find_tala(builtin_talas(), name));
    }
    return out;
}

// 1. NW score against exhaustive enumeration of alignments.
void nw_oracle(Outcome& o) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> len(1, 8), sym(0, 3);
    std::size_t mismatches = 0;
    const std::size_t pairs = 1000;
    for (std::size_t k = 0; k < pairs; ++k) {
        std::vector<int> x(static_cast<std::size_t>(len(rng))), y(static_cast<std::size_t>(len(rng)));
        for (auto& v : x) v = sym(rng);
        for (auto& v : y) v = sym(rng);
        if (nw_score(x, y) != oracle::brute_force_alignment(x, y)) {
            ++mismatches;
        }
    }
    const double elapsed = seconds_since(t0);
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.require(elapsed < 10.0, "runtime over 10 s");
    o.detail << (o.pass ? "" : "; ") << pairs << " random pairs (lengths 1..8, 4 symbols), " << mismatches
             << " mismatches, " << elapsed << " s";
}

// 2. Scoring parameters and the normalized matching score on clean cycles.
void nw_parameters(Outcome& o) {
    using S = std::vector<StrokeLabel>;
    o.require(nw_score(S{"Dha", "Dhin", "Dhin", "Dha"}, S{"Dha", "Dhin", "Dhin", "Dha"}) == 4, "identical -> 4");
    o.require(nw_score(S{"Dha", "Dhin"}, S{"Tin", "Ta"}) == -2, "(Dha,Dhin)/(Tin,Ta) -> -2");
    o.require(nw_score(S{"Dha", "Dhin", "Dha"}, S{"Dha", "Dha"}) == 0, "(Dha,Dhin,Dha)/(Dha,Dha) -> 0");
    std::size_t checked = 0;
    for (const auto& tala : builtin_talas()) {
        for (std::size_t r : {1u, 2u, 4u}) {
            const auto y = oracle::repeat(tala.x_ref, r);
            const auto match = nw_matching_score(y, tala);
            o.require(match.sigma_norm == 1.0, tala.name + " x" + std::to_string(r) + " sigma_norm != 1");
            ++checked;
        }
    }
    o.detail << (o.pass ? "" : "; ") << "3 examples, sigma_norm = 1 exactly for " << checked << " (tala, r) cases";
}

// 3. Stroke ratio cosine.
void ratio_score(Outcome& o) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> value(0.0, 10.0);
    std::uniform_int_distribution<int> count(0, 20), scale(2, 1000);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> a(5), b(5);
        for (auto& v : a) v = value(rng);
        for (auto& v : b) v = value(rng);
        worst = std::max(worst, std::abs(stroke_ratio_score(a, b) - oracle::direct_cosine(a, b)));
    }
    o.require(worst <= 1e-9, "cosine deviates from oracle");
    std::size_t exact = 0;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> r(5), t(5);
        for (auto& v : r) v = count(rng);
        for (auto& v : t) v = count(rng);
        r[0] += 1;
        t[1] += 1;
        const double c = scale(rng);
        std::vector<double> ct(t);
        for (auto& v : ct) v *= c;
        if (stroke_ratio_score(r, ct) == stroke_ratio_score(r, t)) {
            ++exact;
        }
    }
    o.require(exact == 100, "integer scaling changed the score");
    const std::vector<double> R{3, 3, 1, 1, 0}, T{1, 0, 0, 0, 0};
    const double example = stroke_ratio_score(R, T);
    o.require(std::abs(example - 3.0 / std::sqrt(20.0)) <= 1e-9, "3/sqrt(20) example");
    o.detail << (o.pass ? "" : "; ") << "max |cos - oracle| = " << worst << " over 100 vectors, " << exact
             << "/100 integer scalings exact, example = " << example;
}

// 4. Identification round trip on sequencer-generated transcriptions.
void identification(Outcome& o) {
    const auto talas = identification_talas();
    const auto& candidates = builtin_talas();
    SyntheticOptions clean;
    clean.cycles = 4;
    const auto corpus = synthetic_corpus(talas, 10, clean, 1000);
    const auto nw = evaluate_identification(corpus, candidates, IdentifyMethod::Nw);
    const auto both = evaluate_identification(corpus, candidates, IdentifyMethod::Both);
    o.require(corpus.size() == 40, "corpus size");
    o.require(nw.accuracy_pct == 100.0, "clean nw accuracy below 100");
    o.require(both.accuracy_pct == 100.0, "clean both accuracy below 100");

    SyntheticOptions noisy = clean;
    noisy.substitution_rate = 0.10;
    std::size_t items = 0, correct_nw = 0, correct_both = 0;
    double worst_seed = 100.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto noisy_corpus = synthetic_corpus(talas, 10, noisy, 50000 + 100 * seed);
        const auto r_nw = evaluate_identification(noisy_corpus, candidates, IdentifyMethod::Nw);
        const auto r_both = evaluate_identification(noisy_corpus, candidates, IdentifyMethod::Both);
        items += r_nw.items;
        correct_nw += r_nw.correct;
        correct_both += r_both.correct;
        worst_seed = std::min(worst_seed, r_nw.accuracy_pct);
    }
    const double acc_nw = 100.0 * static_cast<double>(correct_nw) / static_cast<double>(items);
    const double acc_both = 100.0 * static_cast<double>(correct_both) / static_cast<double>(items);
    o.require(acc_nw >= 90.0, "noisy nw accuracy below 90");
    o.require(acc_both >= 90.0, "noisy both accuracy below 90");

    // Two minutes at the fastest supported tempo, one stroke per beat or more.
    double worst_ms = 0.0;
    SyntheticOptions long_form;
    long_form.min_bpm = long_form.max_bpm = 350.0;
    for (const auto& tala : talas) {
        long_form.cycles = (700 + tala.beats() - 1) / tala.beats();
        const auto y = synthesize_transcription(tala, long_form, 7);
        for (int rep = 0; rep < 3; ++rep) {
            const auto result = identify_tala(y, candidates, IdentifyMethod::Both);
            worst_ms = std::max(worst_ms, result.elapsed_ms);
            o.require(result.best().name == tala.name, "long " + tala.name + " misidentified");
        }
    }
    o.require(worst_ms <= 100.0, "scoring slower than 100 ms");
    o.detail << (o.pass ? "" : "; ") << "clean: nw " << nw.accuracy_pct << "%, both " << both.accuracy_pct
             << "% on 40 items; 10% substitution over 20 seeds (" << items << " items): nw " << acc_nw
             << "% (worst seed " << worst_seed << "%), both " << acc_both << "%; 2-minute scoring max "
             << worst_ms << " ms";
}

// 5. Onset grid: rendered impulses land exactly on the computed sample indices.
void onset_grid(Outcome& o) {
    std::size_t strokes = 0;
    for (int fs : {44100, 48000}) {
        for (int bpm : {10, 60, 120, 350}) {
            for (const auto& tala : builtin_talas()) {
                const auto bank = oracle::impulse_bank(fs, all_stroke_labels(builtin_talas()));
                auto built = build_machine(default_layout(tala, 1, true), builtin_talas());
                SequenceStream stream(std::make_shared<const Wfst>(std::move(built.machine)), 3, built.cycle_beats);
                std::vector<Beat> beats;
                for (std::size_t i = 0; i < tala.beats(); ++i) {
                    beats.push_back(*stream.next_beat());
                }
                const RenderState state{0, static_cast<double>(bpm), fs};
                const auto schedule = schedule_beats(beats, state);
                const auto length = static_cast<std::size_t>(onset_sample_index(state, beats.size(), 0, 1));
                const auto audio = render(schedule, bank, length);
                std::vector<std::int64_t> rendered, expected;
                for (std::size_t n = 0; n < audio.size(); ++n) {
                    if (audio[n] != 0.0f) {
                        rendered.push_back(static_cast<std::int64_t>(n));
                    }
                }
                for (std::size_t i = 0; i < beats.size(); ++i) {
                    const auto size = static_cast<std::int64_t>(beats[i].size());
                    for (std::int64_t j = 0; j < size; ++j) {
                        if (beats[i].events[static_cast<std::size_t>(j)].is_rest()) {
                            continue;
                        }
                        const auto n = onset_sample_index(state, i, static_cast<std::size_t>(j), beats[i].size());
                        const auto ref = oracle::grid_onset(0, static_cast<std::int64_t>(i), j, size, bpm, 1, fs);
                        o.require(n == ref, "onset_sample_index differs from the integer oracle");
                        expected.push_back(ref);
                    }
                }
                strokes += expected.size();
                if (rendered != expected) {
                    o.require(false, tala.name + " at " + std::to_string(bpm) + " BPM / " + std::to_string(fs) + " Hz");
                }
            }
        }
    }
    o.detail << (o.pass ? "" : "; ") << strokes << " strokes over 8 (BPM, Fs) pairs and 5 talas, sample-exact";
}

double max_abs(const std::vector<float>& v) {
    double m = 0.0;
    for (float s : v) m = std::max(m, static_cast<double>(std::abs(s)));
    return m;
}

// 6. Linearity, shift equivariance, and streaming versus offline.
void superposition(Outcome& o) {
    const int fs = 44100;
    const auto bank = synthetic_bank(fs);
    const auto labels = bank.labels();
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::int64_t> at(0, fs * 4);
    std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
    auto random_schedule = [&](std::size_t count) {
        std::vector<ScheduledStroke> s;
        for (std::size_t k = 0; k < count; ++k) s.push_back({at(rng), labels[pick(rng)]});
        return s;
    };
    const std::size_t length = static_cast<std::size_t>(fs) * 5;
    double worst_linear = 0.0, worst_shift = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = random_schedule(30), b = random_schedule(30);
        std::vector<ScheduledStroke> ab(a);
        ab.insert(ab.end(), b.begin(), b.end());
        const auto xa = render(a, bank, length), xb = render(b, bank, length), xab = render(ab, bank, length);
        const double scale = std::max(1e-30, max_abs(xab));
        for (std::size_t n = 0; n < length; ++n) {
            worst_linear = std::max(worst_linear, std::abs(static_cast<double>(xab[n]) - xa[n] - xb[n]) / scale);
        }
        const std::int64_t d = at(rng) % 20000 + 1;
        std::vector<ScheduledStroke> shifted(a);
        for (auto& s : shifted) s.sample_index += d;
        const auto xs = render(shifted, bank, length + static_cast<std::size_t>(d));
        const double sa = std::max(1e-30, max_abs(xa));
        for (std::size_t n = 0; n < length; ++n) {
            worst_shift = std::max(worst_shift, std::abs(static_cast<double>(xs[n + static_cast<std::size_t>(d)]) - xa[n]) / sa);
        }
    }
    o.require(worst_linear <= 1e-6, "superposition error above 1e-6");
    o.require(worst_shift <= 1e-6, "shift error above 1e-6");

    auto shared_bank = std::make_shared<const StrokeSampleBank>(bank);
    std::size_t identical = 0;
    for (std::uint64_t trajectory = 0; trajectory < 5; ++trajectory) {
        std::mt19937_64 trng(900 + trajectory);
        std::uniform_real_distribution<double> tempo(10.0, 350.0);
        std::uniform_int_distribution<int> block_pick(0, 3), coin(0, 9);
        const std::size_t blocks[] = {64, 256, 1000, 4096};
        const auto& tala = builtin_talas()[trajectory % builtin_talas().size()];
        const PulseFill pulse{trajectory % 2 == 0, 40.0, 0.25f};
        const double start_bpm = std::round(tempo(trng));
        auto make_stream = [&] {
            auto built = build_machine(default_layout(tala, 4, true), builtin_talas());
            return std::make_unique<SequenceStream>(std::make_shared<const Wfst>(std::move(built.machine)), trajectory,
                                                    built.cycle_beats);
        };
        StreamingRenderer live(make_stream(), shared_bank, RenderState{0, start_bpm, fs}, pulse);
        std::vector<float> streamed;
        std::vector<TempoChange> changes;
        std::size_t beats_started = 0;
        double last_bpm = start_bpm;
        while (streamed.size() < static_cast<std::size_t>(fs) * 30) {
            if (coin(trng) == 0) {
                const double bpm = coin(trng) < 5 ? std::round(tempo(trng)) : tempo(trng);
                live.set_bpm(bpm);
            }
            std::vector<float> block(blocks[block_pick(trng)]);
            const auto status = live.render_block(block);
            for (const auto& mark : status.beats()) {
                if (mark.bpm != last_bpm) {
                    changes.push_back({mark.beat_index, mark.bpm});
                    last_bpm = mark.bpm;
                }
            }
            beats_started += status.mark_count;
            streamed.insert(streamed.end(), block.begin(), block.end());
        }
        auto offline_stream = make_stream();
        std::vector<Beat> beats;
        for (std::size_t i = 0; i < beats_started; ++i) beats.push_back(*offline_stream->next_beat());
        const auto schedule = schedule_beats(beats, RenderState{0, start_bpm, fs}, changes, pulse);
        const auto offline = render(schedule, bank, streamed.size(), pulse);
        if (offline.size() == streamed.size() &&
            std::memcmp(offline.data(), streamed.data(), streamed.size() * sizeof(float)) == 0 && !changes.empty()) {
            ++identical;
        }
    }
    o.require(identical == 5, "streaming output differs from offline render");
    o.detail << (o.pass ? "" : "; ") << "max superposition error " << worst_linear << ", max shift error "
             << worst_shift << " (relative), " << identical << "/5 tempo trajectories byte-identical";
}

// 7. Render, transcribe, evaluate, identify.
void audio_round_trip(Outcome& o) {
    const auto& tala = *find_tala(builtin_talas(), "tintal");
    const auto bank = synthetic_bank(44100);
    RenderReport report;
    const auto audio = render_tala(tala, 120.0, 60.0, bank, RenderOptions{}, &report);
    Transcription truth;
    for (const auto& s : report.schedule) {
        if (s.sample_index < static_cast<std::int64_t>(audio.size())) {
            truth.events.push_back({static_cast<double>(s.sample_index) / 44100.0, s.label});
        }
    }
    const Waveform wave{44100, audio};
    const auto onsets = detect_onsets(wave);
    const auto templates = build_templates(bank_clips(bank));
    const auto predicted = classify_segments(wave, onsets, templates);
    const auto eval = eval_onsets(predicted, truth, 0.050);
    const auto id = identify_tala(predicted, builtin_talas(), IdentifyMethod::Both);
    o.require(eval.average_f1 >= 0.95, "average f1 below 0.95");
    o.require(id.best().name == "tintal", "identified as " + id.best().name);
    o.detail << (o.pass ? "" : "; ") << truth.size() << " reference strokes, " << onsets.size()
             << " detected onsets, average f1 " << eval.average_f1 << ", identified " << id.best().name;
}

// 8. Tap tempo.
void tap_tempo(Outcome& o) {
    auto estimate = [](std::initializer_list<double> taps) {
        TapHistory h;
        for (double t : taps) h.add(t);
        return estimate_bpm(h);
    };
    const auto a = estimate({0.0, 0.5, 1.0});
    const auto b = estimate({0.0, 0.4});
    const auto c = estimate({0.0, 5.0, 15.0});
    o.require(a && *a == 120.0, "[0, 0.5, 1.0] -> 120");
    o.require(!b, "[0, 0.4] -> insufficient");
    o.require(c && *c == 10.0, "[0, 5, 15] -> 10");
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> log_gap(std::log(0.01), std::log(30.0));
    std::uniform_int_distribution<int> count(3, 24);
    std::size_t bad = 0;
    for (int k = 0; k < 1000; ++k) {
        TapHistory h;
        double t = 0.0, last_gap = 0.0;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) {
            if (i > 0) {
                last_gap = std::exp(log_gap(rng));
                t += last_gap;
            }
            h.add(t);
        }
        const auto bpm = estimate_bpm(h);
        const double expected = std::clamp(60.0 / last_gap, 10.0, 350.0);
        if (!bpm || *bpm < 10.0 || *bpm > 350.0 || std::abs(*bpm - expected) > 1e-9 * expected) {
            ++bad;
        }
    }
    o.require(bad == 0, std::to_string(bad) + " random sequences out of range");
    o.detail << (o.pass ? "" : "; ") << "3 examples exact, 1000 random tap sequences within [10, 350]";
}

// 9. Transducer construction, closure periodicity, filler placement.
void fst_suite(Outcome& o) {
    for (const auto& tala : builtin_talas()) {
        const std::size_t n = tala.beats();
        const auto single = beat_cycle_fst(tala.theka);
        bool path_ok = single.num_states() == n + 1 && single.transitions().size() == n &&
                       single.finals() == std::vector<StateId>{n} && single.check().empty();
        for (std::size_t i = 0; path_ok && i < n; ++i) {
            const auto& tr = single.transitions()[single.outgoing(i)[0]];
            path_ok = single.outgoing(i).size() == 1 && !tr.input && tr.output && *tr.output == tala.theka.beats[i] &&
                      tr.probability == 1.0 && tr.dst == i + 1;
        }
        o.require(path_ok, tala.name + " single path");

        SequenceStream periodic(std::make_shared<const Wfst>(closure(single)), 11, n);
        bool period_ok = true;
        for (std::size_t k = 0; k < 5 * n; ++k) {
            const Beat* beat = periodic.next_beat();
            period_ok = period_ok && beat != nullptr && *beat == tala.theka.beats[k % n];
        }
        o.require(period_ok, tala.name + " closure periodicity");

        SequenceStream calls(std::make_shared<const Wfst>(call_cycle_fst(tala, 4, true)), 5, n);
        std::size_t fillers = 0;
        bool filler_ok = true;
        for (std::size_t k = 0; k < 5 * 4 * n; ++k) {
            const Beat* beat = calls.next_beat();
            const bool at_filler = k % (4 * n) == 4 * n - 1;
            if (beat == nullptr) {
                filler_ok = false;
                break;
            }
            if (at_filler) {
                filler_ok = filler_ok && *beat == *tala.filler;
                ++fillers;
            } else {
                filler_ok = filler_ok && *beat == tala.theka.beats[k % n];
            }
        }
        o.require(filler_ok && fillers == 5, tala.name + " filler placement");
    }
    o.detail << (o.pass ? "" : "; ") << "5 talas: single path, 5 closure periods, one filler at 4N-1 in each of 5 call cycles";
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"nw-oracle-equivalence", nw_oracle},
        {"nw-parameters", nw_parameters},
        {"ratio-score", ratio_score},
        {"identification-round-trip", identification},
        {"onset-grid", onset_grid},
        {"render-superposition-streaming", superposition},
        {"audio-round-trip", audio_round_trip},
        {"tap-tempo", tap_tempo},
        {"fst-suite", fst_suite},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures;
}
