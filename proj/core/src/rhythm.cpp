#include "talagen/rhythm.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace talagen {

std::string_view to_string(StrokeCategory category) {
    switch (category) {
        case StrokeCategory::Damped: return "damped";
        case StrokeCategory::ResonantTreble: return "resonant-treble";
        case StrokeCategory::ResonantBass: return "resonant-bass";
        case StrokeCategory::ResonantBoth: return "resonant-both";
    }
    return "damped";
}

std::optional<StrokeCategory> parse_stroke_category(std::string_view text) {
    for (auto c : {StrokeCategory::Damped, StrokeCategory::ResonantTreble, StrokeCategory::ResonantBass,
                   StrokeCategory::ResonantBoth}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    return std::nullopt;
}

bool Beat::is_silent() const noexcept {
    return std::all_of(events.begin(), events.end(), [](const StrokeLabel& s) { return s.is_rest(); });
}

std::string to_string(const Beat& beat) {
    std::string out;
    for (const auto& s : beat.events) {
        if (!out.empty()) {
            out += ' ';
        }
        out += s.name;
    }
    return out;
}

StrokeSequence flatten(const BeatCycle& cycle, bool keep_rests) {
    StrokeSequence out;
    for (const auto& beat : cycle.beats) {
        for (const auto& stroke : beat.events) {
            if (keep_rests || !stroke.is_rest()) {
                out.push_back(stroke);
            }
        }
    }
    return out;
}

TalaDefinition make_tala(std::string name, std::vector<Beat> beats, std::vector<int> vibhags,
                         std::vector<StrokeLabel> vocabulary, std::vector<int> ratio, std::optional<Beat> filler) {
    TalaDefinition t;
    t.name = std::move(name);
    t.theka.beats = std::move(beats);
    t.theka.vibhags = std::move(vibhags);
    t.x_ref = flatten(t.theka, false);
    t.vocabulary = std::move(vocabulary);
    t.ratio = std::move(ratio);
    t.filler = std::move(filler);
    return t;
}

std::vector<int> reduced_counts(const StrokeSequence& x_ref, const std::vector<StrokeLabel>& vocabulary) {
    std::vector<int> counts(vocabulary.size(), 0);
    for (const auto& s : x_ref) {
        auto it = std::find(vocabulary.begin(), vocabulary.end(), s);
        if (it != vocabulary.end()) {
            ++counts[static_cast<std::size_t>(it - vocabulary.begin())];
        }
    }
    int g = 0;
    for (int c : counts) {
        g = std::gcd(g, c);
    }
    if (g > 1) {
        for (int& c : counts) {
            c /= g;
        }
    }
    return counts;
}

std::vector<std::string> validate_tala(const TalaDefinition& t) {
    std::vector<std::string> v;
    if (t.name.empty()) {
        v.emplace_back("name is empty");
    }
    const auto n = t.theka.beats.size();
    if (n == 0) {
        v.emplace_back("theka has no beats");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& beat = t.theka.beats[i];
        if (beat.events.empty()) {
            v.push_back("beat " + std::to_string(i + 1) + " has no events");
        }
        for (const auto& s : beat.events) {
            if (s.name.empty()) {
                v.push_back("beat " + std::to_string(i + 1) + " has an empty stroke name");
            }
        }
    }
    long sum = 0;
    for (int g : t.theka.vibhags) {
        if (g <= 0) {
            v.push_back("vibhag size " + std::to_string(g) + " is not positive");
        }
        sum += g;
    }
    if (sum != static_cast<long>(n)) {
        v.push_back("vibhag sum ≠ N (" + std::to_string(sum) + " vs " + std::to_string(n) + ")");
    }

    if (t.x_ref != flatten(t.theka, false)) {
        v.emplace_back("x_ref does not match the flattened theka");
    }
    if (t.x_ref.empty()) {
        v.emplace_back("theka has no strokes (m = 0)");
    }

    std::set<std::string> seen;
    for (const auto& s : t.vocabulary) {
        if (s.is_rest()) {
            v.emplace_back("vocabulary contains Rest");
        }
        if (!seen.insert(s.name).second) {
            v.push_back("vocabulary lists " + s.name + " twice");
        }
    }
    std::set<std::string> missing;
    for (const auto& s : t.x_ref) {
        if (!seen.count(s.name)) {
            missing.insert(s.name);
        }
    }
    for (const auto& name : missing) {
        v.push_back("stroke " + name + " is not in the vocabulary");
    }

    if (t.ratio.size() != t.vocabulary.size()) {
        v.push_back("ratio has " + std::to_string(t.ratio.size()) + " entries for a vocabulary of " +
                    std::to_string(t.vocabulary.size()));
    } else {
        const auto expected = reduced_counts(t.x_ref, t.vocabulary);
        for (std::size_t k = 0; k < expected.size(); ++k) {
            if (t.ratio[k] < 0) {
                v.push_back("ratio for " + t.vocabulary[k].name + " is negative");
            } else if (t.ratio[k] != expected[k]) {
                v.push_back("ratio mismatch for " + t.vocabulary[k].name + " (expected " +
                            std::to_string(expected[k]) + ", got " + std::to_string(t.ratio[k]) + ")");
            }
        }
    }
    if (t.filler) {
        if (t.filler->events.empty()) {
            v.emplace_back("filler beat has no events");
        }
    }
    return v;
}

namespace {

Beat beat(std::initializer_list<const char*> strokes) {
    Beat b;
    for (const char* s : strokes) {
        b.events.emplace_back(s);
    }
    return b;
}

std::vector<Beat> single_stroke_beats(std::initializer_list<const char*> strokes) {
    std::vector<Beat> out;
    for (const char* s : strokes) {
        out.push_back(beat({s}));
    }
    return out;
}

// Editorial default: a four-stroke flourish in the last beat of a call cycle.
Beat default_filler() { return beat({"Ti", "Ra", "Ki", "Ta"}); }

std::vector<TalaDefinition> make_builtins() {
    std::vector<TalaDefinition> out;
    out.push_back(make_tala("tintal",
                            single_stroke_beats({"Dha", "Dhin", "Dhin", "Dha", "Dha", "Dhin", "Dhin", "Dha",
                                                 "Dha", "Tin", "Tin", "Ta", "Ta", "Dhin", "Dhin", "Dha"}),
                            {4, 4, 4, 4}, {"Dha", "Dhin", "Tin", "Ta"}, {3, 3, 1, 1}, default_filler()));
    out.push_back(make_tala("ektal",
                            single_stroke_beats({"Dhin", "Dhin", "Dhage", "Tirkita", "Tun", "Na", "Kat", "Ta",
                                                 "Dhage", "Tirkita", "Dhin", "Na"}),
                            {2, 2, 2, 2, 2, 2}, {"Dhin", "Tun", "Na", "Kat", "Ta", "Dhage", "Tirkita"},
                            {3, 1, 2, 1, 1, 2, 2}, default_filler()));
    out.push_back(make_tala("jhaptal",
                            single_stroke_beats({"Dhi", "Na", "Dhi", "Dhi", "Na", "Ti", "Na", "Dhi", "Dhi", "Na"}),
                            {2, 3, 2, 3}, {"Dhi", "Na", "Ti"}, {5, 4, 1}, default_filler()));
    out.push_back(make_tala("rupak", single_stroke_beats({"Tin", "Tin", "Na", "Dhi", "Na", "Dhi", "Na"}), {3, 2, 2},
                            {"Tin", "Na", "Dhi"}, {2, 3, 2}, default_filler()));
    out.push_back(make_tala("deepchandi",
                            single_stroke_beats({"Dha", "Dhin", "-", "Dha", "Dha", "Tin", "-", "Ta", "Tin", "-",
                                                 "Dha", "Dha", "Dhin", "-"}),
                            {3, 4, 3, 4}, {"Dha", "Dhin", "Tin", "Ta"}, {5, 2, 2, 1}, default_filler()));
    return out;
}

}  // namespace

const std::vector<TalaDefinition>& builtin_talas() {
    static const std::vector<TalaDefinition> talas = make_builtins();
    return talas;
}

const TalaDefinition* find_tala(const std::vector<TalaDefinition>& talas, std::string_view name) {
    for (const auto& t : talas) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

}  // namespace talagen
