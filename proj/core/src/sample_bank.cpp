#include "talagen/sample_bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "json.hpp"

#include "talagen/error.hpp"
#include "talagen/wav.hpp"

namespace talagen {

StrokeSampleBank::StrokeSampleBank(int sample_rate) : sample_rate_(sample_rate) {
    if (sample_rate <= 0) {
        throw Error("sample bank needs a positive sample rate");
    }
}

void StrokeSampleBank::add(const StrokeLabel& label, std::vector<float> waveform) {
    if (label.is_rest() || label.name.empty()) {
        throw Error("sample bank: invalid stroke label '" + label.name + "'");
    }
    if (waveform.empty()) {
        throw Error("sample bank: empty waveform for " + label.name);
    }
    for (float s : waveform) {
        if (!std::isfinite(s) || std::abs(s) > 1.0f) {
            throw Error("sample bank: waveform for " + label.name + " exceeds [-1, 1]");
        }
    }
    waveforms_[label.name] = std::move(waveform);
}

bool StrokeSampleBank::contains(const StrokeLabel& label) const {
    return label.is_rest() || waveforms_.count(label.name) > 0;
}

std::vector<StrokeLabel> StrokeSampleBank::labels() const {
    std::vector<StrokeLabel> out;
    for (const auto& [name, w] : waveforms_) {
        out.emplace_back(name);
    }
    return out;
}

std::span<const float> StrokeSampleBank::waveform(const StrokeLabel& label) const {
    if (label.is_rest()) {
        return {};
    }
    auto it = waveforms_.find(label.name);
    if (it == waveforms_.end()) {
        throw Error("sample bank has no waveform for stroke '" + label.name + "'");
    }
    return it->second;
}

std::vector<std::string> StrokeSampleBank::missing_strokes(const TalaDefinition& tala) const {
    std::set<std::string> missing;
    auto check = [&](const Beat& b) {
        for (const auto& s : b.events) {
            if (!contains(s)) {
                missing.insert(s.name);
            }
        }
    };
    for (const auto& b : tala.theka.beats) {
        check(b);
    }
    if (tala.filler) {
        check(*tala.filler);
    }
    return {missing.begin(), missing.end()};
}

std::vector<StrokeLabel> all_stroke_labels(const std::vector<TalaDefinition>& talas) {
    std::set<std::string> names;
    for (const auto& t : talas) {
        for (const auto& s : t.vocabulary) {
            names.insert(s.name);
        }
        for (const auto& b : t.theka.beats) {
            for (const auto& s : b.events) {
                if (!s.is_rest()) {
                    names.insert(s.name);
                }
            }
        }
        if (t.filler) {
            for (const auto& s : t.filler->events) {
                if (!s.is_rest()) {
                    names.insert(s.name);
                }
            }
        }
    }
    return {names.begin(), names.end()};
}

namespace {

std::vector<float> synthetic_stroke(int sample_rate, double freq, std::uint32_t seed) {
    const auto length = static_cast<std::size_t>(std::lround(0.250 * sample_rate));
    const double attack = 0.001 * sample_rate;
    const double tau = 0.040 * sample_rate;
    std::vector<float> out(length);
    std::uint32_t lcg = seed | 1u;
    for (std::size_t n = 0; n < length; ++n) {
        const double t = static_cast<double>(n) / sample_rate;
        const double env = std::min(1.0, static_cast<double>(n) / attack) * std::exp(-static_cast<double>(n) / tau);
        double v = std::sin(2.0 * std::numbers::pi * freq * t) + 0.4 * std::sin(2.0 * std::numbers::pi * 2.02 * freq * t);
        if (n < static_cast<std::size_t>(0.004 * sample_rate)) {
            lcg = lcg * 1664525u + 1013904223u;
            v += 0.3 * (static_cast<double>(lcg >> 8) / 8388608.0 - 1.0);
        }
        // Raised-cosine fade over the last 10 ms so the tail ends at zero.
        const double fade_len = 0.010 * sample_rate;
        const double remaining = static_cast<double>(length - 1 - n);
        const double fade = remaining < fade_len ? 0.5 - 0.5 * std::cos(std::numbers::pi * remaining / fade_len) : 1.0;
        out[n] = static_cast<float>(0.5 * env * fade * v);
    }
    return out;
}

}  // namespace

StrokeSampleBank synthetic_bank(int sample_rate, const std::vector<StrokeLabel>& labels) {
    std::set<std::string> names;
    for (const auto& l : labels) {
        if (!l.is_rest()) {
            names.insert(l.name);
        }
    }
    StrokeSampleBank bank(sample_rate);
    const double count = static_cast<double>(names.size());
    std::size_t k = 0;
    for (const auto& name : names) {
        const double pos = count > 1 ? static_cast<double>(k) / (count - 1.0) : 0.0;
        const double freq = 150.0 * std::pow(32.0, pos);
        std::uint32_t seed = 2166136261u;
        for (unsigned char c : name) {
            seed = (seed ^ c) * 16777619u;
        }
        bank.add(StrokeLabel(name), synthetic_stroke(sample_rate, freq, seed));
        ++k;
    }
    return bank;
}

StrokeSampleBank synthetic_bank(int sample_rate) {
    return synthetic_bank(sample_rate, all_stroke_labels(builtin_talas()));
}

StrokeSampleBank load_sample_bank(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error("sample bank directory not found: " + dir.string());
    }
    std::map<std::string, std::filesystem::path> files;
    const auto manifest = dir / "manifest.json";
    if (std::filesystem::exists(manifest)) {
        std::ifstream in(manifest);
        std::stringstream buf;
        buf << in.rdbuf();
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(buf.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("", 0, manifest.string() + ": " + e.what());
        }
        if (!doc.is_object() || !doc.contains("strokes") || !doc["strokes"].is_object()) {
            throw ParseError("strokes", 0, manifest.string() + ": expected an object mapping labels to files");
        }
        for (const auto& [label, file] : doc["strokes"].items()) {
            if (!file.is_string()) {
                throw ParseError("strokes", 0, manifest.string() + ": file for " + label + " must be a string");
            }
            files[label] = dir / file.get<std::string>();
        }
    } else {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".wav") {
                files[entry.path().stem().string()] = entry.path();
            }
        }
    }
    if (files.empty()) {
        throw Error("sample bank " + dir.string() + " contains no WAV files");
    }

    std::optional<StrokeSampleBank> bank;
    for (const auto& [label, path] : files) {
        auto audio = read_wav(path);
        if (!bank) {
            bank.emplace(audio.sample_rate);
        } else if (audio.sample_rate != bank->sample_rate()) {
            throw Error(path.string() + ": sample rate " + std::to_string(audio.sample_rate) + " differs from " +
                        std::to_string(bank->sample_rate()));
        }
        for (auto& s : audio.samples) {
            s = std::clamp(s, -1.0f, 1.0f);
        }
        bank->add(StrokeLabel(label), std::move(audio.samples));
    }
    return std::move(*bank);
}

std::vector<LabeledClip> bank_clips(const StrokeSampleBank& bank) {
    std::vector<LabeledClip> clips;
    for (const auto& label : bank.labels()) {
        const auto w = bank.waveform(label);
        clips.push_back({Waveform{bank.sample_rate(), {w.begin(), w.end()}}, label});
    }
    return clips;
}

}  // namespace talagen
