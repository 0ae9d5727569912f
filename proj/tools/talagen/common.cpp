#include "common.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "talagen/error.hpp"
#include "talagen/tala_io.hpp"

namespace talagen::cli {

std::optional<std::filesystem::path> bank_path(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv("TALAGEN_BANK"); env != nullptr && *env != '\0') {
        return std::filesystem::path(env);
    }
    return std::nullopt;
}

std::shared_ptr<const StrokeSampleBank> load_bank(const std::string& flag, int sample_rate,
                                                  const std::vector<TalaDefinition>& talas) {
    if (const auto path = bank_path(flag)) {
        auto bank = load_sample_bank(*path);
        if (sample_rate != 0 && bank.sample_rate() != sample_rate) {
            throw Error("sample bank " + path->string() + " is " + std::to_string(bank.sample_rate()) +
                        " Hz but " + std::to_string(sample_rate) + " Hz was requested");
        }
        return std::make_shared<const StrokeSampleBank>(std::move(bank));
    }
    auto labels = all_stroke_labels(talas);
    for (const auto& l : all_stroke_labels(builtin_talas())) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) {
            labels.push_back(l);
        }
    }
    return std::make_shared<const StrokeSampleBank>(synthetic_bank(sample_rate == 0 ? 44100 : sample_rate, labels));
}

std::vector<TalaDefinition> load_talas(const std::string& dir) {
    if (dir.empty()) {
        return builtin_talas();
    }
    auto talas = load_tala_dir(dir);
    if (talas.empty()) {
        throw Error("no tala definitions (*.json) in " + dir);
    }
    return talas;
}

std::string tala_names(const std::vector<TalaDefinition>& talas) {
    std::string out;
    for (const auto& t : talas) {
        out += (out.empty() ? "" : ", ") + t.name;
    }
    return out;
}

const TalaDefinition& require_tala(const std::vector<TalaDefinition>& talas, const std::string& name) {
    if (const auto* t = find_tala(talas, name)) {
        return *t;
    }
    throw Error("unknown tala '" + name + "' (available: " + tala_names(talas) + ")");
}

bool parse_switch(const std::string& text, const char* flag) {
    if (text == "on" || text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "off" || text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw Error(std::string(flag) + " expects on or off, got '" + text + "'");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw Error("cannot write " + path);
    }
}

}  // namespace talagen::cli
