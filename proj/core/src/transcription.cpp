#include "talagen/transcription.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "talagen/error.hpp"

namespace talagen {

StrokeSequence Transcription::labels() const {
    StrokeSequence out;
    out.reserve(events.size());
    for (const auto& e : events) {
        out.push_back(e.label);
    }
    return out;
}

std::string check_transcription(const Transcription& t) {
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        const auto& e = t.events[i];
        if (!std::isfinite(e.onset_sec) || e.onset_sec < 0.0) {
            return "event " + std::to_string(i) + " has an invalid onset time";
        }
        if (e.label.is_rest() || e.label.name.empty()) {
            return "event " + std::to_string(i) + " has no stroke label";
        }
        if (i > 0 && e.onset_sec < t.events[i - 1].onset_sec) {
            return "event " + std::to_string(i) + " is earlier than its predecessor";
        }
    }
    return {};
}

std::string write_transcription_csv(const Transcription& t) {
    std::string out = "onset_sec,label\n";
    char buf[64];
    for (const auto& e : t.events) {
        std::snprintf(buf, sizeof buf, "%.6f", e.onset_sec);
        out += buf;
        out += ',';
        out += e.label.name;
        out += '\n';
    }
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

Transcription read_transcription_csv(std::string_view text) {
    Transcription out;
    std::size_t row = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++row;
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != "onset_sec,label") {
                throw ParseError("header", row, "expected 'onset_sec,label', got '" + std::string(line) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw ParseError("row", row, "expected two comma-separated columns");
        }
        const auto time_text = trim(line.substr(0, comma));
        const auto label = trim(line.substr(comma + 1));
        double onset = 0.0;
        const auto [ptr, ec] = std::from_chars(time_text.data(), time_text.data() + time_text.size(), onset);
        if (ec != std::errc{} || ptr != time_text.data() + time_text.size() || !std::isfinite(onset) || onset < 0.0) {
            throw ParseError("onset_sec", row, "invalid onset time '" + std::string(time_text) + "'");
        }
        if (label.empty() || label == StrokeLabel::kRestName || label.find(',') != std::string_view::npos) {
            throw ParseError("label", row, "invalid stroke label '" + std::string(label) + "'");
        }
        if (!out.events.empty() && onset < out.events.back().onset_sec) {
            throw ParseError("onset_sec", row, "onset times are not sorted");
        }
        out.events.push_back({onset, StrokeLabel(std::string(label))});
    }
    if (!header_seen) {
        throw ParseError("header", 1, "missing 'onset_sec,label' header");
    }
    return out;
}

Transcription load_transcription(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open transcription " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return read_transcription_csv(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.field(), e.line(), path.string() + ": " + e.detail());
    }
}

void save_transcription(const Transcription& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << write_transcription_csv(t);
}

}  // namespace talagen
