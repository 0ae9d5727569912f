#include "session.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "talagen/error.hpp"
#include "talagen/machine.hpp"

namespace talagen::cli {

using nlohmann::json;

namespace {

json tala_json(const TalaDefinition& t) {
    return {{"name", t.name}, {"beats", t.beats()}, {"vibhags", t.theka.vibhags}};
}

json names(const std::vector<TalaDefinition>& talas) {
    json out = json::array();
    for (const auto& t : talas) {
        out.push_back(t.name);
    }
    return out;
}

json tempo_json(const TempoState& s) {
    return {{"type", "tempo"}, {"bpm", s.bpm}, {"source", std::string(to_string(s.source))}};
}

}  // namespace

Session::Session(SessionConfig config, std::vector<TalaDefinition> talas,
                 std::shared_ptr<const StrokeSampleBank> bank, AudioEngine& engine)
    : config_(std::move(config)), talas_(std::move(talas)), bank_(std::move(bank)), engine_(engine),
      filler_(config_.filler) {
    if (talas_.empty()) {
        throw Error("the service needs at least one tala");
    }
    tala_ = config_.tala.empty() ? &talas_.front() : find_tala(talas_, config_.tala);
    if (tala_ == nullptr) {
        throw Error("unknown tala '" + config_.tala + "'");
    }
    for (const auto& t : talas_) {
        if (const auto missing = bank_->missing_strokes(t); !missing.empty()) {
            throw Error("sample bank lacks strokes of " + t.name + ": " + missing.front());
        }
    }
}

Session::~Session() = default;

std::unique_ptr<SequenceStream> Session::make_stream() const {
    auto built = build_machine(default_layout(*tala_, config_.cycles_per_call, filler_), talas_);
    return std::make_unique<SequenceStream>(std::make_shared<const Wfst>(std::move(built.machine)), config_.seed,
                                            built.cycle_beats);
}

std::string Session::snapshot() const {
    json s{{"type", "snapshot"},
           {"tala", tala_json(*tala_)},
           {"talas", names(talas_)},
           {"bpm", tempo_.bpm},
           {"source", std::string(to_string(tempo_.source))},
           {"playing", playing_},
           {"filler", filler_},
           {"beat", beat_},
           {"pos", position_},
           {"taps", taps_.size()},
           {"clipped", engine_.clipped()},
           {"sample_rate", bank_->sample_rate()}};
    return s.dump();
}

void Session::connect(std::uint64_t client, std::vector<Outgoing>& out) const {
    out.push_back({client, snapshot()});
}

void Session::set_tempo(const TempoState& next, std::vector<Outgoing>& out) {
    tempo_ = next;
    if (current_ != nullptr && playing_) {
        current_->set_bpm(tempo_.bpm);
    }
    out.push_back({std::nullopt, tempo_json(tempo_).dump()});
}

void Session::start(std::vector<Outgoing>& out) {
    (void)out;
    if (playing_) {
        return;
    }
    auto renderer = std::make_unique<StreamingRenderer>(make_stream(), bank_,
                                                        RenderState{0, tempo_.bpm, bank_->sample_rate()}, config_.pulse);
    ++generation_;
    if (!engine_.submit(renderer.get(), generation_)) {
        throw Error("audio engine is not accepting work");
    }
    current_ = renderer.get();
    renderers_.push_back(std::move(renderer));
    playing_ = true;
    beat_ = 0;
    position_ = 0;
}

void Session::stop(std::vector<Outgoing>& out) {
    if (playing_ && current_ != nullptr) {
        current_->stop();
    }
    playing_ = false;
    out.push_back({std::nullopt, json{{"type", "stopped"}}.dump()});
}

void Session::restream() {
    if (!playing_ || current_ == nullptr) {
        return;
    }
    auto stream = make_stream();
    current_->switch_sequence(stream);
}

void Session::handle(std::uint64_t client, const std::string& text, double arrival_sec, std::vector<Outgoing>& out) {
    json msg;
    json ack{{"type", "ack"}};
    const auto error = [&](const std::string& what, json extra = json::object()) {
        json e{{"type", "error"}, {"text", what}};
        if (msg.is_object() && msg.contains("id")) {
            e["id"] = msg["id"];
        }
        e.update(extra);
        out.push_back({client, e.dump()});
    };
    try {
        msg = json::parse(text);
    } catch (const json::parse_error& e) {
        error(std::string("malformed message: ") + e.what());
        return;
    }
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        error("message must be an object with a string \"type\"");
        return;
    }
    const auto type = msg["type"].get<std::string>();
    ack["of"] = type;
    if (msg.contains("id")) {
        ack["id"] = msg["id"];
    }
    // Status events that follow from a message are queued after its ack.
    std::vector<Outgoing> events;

    try {
        if (type == "select_tala") {
            if (!msg.contains("name") || !msg["name"].is_string()) {
                error("select_tala needs a string \"name\"");
                return;
            }
            const auto name = msg["name"].get<std::string>();
            const auto* t = find_tala(talas_, name);
            if (t == nullptr) {
                std::string list;
                for (const auto& x : talas_) {
                    list += (list.empty() ? "" : ", ") + x.name;
                }
                error("unknown tala '" + name + "'; available: " + list, {{"talas", names(talas_)}});
                return;
            }
            tala_ = t;
            restream();
            ack["tala"] = tala_json(*tala_);
            events.push_back({std::nullopt, json{{"type", "tala"}, {"tala", tala_json(*tala_)}}.dump()});
        } else if (type == "start") {
            start(events);
            ack["tala"] = tala_->name;
            ack["bpm"] = tempo_.bpm;
        } else if (type == "stop") {
            stop(events);
        } else if (type == "tap") {
            double t = arrival_sec;
            if (msg.contains("t")) {
                if (!msg["t"].is_number()) {
                    error("tap \"t\" must be a number of seconds");
                    return;
                }
                t = msg["t"].get<double>();
            }
            const bool accepted = std::isfinite(t) && (taps_.empty() || t > taps_.last());
            const double previous = taps_.empty() ? t : taps_.last();
            const auto result = register_tap(taps_, t, config_.estimator);
            ack["accepted"] = accepted;
            ack["taps"] = taps_.size();
            ack["need"] = taps_.size() >= 3 ? 0 : 3 - taps_.size();
            if (!accepted) {
                ack["notice"] = "tap dropped: not after the previous tap";
            } else if (t != previous) {
                ack["delay"] = t - previous;
            }
            if (result) {
                set_tempo(*result, events);
            }
        } else if (type == "set_bpm") {
            if (!msg.contains("bpm") || !msg["bpm"].is_number()) {
                error("set_bpm needs a numeric \"bpm\"");
                return;
            }
            set_tempo(apply_adjustment(tempo_, {TempoAdjustment::Kind::Set, msg["bpm"].get<double>()}), events);
        } else if (type == "adjust") {
            const auto action = msg.value("action", std::string());
            const auto adj = parse_adjustment(action);
            if (!adj) {
                error("unknown adjustment '" + action + "'; use +1, -1, +5, -5, double or half");
                return;
            }
            set_tempo(apply_adjustment(tempo_, *adj), events);
        } else if (type == "set_filler") {
            const auto it = msg.find("on");
            if (it == msg.end() || !it->is_boolean()) {
                error("set_filler needs a boolean \"on\"");
                return;
            }
            filler_ = it->get<bool>();
            restream();
            ack["on"] = filler_;
        } else if (type == "snapshot") {
            events.push_back({client, snapshot()});
        } else {
            error("unknown message type '" + type + "'");
            return;
        }
    } catch (const std::exception& e) {
        error(e.what());
        return;
    }
    out.push_back({client, ack.dump()});
    out.insert(out.end(), events.begin(), events.end());
}

void Session::poll(std::vector<Outgoing>& out, std::chrono::steady_clock::time_point now) {
    AudioEvent e;
    while (engine_.poll(e)) {
        pending_.push_back(e);
    }
    while (!pending_.empty() && pending_.front().due <= now) {
        e = pending_.front();
        pending_.pop_front();
        if (e.generation != generation_ || !playing_) {
            continue;
        }
        if (e.kind == AudioEvent::Kind::Beat) {
            beat_ = e.mark.beat_index;
            position_ = e.mark.cycle_position;
            out.push_back({std::nullopt, json{{"type", "beat"},
                                              {"i", e.mark.beat_index},
                                              {"pos", e.mark.cycle_position},
                                              {"sam", e.mark.is_sam},
                                              {"n", e.mark.sample_index},
                                              {"bpm", e.mark.bpm}}
                                             .dump()});
        } else if (e.kind == AudioEvent::Kind::Finished) {
            playing_ = false;
            out.push_back({std::nullopt, json{{"type", "stopped"}}.dump()});
        }
    }
    while (StreamingRenderer* r = engine_.released()) {
        if (r == current_) {
            current_ = nullptr;
        }
        std::erase_if(renderers_, [r](const auto& p) { return p.get() == r; });
    }
    if (current_ != nullptr) {
        while (current_->reclaim()) {
        }
    }
}

}  // namespace talagen::cli
