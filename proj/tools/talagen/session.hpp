#pragma once

// Control-thread side of the live service: one session state shared by every
// connected client. Messages arrive as JSON text and leave as JSON text.

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"
#include "talagen/render.hpp"
#include "talagen/rhythm.hpp"
#include "talagen/sample_bank.hpp"
#include "talagen/tempo.hpp"

namespace talagen::cli {

struct Outgoing {
    std::optional<std::uint64_t> to;  // nullopt broadcasts
    std::string text;
};

struct SessionConfig {
    std::string tala;  // initial selection; empty means the first tala
    bool filler = true;
    std::size_t cycles_per_call = 4;
    PulseFill pulse;
    TapEstimator estimator = TapEstimator::LastInterval;
    std::uint64_t seed = 0;
};

class Session {
public:
    Session(SessionConfig config, std::vector<TalaDefinition> talas, std::shared_ptr<const StrokeSampleBank> bank,
            AudioEngine& engine);
    ~Session();

    void connect(std::uint64_t client, std::vector<Outgoing>& out) const;
    /// `arrival_sec` is the service clock, used for taps without a timestamp.
    void handle(std::uint64_t client, const std::string& text, double arrival_sec, std::vector<Outgoing>& out);
    /// Drains the audio thread's returned renderers and its events. Beat
    /// events are held back until the wall time their sample plays.
    void poll(std::vector<Outgoing>& out,
              std::chrono::steady_clock::time_point now = std::chrono::steady_clock::now());

    bool playing() const noexcept { return playing_; }
    const TempoState& tempo() const noexcept { return tempo_; }
    const TalaDefinition& tala() const noexcept { return *tala_; }

private:
    std::unique_ptr<SequenceStream> make_stream() const;
    void set_tempo(const TempoState& next, std::vector<Outgoing>& out);
    void start(std::vector<Outgoing>& out);
    void stop(std::vector<Outgoing>& out);
    void restream();
    std::string snapshot() const;

    SessionConfig config_;
    std::vector<TalaDefinition> talas_;
    std::shared_ptr<const StrokeSampleBank> bank_;
    AudioEngine& engine_;

    const TalaDefinition* tala_ = nullptr;
    TempoState tempo_;
    TapHistory taps_;
    bool filler_;
    bool playing_ = false;
    std::size_t beat_ = 0;
    std::size_t position_ = 0;
    std::uint64_t generation_ = 0;
    StreamingRenderer* current_ = nullptr;
    std::vector<std::unique_ptr<StreamingRenderer>> renderers_;
    std::deque<AudioEvent> pending_;  // alive until the audio thread returns them
};

}  // namespace talagen::cli
