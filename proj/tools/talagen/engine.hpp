#pragma once

// Paced audio thread. It owns nothing: the control side hands it renderers
// through a queue and gets them back once they finish or are replaced. Beat
// marks travel back through a second queue.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <thread>
#include <vector>

#include "talagen/streaming.hpp"

namespace talagen::cli {

struct AudioEvent {
    enum class Kind { Beat, Finished };
    Kind kind = Kind::Beat;
    std::uint64_t generation = 0;
    BeatMark mark{};
    /// Wall time at which the event's sample plays, given the engine's pacing.
    std::chrono::steady_clock::time_point due{};
};

struct EngineConfig {
    int sample_rate = 44100;
    std::size_t block = 512;
    double pace = 1.0;          // 2.0 renders twice as fast as real time
    std::FILE* sink = nullptr;  // s16le mono; nullptr discards the audio
};

class AudioEngine {
public:
    explicit AudioEngine(EngineConfig config);
    ~AudioEngine();

    AudioEngine(const AudioEngine&) = delete;
    AudioEngine& operator=(const AudioEngine&) = delete;

    void start();
    void shutdown();

    /// Control side. The renderer replaces the current one at the next block.
    bool submit(StreamingRenderer* renderer, std::uint64_t generation);
    /// Renderers the audio thread no longer touches.
    StreamingRenderer* released();
    bool poll(AudioEvent& event);

    std::size_t clipped() const noexcept { return clipped_.load(std::memory_order_relaxed); }
    std::int64_t blocks() const noexcept { return blocks_.load(std::memory_order_relaxed); }
    bool sink_failed() const noexcept { return sink_failed_.load(std::memory_order_relaxed); }
    const EngineConfig& config() const noexcept { return config_; }

private:
    struct Handoff {
        StreamingRenderer* renderer = nullptr;
        std::uint64_t generation = 0;
    };

    void run();
    void release(StreamingRenderer* r);
    void emit(const AudioEvent& e);

    EngineConfig config_;
    SpscQueue<Handoff, 16> incoming_;
    SpscQueue<StreamingRenderer*, 16> released_;
    SpscQueue<AudioEvent, 4096> events_;
    std::atomic<bool> quit_{false};
    std::atomic<std::size_t> clipped_{0};
    std::atomic<std::int64_t> blocks_{0};
    std::atomic<bool> sink_failed_{false};
    std::atomic<std::size_t> dropped_events_{0};
    std::thread thread_;
};

}  // namespace talagen::cli
