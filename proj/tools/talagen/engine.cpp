#include "engine.hpp"

#include <algorithm>

#include "talagen/wav.hpp"

namespace talagen::cli {

AudioEngine::AudioEngine(EngineConfig config) : config_(config) {
    if (config_.block < StreamingRenderer::kMinBlock) {
        config_.block = StreamingRenderer::kMinBlock;
    }
    if (!(config_.pace > 0.0)) {
        config_.pace = 1.0;
    }
}

AudioEngine::~AudioEngine() { shutdown(); }

void AudioEngine::start() {
    if (!thread_.joinable()) {
        thread_ = std::thread([this] { run(); });
    }
}

void AudioEngine::shutdown() {
    quit_.store(true);
    if (thread_.joinable()) {
        thread_.join();
    }
}

bool AudioEngine::submit(StreamingRenderer* renderer, std::uint64_t generation) {
    return incoming_.push({renderer, generation});
}

StreamingRenderer* AudioEngine::released() {
    if (auto r = released_.pop()) {
        return *r;
    }
    return nullptr;
}

bool AudioEngine::poll(AudioEvent& event) {
    if (auto e = events_.pop()) {
        event = *e;
        return true;
    }
    return false;
}

void AudioEngine::release(StreamingRenderer* r) {
    // The control thread drains this queue every few milliseconds; spinning
    // here only happens if it stalls.
    while (!released_.push(r)) {
        if (quit_.load()) {
            return;
        }
        std::this_thread::yield();
    }
}

void AudioEngine::emit(const AudioEvent& e) {
    if (!events_.push(e)) {
        dropped_events_.fetch_add(1, std::memory_order_relaxed);
    }
}

void AudioEngine::run() {
    using clock = std::chrono::steady_clock;
    std::vector<float> block(config_.block, 0.0f);
    std::vector<short> pcm(config_.block, 0);
    const auto period = std::chrono::duration<double>(static_cast<double>(config_.block) /
                                                      (config_.sample_rate * config_.pace));
    StreamingRenderer* current = nullptr;
    std::uint64_t generation = 0;
    auto origin = clock::now();
    std::int64_t k = 0;

    while (!quit_.load(std::memory_order_relaxed)) {
        const auto due = origin + std::chrono::duration_cast<clock::duration>(period * static_cast<double>(k));
        auto now = clock::now();
        if (due > now) {
            std::this_thread::sleep_until(due);
        } else if (now - due > std::chrono::seconds(1)) {
            origin = now;  // too far behind to catch up; restart the clock
            k = 0;
        }
        const auto block_time = std::max(due, now);

        while (auto h = incoming_.pop()) {
            if (current != nullptr) {
                release(current);
            }
            current = h->renderer;
            generation = h->generation;
        }

        if (current != nullptr) {
            const auto status = current->render_block(block);
            const double seconds_per_sample = 1.0 / (config_.sample_rate * config_.pace);
            for (const auto& mark : status.beats()) {
                const auto offset = std::chrono::duration<double>(
                    static_cast<double>(mark.sample_index - status.first_sample) * seconds_per_sample);
                emit({AudioEvent::Kind::Beat, generation, mark,
                      block_time + std::chrono::duration_cast<clock::duration>(offset)});
            }
            if (status.finished) {
                emit({AudioEvent::Kind::Finished, generation, {}, block_time});
                release(current);
                current = nullptr;
            }
        } else {
            std::fill(block.begin(), block.end(), 0.0f);
        }

        if (config_.sink != nullptr && !sink_failed_.load(std::memory_order_relaxed)) {
            clipped_.fetch_add(to_pcm16(block, pcm), std::memory_order_relaxed);
            if (std::fwrite(pcm.data(), sizeof(short), pcm.size(), config_.sink) != pcm.size() ||
                std::fflush(config_.sink) != 0) {
                sink_failed_.store(true);
            }
        } else {
            std::size_t over = 0;
            for (float x : block) {
                over += x > 1.0f || x < -1.0f;
            }
            clipped_.fetch_add(over, std::memory_order_relaxed);
        }
        blocks_.fetch_add(1, std::memory_order_relaxed);
        ++k;
    }
    if (current != nullptr) {
        release(current);
    }
}

}  // namespace talagen::cli
