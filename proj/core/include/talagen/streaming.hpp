#pragma once

// Block-by-block rendering for live playback. One control thread posts
// commands, one audio thread calls render_block(). The audio path does not
// allocate: voices live in a preallocated pool and commands travel through a
// fixed-size single-producer single-consumer ring.
//
// Commands are read at the start of a block and take effect at the next beat
// boundary, where n0 is rebased to that beat's onset. With the same beats and
// tempo changes the output matches render() bit for bit.

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "talagen/render.hpp"
#include "talagen/sample_bank.hpp"
#include "talagen/wfst.hpp"

namespace talagen {

template <class T, std::size_t Capacity>
class SpscQueue {
    static_assert(Capacity >= 2 && (Capacity & (Capacity - 1)) == 0, "capacity must be a power of two");

public:
    bool push(const T& value) noexcept {
        const auto head = head_.load(std::memory_order_relaxed);
        const auto tail = tail_.load(std::memory_order_acquire);
        if (head - tail == Capacity) {
            return false;
        }
        slots_[head & (Capacity - 1)] = value;
        head_.store(head + 1, std::memory_order_release);
        return true;
    }

    std::optional<T> pop() noexcept {
        const auto tail = tail_.load(std::memory_order_relaxed);
        const auto head = head_.load(std::memory_order_acquire);
        if (tail == head) {
            return std::nullopt;
        }
        T value = slots_[tail & (Capacity - 1)];
        tail_.store(tail + 1, std::memory_order_release);
        return value;
    }

private:
    std::array<T, Capacity> slots_{};
    alignas(64) std::atomic<std::size_t> head_{0};
    alignas(64) std::atomic<std::size_t> tail_{0};
};

struct ControlCommand {
    enum class Kind { SetBpm, Stop, SwitchSequence };
    Kind kind = Kind::SetBpm;
    double bpm = 0.0;
    /// For SwitchSequence: a stream released by the poster; the renderer owns
    /// it from then on and hands the old one back through reclaim().
    SequenceStream* stream = nullptr;
};

struct BeatMark {
    std::size_t beat_index = 0;      // beats started since the renderer began
    std::size_t cycle_position = 0;  // position inside the current tala's cycle
    bool is_sam = false;
    std::int64_t sample_index = 0;
    double bpm = 0.0;
};

struct BlockStatus {
    static constexpr std::size_t kMaxMarks = 32;

    std::int64_t first_sample = 0;
    std::size_t frames = 0;
    std::array<BeatMark, kMaxMarks> marks{};
    std::size_t mark_count = 0;      // marks started in this block (may exceed kMaxMarks)
    double bpm = 0.0;
    bool stopping = false;
    bool finished = false;           // stopped and every tail has decayed
    std::size_t dropped_voices = 0;  // strokes lost to a full voice pool

    std::span<const BeatMark> beats() const noexcept {
        return {marks.data(), mark_count < kMaxMarks ? mark_count : kMaxMarks};
    }
};

class StreamingRenderer {
public:
    /// Throws ValidationError for an invalid initial state, a bank whose
    /// sample rate differs from it, or a bank missing a stroke of the stream.
    StreamingRenderer(std::unique_ptr<SequenceStream> stream, std::shared_ptr<const StrokeSampleBank> bank,
                      RenderState initial, PulseFill pulse = {}, std::size_t max_voices = 256);
    ~StreamingRenderer();

    StreamingRenderer(const StreamingRenderer&) = delete;
    StreamingRenderer& operator=(const StreamingRenderer&) = delete;

    /// Control thread. False when the queue is full or the tempo is invalid.
    bool set_bpm(double bpm);
    bool stop();
    /// On success the renderer takes ownership of `stream`. Throws
    /// ValidationError when the bank lacks one of its strokes.
    bool switch_sequence(std::unique_ptr<SequenceStream>& stream);

    /// Control thread: a stream replaced by switch_sequence, if any.
    std::unique_ptr<SequenceStream> reclaim();

    static constexpr std::size_t kMinBlock = 64;

    /// Audio thread. Fills `out` completely; blocks hold at least kMinBlock samples.
    BlockStatus render_block(std::span<float> out);

    std::int64_t position() const noexcept { return position_; }
    int sample_rate() const noexcept { return state_.sample_rate; }

private:
    struct Voice {
        std::int64_t start = 0;
        const float* data = nullptr;
        std::size_t length = 0;
    };

    void drain_commands();
    void retire(SequenceStream* stream);
    void require_covered(const SequenceStream& stream) const;
    void start_beats(std::int64_t block_end, BlockStatus& status);
    void add_voice(std::int64_t start, const StrokeLabel& label, BlockStatus& status);

    std::unique_ptr<SequenceStream> stream_;
    std::shared_ptr<const StrokeSampleBank> bank_;
    RenderState state_;
    PulseFill pulse_;
    std::vector<float> tick_;
    std::vector<Voice> voices_;
    std::size_t max_voices_;

    SpscQueue<ControlCommand, 64> commands_;
    SpscQueue<SequenceStream*, 16> retired_;

    std::int64_t position_ = 0;
    std::int64_t next_start_ = 0;
    std::size_t beat_ = 0;         // next beat to start
    std::size_t tempo_base_ = 0;   // beat at which n0 was last rebased
    std::size_t stream_base_ = 0;  // beat at which the current stream began
    std::optional<double> pending_bpm_;
    SequenceStream* pending_stream_ = nullptr;
    bool stopping_ = false;
};

}  // namespace talagen
