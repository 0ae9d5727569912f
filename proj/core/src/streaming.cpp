#include "talagen/streaming.hpp"

#include <algorithm>
#include <cmath>

#include "talagen/error.hpp"

namespace talagen {

StreamingRenderer::StreamingRenderer(std::unique_ptr<SequenceStream> stream,
                                     std::shared_ptr<const StrokeSampleBank> bank, RenderState initial,
                                     PulseFill pulse, std::size_t max_voices)
    : stream_(std::move(stream)),
      bank_(std::move(bank)),
      state_(initial),
      pulse_(pulse),
      max_voices_(max_voices) {
    if (!stream_ || !bank_) {
        throw ValidationError("streaming renderer needs a sequence and a sample bank");
    }
    validate(state_);
    if (bank_->sample_rate() != state_.sample_rate) {
        throw ValidationError("sample bank rate " + std::to_string(bank_->sample_rate()) +
                              " Hz differs from the output rate " + std::to_string(state_.sample_rate) + " Hz");
    }
    require_covered(*stream_);
    if (max_voices_ == 0) {
        throw ValidationError("voice pool must not be empty");
    }
    tick_ = pulse_tick(state_.sample_rate, pulse_.gain);
    voices_.reserve(max_voices_);
    position_ = 0;
    next_start_ = state_.n0;
}

StreamingRenderer::~StreamingRenderer() {
    while (auto old = retired_.pop()) {
        delete *old;
    }
    delete pending_stream_;
    while (auto cmd = commands_.pop()) {
        delete cmd->stream;
    }
}

void StreamingRenderer::require_covered(const SequenceStream& stream) const {
    std::string missing;
    for (const auto& label : output_strokes(stream.machine())) {
        if (!bank_->contains(label)) {
            missing += (missing.empty() ? "" : ", ") + label.name;
        }
    }
    if (!missing.empty()) {
        throw ValidationError("sample bank lacks strokes the sequence can emit: " + missing);
    }
}

bool StreamingRenderer::set_bpm(double bpm) {
    if (!std::isfinite(bpm) || bpm < kMinBpm || bpm > kMaxBpm) {
        return false;
    }
    return commands_.push({ControlCommand::Kind::SetBpm, bpm, nullptr});
}

bool StreamingRenderer::stop() {
    return commands_.push({ControlCommand::Kind::Stop, 0.0, nullptr});
}

bool StreamingRenderer::switch_sequence(std::unique_ptr<SequenceStream>& stream) {
    if (!stream) {
        return false;
    }
    require_covered(*stream);
    if (!commands_.push({ControlCommand::Kind::SwitchSequence, 0.0, stream.get()})) {
        return false;
    }
    stream.release();
    return true;
}

std::unique_ptr<SequenceStream> StreamingRenderer::reclaim() {
    if (auto old = retired_.pop()) {
        return std::unique_ptr<SequenceStream>(*old);
    }
    return nullptr;
}

void StreamingRenderer::drain_commands() {
    while (auto cmd = commands_.pop()) {
        switch (cmd->kind) {
            case ControlCommand::Kind::SetBpm:
                pending_bpm_ = cmd->bpm;
                break;
            case ControlCommand::Kind::Stop:
                stopping_ = true;
                break;
            case ControlCommand::Kind::SwitchSequence:
                if (pending_stream_ != nullptr) {
                    retire(pending_stream_);
                }
                pending_stream_ = cmd->stream;
                break;
        }
    }
}

void StreamingRenderer::retire(SequenceStream* stream) {
    if (!retired_.push(stream)) {
        delete stream;  // nobody is reclaiming; freeing here is the only option left
    }
}

void StreamingRenderer::add_voice(std::int64_t start, const StrokeLabel& label, BlockStatus& status) {
    std::span<const float> h = label.name == kPulseTickName ? std::span<const float>(tick_) : bank_->waveform(label);
    if (h.empty()) {
        return;
    }
    if (voices_.size() == max_voices_) {
        ++status.dropped_voices;
        return;
    }
    voices_.push_back({start, h.data(), h.size()});
}

void StreamingRenderer::start_beats(std::int64_t block_end, BlockStatus& status) {
    while (!stopping_ && next_start_ < block_end) {
        if (pending_bpm_ || pending_stream_ != nullptr) {
            state_.n0 = next_start_;
            tempo_base_ = beat_;
            if (pending_bpm_) {
                state_.bpm = *pending_bpm_;
                pending_bpm_.reset();
            }
            if (pending_stream_ != nullptr) {
                retire(stream_.release());
                stream_.reset(pending_stream_);
                pending_stream_ = nullptr;
                stream_base_ = beat_;
            }
        }
        const Beat* beat = stream_->next_beat();
        if (beat == nullptr) {
            stopping_ = true;
            break;
        }
        const std::size_t cycle = std::max<std::size_t>(1, stream_->cycle_beats());
        const std::size_t position = (beat_ - stream_base_) % cycle;
        if (status.mark_count < BlockStatus::kMaxMarks) {
            status.marks[status.mark_count] = {beat_, position, position == 0, next_start_, state_.bpm};
        }
        ++status.mark_count;
        schedule_beat(state_, beat_ - tempo_base_, *beat, pulse_,
                      [&](std::int64_t n, const StrokeLabel& label) { add_voice(n, label, status); });
        ++beat_;
        next_start_ = onset_sample_index(state_, beat_ - tempo_base_, 0, 1);
    }
}

BlockStatus StreamingRenderer::render_block(std::span<float> out) {
    if (out.size() < kMinBlock) {
        throw ValidationError("audio blocks must hold at least 64 samples");
    }
    BlockStatus status;
    status.first_sample = position_;
    status.frames = out.size();
    const std::int64_t block_begin = position_;
    const std::int64_t block_end = position_ + static_cast<std::int64_t>(out.size());

    drain_commands();
    if (stopping_) {
        // Strokes that have not sounded yet are dropped; ringing ones decay.
        std::erase_if(voices_, [&](const Voice& v) { return v.start >= block_begin; });
    } else {
        start_beats(block_end, status);
    }

    std::fill(out.begin(), out.end(), 0.0f);
    for (const auto& v : voices_) {
        const std::int64_t from = std::max(v.start, block_begin);
        const std::int64_t to = std::min(v.start + static_cast<std::int64_t>(v.length), block_end);
        for (std::int64_t n = from; n < to; ++n) {
            out[static_cast<std::size_t>(n - block_begin)] += v.data[n - v.start];
        }
    }
    std::erase_if(voices_, [&](const Voice& v) { return v.start + static_cast<std::int64_t>(v.length) <= block_end; });

    position_ = block_end;
    status.bpm = pending_bpm_.value_or(state_.bpm);
    status.stopping = stopping_;
    status.finished = stopping_ && voices_.empty();
    return status;
}

}  // namespace talagen
