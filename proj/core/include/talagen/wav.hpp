#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace talagen {

/// Mono audio at a fixed sample rate.
struct Waveform {
    int sample_rate = 44100;
    std::vector<float> samples;

    double duration_sec() const noexcept {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

enum class WavFormat { Pcm16, Float32 };

struct WavWriteReport {
    std::size_t frames = 0;
    std::size_t clipped = 0;  // samples clamped to [-1, 1]
};

/// Reads PCM 16/24/32-bit or float32 WAV; multichannel input is averaged to mono.
Waveform read_wav(const std::filesystem::path& path);

/// Writes mono WAV, hard-clamping samples outside [-1, 1].
WavWriteReport write_wav(const std::filesystem::path& path, std::span<const float> samples, int sample_rate,
                         WavFormat format = WavFormat::Pcm16);

/// In-memory encoding used by write_wav; also handy for streaming sinks.
std::vector<unsigned char> encode_wav(std::span<const float> samples, int sample_rate, WavFormat format,
                                      std::size_t* clipped = nullptr);

/// Clamps to [-1, 1] and converts to little-endian signed 16-bit. Returns the clip count.
std::size_t to_pcm16(std::span<const float> in, std::span<short> out);

}  // namespace talagen
