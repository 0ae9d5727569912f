#include "talagen/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "talagen/error.hpp"

namespace talagen {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
    }
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xFF));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

float decode_sample(const unsigned char* p, std::uint16_t format, std::uint16_t bits) {
    if (format == kFormatFloat) {
        if (bits == 32) {
            float f;
            std::uint32_t raw = u32(p);
            std::memcpy(&f, &raw, sizeof f);
            return f;
        }
        std::uint64_t raw = static_cast<std::uint64_t>(u32(p)) | (static_cast<std::uint64_t>(u32(p + 4)) << 32);
        double d;
        std::memcpy(&d, &raw, sizeof d);
        return static_cast<float>(d);
    }
    switch (bits) {
        case 8: return (static_cast<float>(p[0]) - 128.0f) / 128.0f;
        case 16: return static_cast<float>(static_cast<std::int16_t>(u16(p))) / 32768.0f;
        case 24: {
            std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
            if (v & 0x800000) {
                v |= ~0xFFFFFF;
            }
            return static_cast<float>(v) / 8388608.0f;
        }
        case 32: return static_cast<float>(static_cast<std::int32_t>(u32(p)) / 2147483648.0);
        default: break;
    }
    throw Error("unsupported WAV bit depth " + std::to_string(bits));
}

// Full-scale 1.0 maps to 32768 and is clamped to 32767, matching the 1/32768
// scale used when reading.
std::int16_t pcm16_sample(float s) {
    return static_cast<std::int16_t>(std::clamp<long>(std::lround(s * 32768.0f), -32768, 32767));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open WAV file " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto fail = [&](const std::string& why) { return Error(path.string() + ": " + why); };
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw fail("not a RIFF/WAVE file");
    }

    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::size_t size = u32(chunk + 4);
        const std::size_t body = pos + 8;
        const std::size_t available = std::min(size, bytes.size() - body);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (available < 16) {
                throw fail("truncated fmt chunk");
            }
            format = u16(chunk + 8);
            channels = u16(chunk + 10);
            rate = u32(chunk + 12);
            bits = u16(chunk + 22);
            if (format == kFormatExtensible && available >= 26) {
                format = u16(chunk + 8 + 24);
            }
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = available;
        }
        pos = body + size + (size & 1);
    }
    if (format == 0 || data == nullptr) {
        throw fail("missing fmt or data chunk");
    }
    if (format != kFormatPcm && format != kFormatFloat) {
        throw fail("unsupported WAV format tag " + std::to_string(format));
    }
    if (channels == 0 || bits == 0 || bits % 8 != 0 || rate == 0) {
        throw fail("invalid fmt chunk");
    }

    const std::size_t width = bits / 8u;
    const std::size_t frame_bytes = width * channels;
    const std::size_t frames = data_size / frame_bytes;
    Waveform out;
    out.sample_rate = static_cast<int>(rate);
    out.samples.resize(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        float acc = 0.0f;
        for (std::size_t c = 0; c < channels; ++c) {
            acc += decode_sample(data + f * frame_bytes + c * width, format, bits);
        }
        out.samples[f] = acc / static_cast<float>(channels);
    }
    return out;
}

std::size_t to_pcm16(std::span<const float> in, std::span<short> out) {
    std::size_t clipped = 0;
    const std::size_t n = std::min(in.size(), out.size());
    for (std::size_t i = 0; i < n; ++i) {
        float s = in[i];
        if (s > 1.0f || s < -1.0f) {
            ++clipped;
            s = std::clamp(s, -1.0f, 1.0f);
        }
        out[i] = pcm16_sample(s);
    }
    return clipped;
}

std::vector<unsigned char> encode_wav(std::span<const float> samples, int sample_rate, WavFormat format,
                                      std::size_t* clipped) {
    const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * (bits / 8u));
    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, format == WavFormat::Pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(out, 1);
    put_u32(out, static_cast<std::uint32_t>(sample_rate));
    put_u32(out, static_cast<std::uint32_t>(sample_rate) * (bits / 8u));
    put_u16(out, bits / 8u);
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_bytes);

    std::size_t clip_count = 0;
    for (float s : samples) {
        if (s > 1.0f || s < -1.0f) {
            ++clip_count;
            s = std::clamp(s, -1.0f, 1.0f);
        }
        if (format == WavFormat::Pcm16) {
            put_u16(out, static_cast<std::uint16_t>(pcm16_sample(s)));
        } else {
            std::uint32_t raw;
            std::memcpy(&raw, &s, sizeof raw);
            put_u32(out, raw);
        }
    }
    if (clipped) {
        *clipped = clip_count;
    }
    return out;
}

WavWriteReport write_wav(const std::filesystem::path& path, std::span<const float> samples, int sample_rate,
                         WavFormat format) {
    WavWriteReport report;
    report.frames = samples.size();
    const auto bytes = encode_wav(samples, sample_rate, format, &report.clipped);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write WAV file " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write failed for " + path.string());
    }
    return report;
}

}  // namespace talagen
