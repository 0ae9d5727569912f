#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace talagen::cli {

struct TranscribeOptions {
    std::string input;
    std::string bank;
    std::string out;
    double threshold = 0.30;
    double min_gap = 0.050;
};

struct IdentifyOptions {
    std::string input;
    std::string talas;
    std::string method = "both";
    std::string format = "text";
};

struct EvaluateOptions {
    std::string talas;
    std::size_t per_tala = 25;
    double substitution = 0.0;
    std::size_t cycles = 4;
    std::uint64_t seed = 1;
    std::string format = "text";
};

struct RenderFlags {
    std::string tala = "tintal";
    double bpm = 60.0;
    std::string filler = "on";
    std::string machine;
    std::size_t cycles = 4;
    int sample_rate = 44100;
    std::string bank;
    std::string talas;
    std::string pulse_fill = "off";
    double pulse_below = 40.0;
    float pulse_gain = 0.25f;
    std::uint64_t seed = 0;
};

struct GenerateOptions {
    RenderFlags render;
    double seconds = 0.0;
    std::string out;
    std::string format = "pcm16";
};

struct PlayOptions {
    RenderFlags render;
    double seconds = 0.0;  // 0 plays until stopped
    std::string command;   // receives s16le mono PCM on stdin; empty writes to stdout
    std::size_t block = 512;
    bool interactive = false;
};

struct ServeOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;
    std::string bank;
    std::string talas;
    std::string tala;
    std::string filler = "on";
    std::string pulse_fill = "off";
    int sample_rate = 44100;
    std::size_t block = 512;
    std::string audio_command;
    std::string web_root;
    std::string estimator = "last";
};

// Each returns the process exit code.
int run_transcribe(const TranscribeOptions& o);
int run_identify(const IdentifyOptions& o);
int run_evaluate(const EvaluateOptions& o);
int run_generate(const GenerateOptions& o);
int run_play(const PlayOptions& o);
int run_serve(const ServeOptions& o);
int run_list_talas(const std::string& talas_dir);

}  // namespace talagen::cli
