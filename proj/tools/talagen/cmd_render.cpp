#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "commands.hpp"
#include "common.hpp"
#include "engine.hpp"
#include "service.hpp"
#include "talagen/error.hpp"
#include "talagen/machine.hpp"
#include "talagen/render.hpp"
#include "talagen/tempo.hpp"

namespace talagen::cli {

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

void install_signal_handlers() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::signal(SIGPIPE, SIG_IGN);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

PulseFill pulse_of(const RenderFlags& f) {
    PulseFill p;
    p.enabled = parse_switch(f.pulse_fill, "--pulse-fill");
    p.below_bpm = f.pulse_below;
    p.gain = f.pulse_gain;
    return p;
}

struct Prepared {
    std::vector<TalaDefinition> talas;
    std::shared_ptr<const StrokeSampleBank> bank;
    std::optional<BuiltMachine> machine;
    std::string description;
};

Prepared prepare(const RenderFlags& f) {
    validate(RenderState{0, f.bpm, f.sample_rate});
    Prepared p;
    p.talas = load_talas(f.talas);
    p.bank = load_bank(f.bank, f.sample_rate, p.talas);
    if (!f.machine.empty()) {
        p.machine.emplace(build_machine(parse_machine_layout(read_file(f.machine)), p.talas));
        p.description = f.machine;
    } else {
        const auto& tala = require_tala(p.talas, f.tala);
        if (f.cycles == 0) {
            throw Error("--cycles must be at least 1");
        }
        p.machine.emplace(
            build_machine(default_layout(tala, f.cycles, parse_switch(f.filler, "--filler")), p.talas));
        p.description = tala.name;
    }
    return p;
}

std::unique_ptr<SequenceStream> stream_of(const Prepared& p, std::uint64_t seed) {
    return std::make_unique<SequenceStream>(std::make_shared<const Wfst>(p.machine->machine), seed,
                                            p.machine->cycle_beats);
}

}  // namespace

int run_generate(const GenerateOptions& o) {
    if (o.out.empty()) {
        throw Error("--out is required");
    }
    WavFormat format;
    if (o.format == "pcm16") {
        format = WavFormat::Pcm16;
    } else if (o.format == "float32") {
        format = WavFormat::Float32;
    } else {
        throw Error("--format must be pcm16 or float32");
    }
    const auto p = prepare(o.render);
    auto stream = stream_of(p, o.render.seed);
    RenderReport report;
    const auto audio = render_sequence(*stream, o.render.bpm, o.seconds, *p.bank, pulse_of(o.render), &report);
    const auto written = write_wav(o.out, audio, p.bank->sample_rate(), format);
    std::cout << std::fixed << std::setprecision(3) << "wrote " << o.out << ": " << p.description << ", "
              << static_cast<double>(report.samples) / p.bank->sample_rate() << " s, " << report.beats << " beats, "
              << report.schedule.size() << " strokes, " << p.bank->sample_rate() << " Hz, " << written.clipped
              << " clipped samples\n";
    return 0;
}

int run_play(const PlayOptions& o) {
    if (o.seconds < 0.0) {
        throw Error("--seconds must not be negative");
    }
    const auto p = prepare(o.render);
    std::FILE* sink = stdout;
    if (!o.command.empty()) {
        sink = ::popen(o.command.c_str(), "w");
        if (sink == nullptr) {
            throw Error("cannot start audio command: " + o.command);
        }
    } else if (::isatty(STDOUT_FILENO)) {
        throw Error("refusing to write raw audio to a terminal; pipe stdout to a player or pass --command");
    }
    install_signal_handlers();

    std::cerr << "playing " << p.description << " at " << o.render.bpm << " BPM, " << p.bank->sample_rate()
              << " Hz s16le mono\n";
    AudioEngine engine({p.bank->sample_rate(), o.block, 1.0, sink});
    auto renderer = std::make_unique<StreamingRenderer>(stream_of(p, o.render.seed), p.bank,
                                                        RenderState{0, o.render.bpm, p.bank->sample_rate()},
                                                        pulse_of(o.render));
    engine.submit(renderer.get(), 1);
    engine.start();

    // stdin lines control playback when --interactive: +1 -1 +5 -5 double
    // half, "bpm X", "tap" and "stop".
    std::atomic<bool> stop_requested{false};
    std::thread reader;
    if (o.interactive) {
        reader = std::thread([&] {
            TempoState tempo{o.render.bpm, TempoSource::Default};
            TapHistory taps;
            const auto epoch = std::chrono::steady_clock::now();
            std::string line;
            while (!stop_requested.load() && std::getline(std::cin, line)) {
                std::optional<TempoState> next;
                if (line == "stop" || line == "q") {
                    break;
                } else if (line == "tap" || line.empty()) {
                    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch).count();
                    next = register_tap(taps, t);
                    if (!next) {
                        std::cerr << "tap " << taps.size() << "/3\n";
                    }
                } else if (line.rfind("bpm ", 0) == 0) {
                    try {
                        next = apply_adjustment(tempo, {TempoAdjustment::Kind::Set, std::stod(line.substr(4))});
                    } catch (const std::exception&) {
                        std::cerr << "usage: bpm <number>\n";
                    }
                } else if (const auto adj = parse_adjustment(line)) {
                    next = apply_adjustment(tempo, *adj);
                } else {
                    std::cerr << "commands: +1 -1 +5 -5 double half, bpm <x>, tap (or empty line), stop\n";
                }
                if (next) {
                    tempo = *next;
                    renderer->set_bpm(tempo.bpm);
                    std::cerr << "tempo " << tempo.bpm << " BPM (" << to_string(tempo.source) << ")\n";
                }
            }
            stop_requested.store(true);
        });
    }

    const auto started = std::chrono::steady_clock::now();
    bool stopping = false;
    while (true) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        AudioEvent e;
        bool finished = false;
        while (engine.poll(e)) {
            finished = finished || e.kind == AudioEvent::Kind::Finished;
        }
        const bool timed_out = o.seconds > 0.0 && std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                                               started).count() >= o.seconds;
        if (!stopping && (timed_out || g_interrupted.load() || stop_requested.load() || engine.sink_failed())) {
            renderer->stop();
            stopping = true;
        }
        if (finished || engine.sink_failed() || (stopping && g_interrupted.load() && engine.released() != nullptr)) {
            break;
        }
    }
    engine.shutdown();
    stop_requested.store(true);
    if (reader.joinable()) {
        if (!o.interactive || std::cin.eof()) {
            reader.join();
        } else {
            reader.detach();  // blocked on stdin; the process is exiting
        }
    }
    if (sink != stdout) {
        ::pclose(sink);
    }
    std::cerr << engine.clipped() << " clipped samples\n";
    return 0;
}

int run_list_talas(const std::string& talas_dir) {
    for (const auto& t : load_talas(talas_dir)) {
        std::cout << std::left << std::setw(12) << t.name << std::right << std::setw(3) << t.beats() << " beats, "
                  << std::setw(2) << t.strokes() << " strokes, vibhags";
        for (std::size_t k = 0; k < t.theka.vibhags.size(); ++k) {
            std::cout << (k == 0 ? " " : "|") << t.theka.vibhags[k];
        }
        std::cout << "\n";
    }
    return 0;
}

int run_serve(const ServeOptions& o) {
    auto talas = load_talas(o.talas);
    const auto bank = load_bank(o.bank, o.sample_rate, talas);
    validate(RenderState{0, 60, bank->sample_rate()});

    ServiceConfig config;
    config.address = o.address;
    config.port = o.port;
    config.block = o.block;
    config.session.tala = o.tala;
    config.session.filler = parse_switch(o.filler, "--filler");
    config.session.pulse.enabled = parse_switch(o.pulse_fill, "--pulse-fill");
    if (o.estimator == "average") {
        config.session.estimator = TapEstimator::MovingAverage;
    } else if (o.estimator != "last") {
        throw Error("--tap-estimator must be last or average");
    }
    if (!o.web_root.empty()) {
        config.web_root = o.web_root;
    }
    std::FILE* sink = nullptr;
    if (!o.audio_command.empty()) {
        sink = ::popen(o.audio_command.c_str(), "w");
        if (sink == nullptr) {
            throw Error("cannot start audio command: " + o.audio_command);
        }
        config.audio_sink = sink;
    }
    install_signal_handlers();

    {
        Service service(config, std::move(talas), bank);
        const auto port = service.start();
        std::cout << "listening on http://" << o.address << ":" << port << "/ (WebSocket /ws)" << std::endl;
        while (!g_interrupted.load()) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        std::cerr << "shutting down\n";
        service.stop();
    }
    if (sink != nullptr) {
        ::pclose(sink);
    }
    return 0;
}

}  // namespace talagen::cli
