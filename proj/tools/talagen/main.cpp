#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace talagen::cli;

namespace {

void add_render_flags(CLI::App& cmd, RenderFlags& f) {
    cmd.add_option("--tala", f.tala, "Tala to play")->capture_default_str();
    cmd.add_option("--bpm", f.bpm, "Tempo in beats per minute, 10 to 350")->capture_default_str();
    cmd.add_option("--filler", f.filler, "Filler on the last beat of each call cycle (on/off)")->capture_default_str();
    cmd.add_option("--machine", f.machine, "JSON call-cycle layout; overrides --tala, --filler and --cycles");
    cmd.add_option("--cycles", f.cycles, "Cycles per call")->capture_default_str();
    cmd.add_option("--sample-rate", f.sample_rate, "44100 or 48000")->capture_default_str();
    cmd.add_option("--bank", f.bank, "Stroke bank directory (default $TALAGEN_BANK, else synthetic strokes)");
    cmd.add_option("--talas", f.talas, "Directory of tala definitions (default: built-in)");
    cmd.add_option("--pulse-fill", f.pulse_fill, "Subdivision ticks at slow tempi (on/off)")->capture_default_str();
    cmd.add_option("--pulse-below", f.pulse_below, "Tempo under which pulse fill applies")->capture_default_str();
    cmd.add_option("--pulse-gain", f.pulse_gain, "Pulse tick gain")->capture_default_str();
    cmd.add_option("--seed", f.seed, "Sequencer seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"talagen: tabla tala transcription, identification and playback"};
    app.require_subcommand(1);
    int code = 0;

    TranscribeOptions tr;
    auto* transcribe = app.add_subcommand("transcribe", "Label tabla strokes in a WAV recording");
    transcribe->add_option("input", tr.input, "WAV file")->required();
    transcribe->add_option("--bank", tr.bank, "Stroke bank directory used as templates");
    transcribe->add_option("-o,--out", tr.out, "CSV output (default stdout)");
    transcribe->add_option("--threshold", tr.threshold, "Onset peak threshold")->capture_default_str();
    transcribe->add_option("--min-gap", tr.min_gap, "Minimum onset spacing in seconds")->capture_default_str();
    transcribe->callback([&] { code = run_transcribe(tr); });

    IdentifyOptions id;
    auto* identify = app.add_subcommand("identify", "Rank talas for a transcription CSV");
    identify->add_option("input", id.input, "Transcription CSV ('-' for stdin)")->required();
    identify->add_option("--talas", id.talas, "Directory of tala definitions");
    identify->add_option("--method", id.method, "nw, ratio or both")->capture_default_str();
    identify->add_option("--format", id.format, "text or json")->capture_default_str();
    identify->callback([&] { code = run_identify(id); });

    EvaluateOptions ev;
    auto* evaluate = app.add_subcommand("evaluate", "Identification accuracy on a synthetic corpus");
    evaluate->add_option("--talas", ev.talas, "Directory of tala definitions");
    evaluate->add_option("--per-tala", ev.per_tala, "Items per tala")->capture_default_str();
    evaluate->add_option("--substitution", ev.substitution, "Stroke substitution probability")->capture_default_str();
    evaluate->add_option("--cycles", ev.cycles, "Cycles per item")->capture_default_str();
    evaluate->add_option("--seed", ev.seed, "Corpus seed")->capture_default_str();
    evaluate->add_option("--format", ev.format, "text or json")->capture_default_str();
    evaluate->callback([&] { code = run_evaluate(ev); });

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Render a tala to a WAV file");
    add_render_flags(*generate, gen.render);
    generate->add_option("--seconds", gen.seconds, "Duration")->required();
    generate->add_option("-o,--out", gen.out, "Output WAV")->required();
    generate->add_option("--format", gen.format, "pcm16 or float32")->capture_default_str();
    generate->callback([&] { code = run_generate(gen); });

    PlayOptions pl;
    auto* play = app.add_subcommand("play", "Stream a tala as raw s16le PCM in real time");
    add_render_flags(*play, pl.render);
    play->add_option("--seconds", pl.seconds, "Stop after this many seconds (0 plays until interrupted)");
    play->add_option("--command", pl.command, "Shell command receiving the PCM on stdin, e.g. 'aplay -f S16_LE -r 44100'");
    play->add_option("--block", pl.block, "Audio block size in samples")->capture_default_str();
    play->add_flag("--interactive", pl.interactive, "Read tempo commands and taps from stdin");
    play->callback([&] { code = run_play(pl); });

    ServeOptions sv;
    auto* serve = app.add_subcommand("serve", "Run the WebSocket service for the tap interface");
    serve->add_option("--address", sv.address, "Listen address")->capture_default_str();
    serve->add_option("--port", sv.port, "Listen port (0 picks a free one)")->capture_default_str();
    serve->add_option("--bank", sv.bank, "Stroke bank directory");
    serve->add_option("--talas", sv.talas, "Directory of tala definitions");
    serve->add_option("--tala", sv.tala, "Initially selected tala");
    serve->add_option("--filler", sv.filler, "Fillers at the end of call cycles (on/off)")->capture_default_str();
    serve->add_option("--pulse-fill", sv.pulse_fill, "Subdivision ticks at slow tempi (on/off)")->capture_default_str();
    serve->add_option("--sample-rate", sv.sample_rate, "44100 or 48000")->capture_default_str();
    serve->add_option("--block", sv.block, "Audio block size in samples")->capture_default_str();
    serve->add_option("--audio-command", sv.audio_command, "Shell command receiving s16le PCM on stdin");
    serve->add_option("--web-root", sv.web_root, "Serve static files from here instead of the built-in page");
    serve->add_option("--tap-estimator", sv.estimator, "last or average")->capture_default_str();
    serve->callback([&] { code = run_serve(sv); });

    std::string talas_dir;
    auto* talas = app.add_subcommand("talas", "List the available talas");
    talas->add_option("--talas", talas_dir, "Directory of tala definitions");
    talas->callback([&] { code = run_list_talas(talas_dir); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return code;
}
