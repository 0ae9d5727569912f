#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "engine.hpp"
#include "server.hpp"
#include "session.hpp"

namespace talagen::cli {

struct ServiceConfig {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;
    std::size_t block = 512;
    double pace = 1.0;
    std::FILE* audio_sink = nullptr;
    std::optional<std::filesystem::path> web_root;
    SessionConfig session;
};

/// The built-in single-page control UI.
const std::string& embedded_index_html();

class Service {
public:
    Service(ServiceConfig config, std::vector<TalaDefinition> talas, std::shared_ptr<const StrokeSampleBank> bank);
    ~Service();

    /// Starts the audio, control and network threads; returns the bound port.
    unsigned short start();
    void stop();

private:
    void on_client(ClientEvent e);
    void control_loop();
    void dispatch(std::vector<Outgoing>& out);
    double now_sec() const;

    ServiceConfig config_;
    AudioEngine engine_;
    Session session_;
    Server server_;
    std::chrono::steady_clock::time_point epoch_;

    std::mutex mutex_;
    std::condition_variable wake_;
    struct Pending {
        ClientEvent event;
        double arrival = 0.0;
    };
    std::deque<Pending> inbox_;
    bool quit_ = false;
    std::thread control_;
};

}  // namespace talagen::cli
