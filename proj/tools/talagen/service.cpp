#include "service.hpp"

#include "web_assets.hpp"

namespace talagen::cli {

const std::string& embedded_index_html() {
    static const std::string html(kIndexHtml);
    return html;
}

Service::Service(ServiceConfig config, std::vector<TalaDefinition> talas, std::shared_ptr<const StrokeSampleBank> bank)
    : config_(std::move(config)),
      engine_({bank->sample_rate(), config_.block, config_.pace, config_.audio_sink}),
      session_(config_.session, std::move(talas), bank, engine_),
      server_(config_.address, config_.port, embedded_index_html(), config_.web_root,
              [this](ClientEvent e) { on_client(std::move(e)); }),
      epoch_(std::chrono::steady_clock::now()) {}

Service::~Service() { stop(); }

double Service::now_sec() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_).count();
}

unsigned short Service::start() {
    engine_.start();
    control_ = std::thread([this] { control_loop(); });
    server_.start();
    return server_.port();
}

void Service::stop() {
    if (!control_.joinable()) {
        return;
    }
    server_.stop();
    {
        std::lock_guard lock(mutex_);
        quit_ = true;
    }
    wake_.notify_all();
    control_.join();
    engine_.shutdown();
}

void Service::on_client(ClientEvent e) {
    const double arrival = now_sec();
    {
        std::lock_guard lock(mutex_);
        inbox_.push_back({std::move(e), arrival});
    }
    wake_.notify_one();
}

void Service::dispatch(std::vector<Outgoing>& out) {
    for (auto& o : out) {
        if (o.to) {
            server_.send(*o.to, std::move(o.text));
        } else {
            server_.broadcast(std::move(o.text));
        }
    }
    out.clear();
}

void Service::control_loop() {
    std::vector<Outgoing> out;
    std::deque<Pending> batch;
    while (true) {
        {
            std::unique_lock lock(mutex_);
            wake_.wait_for(lock, std::chrono::milliseconds(2), [this] { return quit_ || !inbox_.empty(); });
            if (quit_) {
                break;
            }
            batch.swap(inbox_);
        }
        for (auto& p : batch) {
            switch (p.event.kind) {
                case ClientEvent::Kind::Connected:
                    session_.connect(p.event.client, out);
                    break;
                case ClientEvent::Kind::Message:
                    session_.handle(p.event.client, p.event.text, p.arrival, out);
                    break;
                case ClientEvent::Kind::Disconnected:
                    break;  // playback is independent of clients
            }
            dispatch(out);
        }
        batch.clear();
        session_.poll(out);
        dispatch(out);
    }
}

}  // namespace talagen::cli
