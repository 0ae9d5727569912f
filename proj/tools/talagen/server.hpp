#pragma once

// HTTP + WebSocket front end. Static files are served for plain GET requests
// and `/ws` upgrades to a WebSocket carrying one JSON document per text frame.
// All socket work runs on the io_context thread; other threads talk to
// clients only through send() and broadcast(), which post to it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>

namespace talagen::cli {

struct ClientEvent {
    enum class Kind { Connected, Message, Disconnected };
    Kind kind = Kind::Message;
    std::uint64_t client = 0;
    std::string text;
};

class WsSession;

class Server {
public:
    using Handler = std::function<void(ClientEvent)>;

    /// Binds immediately; port 0 picks a free port. Throws on bind failure.
    Server(const std::string& address, unsigned short port, std::string index_html,
           std::optional<std::filesystem::path> web_root, Handler handler);
    ~Server();

    unsigned short port() const noexcept { return port_; }

    void start();  // spawns the network thread
    void stop();

    void send(std::uint64_t client, std::string text);
    void broadcast(std::string text);

    // Used by the connection classes.
    std::uint64_t attach(const std::shared_ptr<WsSession>& s);
    void detach(std::uint64_t id);
    void deliver(ClientEvent e) { handler_(std::move(e)); }
    std::optional<std::string> static_file(const std::string& target, std::string& content_type) const;

private:
    void accept();

    boost::asio::io_context io_;
    boost::asio::ip::tcp::acceptor acceptor_;
    unsigned short port_ = 0;
    std::string index_html_;
    std::optional<std::filesystem::path> web_root_;
    Handler handler_;
    std::thread thread_;

    std::mutex mutex_;
    std::uint64_t next_id_ = 1;
    std::unordered_map<std::uint64_t, std::weak_ptr<WsSession>> sessions_;
};

}  // namespace talagen::cli
