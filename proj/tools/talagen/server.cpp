#include "server.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include <boost/asio/dispatch.hpp>
#include <boost/asio/post.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "talagen/error.hpp"

namespace talagen::cli {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

class WsSession : public std::enable_shared_from_this<WsSession> {
public:
    WsSession(tcp::socket&& socket, Server& server) : ws_(std::move(socket)), server_(server) {}

    void run(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
    }

    void send(std::shared_ptr<const std::string> text) {
        net::post(ws_.get_executor(), [self = shared_from_this(), text] {
            self->queue_.push_back(text);
            if (self->queue_.size() == 1) {
                self->write_next();
            }
        });
    }

    void close() {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            beast::error_code ec;
            beast::get_lowest_layer(self->ws_).socket().close(ec);
        });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) {
            return;
        }
        id_ = server_.attach(shared_from_this());
        server_.deliver({ClientEvent::Kind::Connected, id_, {}});
        read();
    }

    void read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            server_.detach(id_);
            server_.deliver({ClientEvent::Kind::Disconnected, id_, {}});
            return;
        }
        server_.deliver({ClientEvent::Kind::Message, id_, beast::buffers_to_string(buffer_.data())});
        buffer_.consume(buffer_.size());
        read();
    }

    void write_next() {
        ws_.text(true);
        ws_.async_write(net::buffer(*queue_.front()),
                        beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) {
            queue_.clear();
            return;
        }
        queue_.pop_front();
        if (!queue_.empty()) {
            write_next();
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    Server& server_;
    beast::flat_buffer buffer_;
    std::deque<std::shared_ptr<const std::string>> queue_;
    std::uint64_t id_ = 0;
};

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
public:
    HttpSession(tcp::socket&& socket, Server& server) : stream_(std::move(socket)), server_(server) {}

    void run() {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::read, shared_from_this()));
    }

private:
    void read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            return;
        }
        if (websocket::is_upgrade(req_)) {
            if (req_.target() == "/ws") {
                stream_.expires_never();
                std::make_shared<WsSession>(stream_.release_socket(), server_)->run(std::move(req_));
                return;
            }
            respond(http::status::not_found, "text/plain", "WebSocket endpoint is /ws\n");
            return;
        }
        if (req_.method() != http::verb::get && req_.method() != http::verb::head) {
            respond(http::status::method_not_allowed, "text/plain", "only GET is supported\n");
            return;
        }
        std::string type;
        if (auto body = server_.static_file(std::string(req_.target()), type)) {
            respond(http::status::ok, type, std::move(*body));
        } else {
            respond(http::status::not_found, "text/plain", "not found\n");
        }
    }

    void respond(http::status status, const std::string& type, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
        res->set(http::field::server, "talagen");
        res->set(http::field::content_type, type);
        res->set(http::field::cache_control, "no-store");
        res->keep_alive(req_.keep_alive());
        if (req_.method() != http::verb::head) {
            res->body() = std::move(body);
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec || !res->keep_alive()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->read();
        });
    }

    beast::tcp_stream stream_;
    Server& server_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
};

std::string mime_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
    if (ext == ".css") return "text/css; charset=utf-8";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    if (ext == ".ico") return "image/x-icon";
    return "application/octet-stream";
}

}  // namespace

Server::Server(const std::string& address, unsigned short port, std::string index_html,
               std::optional<std::filesystem::path> web_root, Handler handler)
    : acceptor_(io_), index_html_(std::move(index_html)), web_root_(std::move(web_root)), handler_(std::move(handler)) {
    beast::error_code ec;
    const tcp::endpoint endpoint(net::ip::make_address(address, ec), port);
    if (ec) {
        throw Error("invalid bind address '" + address + "'");
    }
    acceptor_.open(endpoint.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(endpoint, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) {
        throw Error("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
    }
    port_ = acceptor_.local_endpoint().port();
}

Server::~Server() { stop(); }

void Server::start() {
    accept();
    thread_ = std::thread([this] { io_.run(); });
}

void Server::stop() {
    if (!thread_.joinable()) {
        return;
    }
    net::post(io_, [this] {
        beast::error_code ec;
        acceptor_.close(ec);
        std::lock_guard lock(mutex_);
        for (auto& [id, weak] : sessions_) {
            if (auto s = weak.lock()) {
                s->close();
            }
        }
    });
    // Give sessions a moment to close cleanly before the loop is stopped.
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    io_.stop();
    thread_.join();
}

void Server::accept() {
    acceptor_.async_accept(net::make_strand(io_), [this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            if (ec == net::error::operation_aborted || !acceptor_.is_open()) {
                return;
            }
        } else {
            // Beat events are small and latency matters more than packing.
            socket.set_option(tcp::no_delay(true), ec);
            std::make_shared<HttpSession>(std::move(socket), *this)->run();
        }
        accept();
    });
}

std::uint64_t Server::attach(const std::shared_ptr<WsSession>& s) {
    std::lock_guard lock(mutex_);
    const auto id = next_id_++;
    sessions_[id] = s;
    return id;
}

void Server::detach(std::uint64_t id) {
    std::lock_guard lock(mutex_);
    sessions_.erase(id);
}

void Server::send(std::uint64_t client, std::string text) {
    auto shared = std::make_shared<const std::string>(std::move(text));
    std::lock_guard lock(mutex_);
    if (auto it = sessions_.find(client); it != sessions_.end()) {
        if (auto s = it->second.lock()) {
            s->send(shared);
        }
    }
}

void Server::broadcast(std::string text) {
    auto shared = std::make_shared<const std::string>(std::move(text));
    std::lock_guard lock(mutex_);
    for (auto& [id, weak] : sessions_) {
        if (auto s = weak.lock()) {
            s->send(shared);
        }
    }
}

std::optional<std::string> Server::static_file(const std::string& target, std::string& content_type) const {
    std::string path = target.substr(0, target.find_first_of("?#"));
    if (path == "/" || path == "/index.html") {
        if (web_root_ && std::filesystem::exists(*web_root_ / "index.html")) {
            path = "/index.html";
        } else {
            content_type = "text/html; charset=utf-8";
            return index_html_;
        }
    }
    if (!web_root_ || path.find("..") != std::string::npos || path.empty() || path[0] != '/') {
        return std::nullopt;
    }
    const auto file = *web_root_ / path.substr(1);
    std::ifstream in(file, std::ios::binary);
    if (!in || std::filesystem::is_directory(file)) {
        return std::nullopt;
    }
    std::ostringstream body;
    body << in.rdbuf();
    content_type = mime_type(file);
    return body.str();
}

}  // namespace talagen::cli
