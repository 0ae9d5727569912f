// Drives the live service over real sockets with a WebSocket client.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include "json.hpp"

#include "doctest.h"
#include "common.hpp"
#include "service.hpp"
#include "talagen/rhythm.hpp"

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using nlohmann::json;
using talagen::cli::Service;
using talagen::cli::ServiceConfig;
using Clock = std::chrono::steady_clock;

namespace {

std::shared_ptr<const talagen::StrokeSampleBank> bank_for(const std::vector<talagen::TalaDefinition>& talas) {
    return talagen::cli::load_bank("", 44100, talas);
}

class Client {
public:
    explicit Client(unsigned short port) : ws_(io_) {
        asio::ip::tcp::resolver resolver(io_);
        beast::get_lowest_layer(ws_).connect(resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/ws");
    }

    ~Client() {
        beast::error_code ec;
        ws_.close(websocket::close_code::normal, ec);
    }

    void send(const json& j) { ws_.write(asio::buffer(j.dump())); }
    void send_raw(const std::string& s) { ws_.write(asio::buffer(s)); }

    /// Next message, or nullopt after `timeout`.
    std::optional<json> next(std::chrono::milliseconds timeout = std::chrono::milliseconds(3000)) {
        if (!pending_) {
            buffer_.consume(buffer_.size());
            pending_ = true;
            done_ = false;
            ws_.async_read(buffer_, [this](beast::error_code ec, std::size_t) {
                done_ = true;
                error_ = ec;
            });
        }
        io_.restart();
        io_.run_for(timeout);
        if (!done_) {
            return std::nullopt;
        }
        pending_ = false;
        REQUIRE_MESSAGE(!error_, error_.message());
        arrival_ = Clock::now();
        return json::parse(beast::buffers_to_string(buffer_.data()));
    }

    /// Skips messages until one of `type` arrives, collecting the skipped ones.
    json expect(const std::string& type, std::vector<json>* skipped = nullptr,
                std::chrono::milliseconds timeout = std::chrono::milliseconds(3000)) {
        const auto deadline = Clock::now() + timeout;
        while (Clock::now() < deadline) {
            auto m = next(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()));
            if (!m) {
                break;
            }
            if ((*m)["type"] == type) {
                return *m;
            }
            if (skipped != nullptr) {
                skipped->push_back(*m);
            }
        }
        FAIL("no '" << type << "' message before the timeout");
        return {};
    }

    /// Next message that is not a beat event.
    json next_status() {
        while (true) {
            auto m = next();
            REQUIRE(m.has_value());
            if ((*m)["type"] != "beat") {
                return *m;
            }
        }
    }

    Clock::time_point arrival() const { return arrival_; }

private:
    asio::io_context io_;
    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    bool pending_ = false;
    bool done_ = false;
    beast::error_code error_;
    Clock::time_point arrival_{};
};

struct Fixture {
    explicit Fixture(double pace = 1.0, std::size_t block = 512) {
        ServiceConfig config;
        config.port = 0;
        config.pace = pace;
        config.block = block;
        auto talas = talagen::builtin_talas();
        auto bank = bank_for(talas);
        service = std::make_unique<Service>(config, std::move(talas), bank);
        port = service->start();
    }
    ~Fixture() { service->stop(); }

    std::unique_ptr<Service> service;
    unsigned short port = 0;
};

std::string http_get(unsigned short port, const std::string& target, unsigned& status) {
    asio::io_context io;
    beast::tcp_stream stream(io);
    asio::ip::tcp::resolver resolver(io);
    stream.connect(resolver.resolve("127.0.0.1", std::to_string(port)));
    http::request<http::empty_body> req{http::verb::get, target, 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(stream, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(stream, buffer, res);
    status = res.result_int();
    beast::error_code ec;
    stream.socket().shutdown(asio::ip::tcp::socket::shutdown_both, ec);
    return res.body();
}

}  // namespace

TEST_CASE("a new client receives a snapshot of the session") {
    Fixture f;
    Client c(f.port);
    const auto s = c.expect("snapshot");
    CHECK(s["tala"]["name"] == "tintal");
    CHECK(s["tala"]["beats"] == 16);
    CHECK(s["tala"]["vibhags"] == json::array({4, 4, 4, 4}));
    CHECK(s["talas"].size() == talagen::builtin_talas().size());
    CHECK(s["bpm"] == 60.0);
    CHECK(s["source"] == "default");
    CHECK(s["playing"] == false);
    CHECK(s["filler"] == true);
    CHECK(s["taps"] == 0);
    CHECK(s["sample_rate"] == 44100);
}

TEST_CASE("the static UI is served at / and unknown paths are 404") {
    Fixture f;
    unsigned status = 0;
    const auto body = http_get(f.port, "/", status);
    CHECK(status == 200);
    CHECK(body.find("<html") != std::string::npos);
    CHECK(body.find("/ws") != std::string::npos);
    http_get(f.port, "/missing.js", status);
    CHECK(status == 404);
}

TEST_CASE("a second service cannot bind a port in use") {
    Fixture f;
    ServiceConfig config;
    config.port = f.port;
    auto talas = talagen::builtin_talas();
    auto bank = bank_for(talas);
    CHECK_THROWS(Service(config, talas, bank));
}

TEST_CASE("an unknown tala name is an error listing the available names") {
    Fixture f;
    Client c(f.port);
    c.expect("snapshot");
    c.send({{"type", "select_tala"}, {"name", "dadra"}, {"id", 7}});
    const auto e = c.next_status();
    REQUIRE(e["type"] == "error");
    CHECK(e["id"] == 7);
    const std::string text = e["text"];
    for (const auto& t : talagen::builtin_talas()) {
        CHECK(text.find(t.name) != std::string::npos);
    }
    CHECK(e["talas"].size() == talagen::builtin_talas().size());

    c.send({{"type", "snapshot"}});
    c.expect("ack");
    CHECK(c.expect("snapshot")["tala"]["name"] == "tintal");
}

TEST_CASE("malformed messages produce errors and leave the session usable") {
    Fixture f;
    Client c(f.port);
    c.expect("snapshot");
    for (const std::string bad : {"{not json", "[1,2]", R"({"type":5})", R"({"type":"dance"})",
                                  R"({"type":"set_bpm","bpm":"fast"})", R"({"type":"adjust","action":"+2"})",
                                  R"({"type":"set_filler","on":"yes"})", R"({"type":"tap","t":"now"})"}) {
        CAPTURE(bad);
        c.send_raw(bad);
        CHECK(c.next_status()["type"] == "error");
    }
    c.send({{"type", "set_bpm"}, {"bpm", 90}});
    const auto ack = c.next_status();
    CHECK(ack["type"] == "ack");
    CHECK(ack["of"] == "set_bpm");
    const auto tempo = c.next_status();
    CHECK(tempo["type"] == "tempo");
    CHECK(tempo["bpm"] == 90.0);
    CHECK(tempo["source"] == "text");
}

TEST_CASE("errors go only to the sender while status events reach every client") {
    Fixture f;
    Client a(f.port), b(f.port);
    a.expect("snapshot");
    b.expect("snapshot");
    a.send_raw("oops");
    CHECK(a.next_status()["type"] == "error");
    a.send({{"type", "adjust"}, {"action", "double"}});
    CHECK(a.next_status()["type"] == "ack");
    CHECK(a.next_status()["bpm"] == 120.0);
    const auto seen = b.next_status();
    CHECK(seen["type"] == "tempo");
    CHECK(seen["bpm"] == 120.0);
    CHECK(seen["source"] == "buttons");
}

TEST_CASE("stop is idempotent") {
    Fixture f;
    Client c(f.port);
    c.expect("snapshot");
    for (int k = 0; k < 2; ++k) {
        c.send({{"type", "stop"}});
        const auto ack = c.next_status();
        CHECK(ack["type"] == "ack");
        CHECK(ack["of"] == "stop");
        CHECK(c.next_status()["type"] == "stopped");
    }
    c.send({{"type", "start"}});
    CHECK(c.next_status()["of"] == "start");
    c.expect("beat");
    c.send({{"type", "stop"}});
    CHECK(c.next_status()["of"] == "stop");
    CHECK(c.next_status()["type"] == "stopped");
    c.send({{"type", "stop"}});
    CHECK(c.next_status()["of"] == "stop");
    CHECK(c.next_status()["type"] == "stopped");
    c.send({{"type", "snapshot"}});
    c.expect("ack");
    CHECK(c.expect("snapshot")["playing"] == false);
}

TEST_CASE("three taps half a second apart set 120 BPM from the next beat boundary") {
    Fixture f(4.0);  // four times real time; sample positions are unaffected
    Client c(f.port);
    c.expect("snapshot");
    c.send({{"type", "select_tala"}, {"name", "tintal"}});
    CHECK(c.next_status()["of"] == "select_tala");
    CHECK(c.next_status()["type"] == "tala");
    c.send({{"type", "start"}});
    CHECK(c.next_status()["of"] == "start");

    std::vector<json> beats;
    beats.push_back(c.expect("beat"));
    CHECK(beats.front()["i"] == 0);
    CHECK(beats.front()["sam"] == true);

    const double t0 = 100.0;
    for (int k = 0; k < 3; ++k) {
        c.send({{"type", "tap"}, {"t", t0 + 0.5 * k}});
        std::vector<json> skipped;
        const auto ack = c.expect("ack", &skipped);
        beats.insert(beats.end(), skipped.begin(), skipped.end());
        CHECK(ack["of"] == "tap");
        CHECK(ack["accepted"] == true);
        CHECK(ack["taps"] == k + 1);
        CHECK(ack["need"] == (k < 2 ? 2 - k : 0));
    }
    std::vector<json> skipped;
    const auto tempo = c.expect("tempo", &skipped);
    beats.insert(beats.end(), skipped.begin(), skipped.end());
    CHECK(tempo["bpm"] == doctest::Approx(120.0));
    CHECK(tempo["source"] == "tap");

    while (beats.back()["bpm"] != 120.0) {
        beats.push_back(c.expect("beat"));
    }
    for (int k = 0; k < 3; ++k) {
        beats.push_back(c.expect("beat"));
    }

    std::size_t change = 0;
    for (std::size_t k = 0; k < beats.size(); ++k) {
        CAPTURE(k);
        REQUIRE(beats[k]["type"] == "beat");
        CHECK(beats[k]["i"] == k);
        CHECK(beats[k]["pos"] == k % 16);
        CHECK(beats[k]["sam"] == (k % 16 == 0));
        if (change == 0 && beats[k]["bpm"] == 120.0) {
            change = k;
        }
    }
    REQUIRE(change > 0);
    for (std::size_t k = 1; k < beats.size(); ++k) {
        CAPTURE(k);
        const std::int64_t gap = beats[k]["n"].get<std::int64_t>() - beats[k - 1]["n"].get<std::int64_t>();
        // Beat `change` is the first laid out at the new tempo, so the gap
        // into it still belongs to the old one.
        CHECK(gap == (k <= change ? 44100 : 22050));
    }
}

TEST_CASE("beat events arrive on the beat grid within one audio block") {
    constexpr std::size_t kBlock = 512;
    Fixture f(1.0, kBlock);
    Client c(f.port);
    c.expect("snapshot");
    c.send({{"type", "set_bpm"}, {"bpm", 240}});
    c.expect("tempo");
    c.send({{"type", "start"}});

    std::vector<double> arrivals;
    std::vector<std::int64_t> samples;
    while (arrivals.size() < 12) {
        const auto b = c.expect("beat");
        arrivals.push_back(std::chrono::duration<double>(c.arrival().time_since_epoch()).count());
        samples.push_back(b["n"].get<std::int64_t>());
    }
    const double period = 60.0 / 240.0;
    double mean = 0.0;
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
        CHECK(samples[k] == static_cast<std::int64_t>(k) * 11025);
        mean += arrivals[k] - k * period;
    }
    mean /= static_cast<double>(arrivals.size());
    const double block_sec = static_cast<double>(kBlock) / 44100.0;
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
        CAPTURE(k);
        CHECK(std::abs(arrivals[k] - k * period - mean) <= block_sec);
    }
}

TEST_CASE("playback survives client disconnects and is visible on reconnect") {
    Fixture f(4.0);
    {
        Client c(f.port);
        c.expect("snapshot");
        c.send({{"type", "start"}});
        c.expect("beat");
    }
    Client again(f.port);
    const auto s = again.expect("snapshot");
    CHECK(s["playing"] == true);
    const auto first = again.expect("beat");
    const auto second = again.expect("beat");
    CHECK(second["i"].get<int>() == first["i"].get<int>() + 1);
}

TEST_CASE("acks precede the status events they cause and echo ids") {
    Fixture f(4.0);
    Client c(f.port);
    c.expect("snapshot");
    c.send({{"type", "start"}, {"id", "s1"}});
    auto ack = c.next_status();
    CHECK(ack["of"] == "start");
    CHECK(ack["id"] == "s1");
    c.send({{"type", "adjust"}, {"action", "+5"}, {"id", 2}});
    ack = c.next_status();
    CHECK(ack["of"] == "adjust");
    CHECK(ack["id"] == 2);
    const auto tempo = c.next_status();
    CHECK(tempo["type"] == "tempo");
    CHECK(tempo["bpm"] == 65.0);
    c.send({{"type", "set_filler"}, {"on", false}});
    ack = c.next_status();
    CHECK(ack["of"] == "set_filler");
    CHECK(ack["on"] == false);
    c.send({{"type", "select_tala"}, {"name", "rupak"}});
    CHECK(c.next_status()["of"] == "select_tala");
    const auto tala = c.next_status();
    CHECK(tala["type"] == "tala");
    CHECK(tala["tala"]["beats"] == 7);
    c.send({{"type", "tap"}, {"t", 5.0}});
    c.send({{"type", "tap"}, {"t", 4.0}});
    CHECK(c.next_status()["accepted"] == true);
    const auto late = c.next_status();
    CHECK(late["accepted"] == false);
    CHECK(late.contains("notice"));
}
