#include "shipdrill/server.hpp"

#include <deque>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "shipdrill/errors.hpp"

namespace shipdrill {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxLineBytes = 1 << 20;

class Peer : public std::enable_shared_from_this<Peer> {
 public:
  Peer(tcp::socket socket, std::shared_ptr<const ScenarioSet> scenarios, LiveOptions options,
       std::function<void(const std::string&)> log)
      : socket_(std::move(socket)),
        timer_(socket_.get_executor()),
        log_(std::move(log)),
        name_(options.log_name),
        connection_(std::move(scenarios), std::move(options),
                    [this](const nlohmann::ordered_json& message) { queue_write(message.dump()); }) {}

  void start() { sniff(); }

  void close() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    connection_.disconnect();
    beast::error_code ignored;
    if (ws_) {
      beast::get_lowest_layer(*ws_).close(ignored);
    } else {
      socket_.close(ignored);
    }
  }

 private:
  void note(const std::string& text) {
    if (log_) log_(name_ + ": " + text);
  }

  // The first bytes decide the transport: "GET " means a WebSocket upgrade.
  void sniff() {
    auto self = shared_from_this();
    socket_.async_read_some(sniff_buffer_.prepare(4096), [this, self](beast::error_code ec, std::size_t n) {
      if (ec) return close();
      sniff_buffer_.commit(n);
      const std::string_view head(static_cast<const char*>(sniff_buffer_.data().data()), sniff_buffer_.size());
      constexpr std::string_view kGet = "GET ";
      if (head.size() < kGet.size() && kGet.substr(0, head.size()) == head) return sniff();
      if (head.substr(0, kGet.size()) == kGet) return read_upgrade();
      note("raw connection");
      inbox_.assign(head);
      sniff_buffer_.consume(sniff_buffer_.size());
      drain_lines();
      read_raw();
    });
  }

  void read_upgrade() {
    auto self = shared_from_this();
    http::async_read(socket_, sniff_buffer_, request_, [this, self](beast::error_code ec, std::size_t) {
      if (ec || !websocket::is_upgrade(request_)) {
        note("not a websocket upgrade");
        return close();
      }
      ws_.emplace(std::move(socket_));
      ws_->text(true);
      ws_->async_accept(request_, [this, self](beast::error_code ec) {
        if (ec) return close();
        note("websocket connection");
        read_frame();
        flush();
      });
    });
  }

  void read_raw() {
    if (closed_) return;
    auto self = shared_from_this();
    asio::async_read_until(socket_, asio::dynamic_buffer(inbox_, kMaxLineBytes), '\n',
                           [this, self](beast::error_code ec, std::size_t) {
                             if (ec) return close();
                             drain_lines();
                             read_raw();
                           });
  }

  void read_frame() {
    if (closed_) return;
    auto self = shared_from_this();
    ws_->async_read(frame_, [this, self](beast::error_code ec, std::size_t) {
      if (ec) return close();
      inbox_ += beast::buffers_to_string(frame_.data());
      inbox_ += '\n';
      frame_.consume(frame_.size());
      drain_lines();
      read_frame();
    });
  }

  void drain_lines() {
    std::size_t eol;
    while (!closed_ && (eol = inbox_.find('\n')) != std::string::npos) {
      std::string line = inbox_.substr(0, eol);
      inbox_.erase(0, eol + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      connection_.on_message(line, Clock::now());
    }
    schedule();
  }

  void schedule() {
    if (closed_) return;
    const auto deadline = connection_.next_deadline();
    if (!deadline) {
      timer_.cancel();
      return;
    }
    timer_.expires_at(*deadline);
    auto self = shared_from_this();
    timer_.async_wait([this, self](beast::error_code ec) {
      if (ec || closed_) return;
      connection_.advance(Clock::now());
      schedule();
    });
  }

  void queue_write(std::string text) {
    if (closed_) return;
    if (!ws_) text += '\n';
    outbox_.push_back(std::move(text));
    if (outbox_.size() == 1) flush();
  }

  void flush() {
    if (closed_ || outbox_.empty() || writing_) return;
    if (!ws_ && !socket_.is_open()) return;
    writing_ = true;
    auto self = shared_from_this();
    auto done = [this, self](beast::error_code ec, std::size_t) {
      writing_ = false;
      if (ec) return close();
      outbox_.pop_front();
      flush();
    };
    if (ws_) {
      if (!ws_->is_open()) {
        writing_ = false;
        return;
      }
      ws_->async_write(asio::buffer(outbox_.front()), done);
    } else {
      asio::async_write(socket_, asio::buffer(outbox_.front()), done);
    }
  }

  tcp::socket socket_;
  std::optional<websocket::stream<tcp::socket>> ws_;
  asio::steady_timer timer_;
  std::function<void(const std::string&)> log_;
  std::string name_;
  LiveConnection connection_;
  beast::flat_buffer sniff_buffer_;
  beast::flat_buffer frame_;
  http::request<http::string_body> request_;
  std::string inbox_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool closed_ = false;
};

}  // namespace

struct Server::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::shared_ptr<const ScenarioSet> scenarios;
  ServerOptions options;
  std::vector<std::weak_ptr<Peer>> peers;
  std::uint64_t accepted = 0;

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != asio::error::operation_aborted && options.log) options.log("accept: " + ec.message());
        if (acceptor.is_open()) accept();
        return;
      }
      LiveOptions live;
      live.speed = options.speed;
      live.seed = options.seed;
      live.log_dir = options.log_dir;
      live.log_name = "conn" + std::to_string(++accepted);
      auto peer = std::make_shared<Peer>(std::move(socket), scenarios, std::move(live), options.log);
      std::erase_if(peers, [](const std::weak_ptr<Peer>& p) { return p.expired(); });
      peers.push_back(peer);
      peer->start();
      accept();
    });
  }
};

Server::Server(ScenarioSet scenarios, ServerOptions options) : impl_(std::make_unique<Impl>()) {
  if (scenarios.empty()) throw Error("no scenarios to serve");
  if (!(options.speed > 0.0)) throw Error("speed must be positive");
  impl_->scenarios = std::make_shared<const ScenarioSet>(std::move(scenarios));
  impl_->options = std::move(options);
}

Server::~Server() = default;

void Server::start() {
  beast::error_code ec;
  const auto address = asio::ip::make_address(impl_->options.bind, ec);
  if (ec) throw Error("bad bind address '" + impl_->options.bind + "'");
  const tcp::endpoint endpoint(address, impl_->options.port);
  impl_->acceptor.open(endpoint.protocol(), ec);
  if (!ec) impl_->acceptor.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor.bind(endpoint, ec);
  if (!ec) impl_->acceptor.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error("cannot listen on " + impl_->options.bind + ":" + std::to_string(impl_->options.port) + ": " +
                      ec.message());
  impl_->accept();
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() { impl_->io.run(); }

void Server::stop() {
  asio::post(impl_->io, [impl = impl_.get()] {
    beast::error_code ignored;
    impl->acceptor.close(ignored);
    for (auto& weak : impl->peers) {
      if (auto peer = weak.lock()) peer->close();
    }
    impl->io.stop();
  });
}

}  // namespace shipdrill
