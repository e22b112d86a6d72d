#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/asio/connect.hpp>
#include <boost/beast/websocket.hpp>

#include <condition_variable>
#include <iostream>

#include "handsteer/error.hpp"
#include "handsteer/service.hpp"

namespace handsteer {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct StreamServer::Impl {
  std::shared_ptr<const RecognizerModel> model;
  std::string bind;
  asio::io_context io;
  std::optional<tcp::acceptor> acceptor;
  std::thread accept_thread;

  std::mutex mu;
  std::condition_variable stopped_cv;
  bool stopped = false;
  struct Running {
    std::shared_ptr<tcp::socket> sock;
    std::shared_ptr<std::atomic<bool>> done;
    std::thread thread;
  };
  std::list<Running> sessions;

  void accept_loop();
  void serve(std::shared_ptr<tcp::socket> sock);
  void run_websocket(tcp::socket& sock, http::request<http::string_body>& req);
};

void StreamServer::Impl::run_websocket(tcp::socket& sock, http::request<http::string_body>& req) {
  websocket::stream<tcp::socket&> ws(sock);
  ws.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
    res.set(http::field::server, "handsteer");
  }));
  ws.accept(req);
  ws.text(true);

  if (!model) {
    ws.write(asio::buffer(error_message(ErrorCode::ModelMissing, "service started without a model")));
    ws.close(websocket::close_code::try_again_later);
    return;
  }
  Session session(model);
  beast::flat_buffer buf;
  for (;;) {
    beast::error_code ec;
    ws.read(buf, ec);
    if (ec) return;  // closed or reset; the session state goes with it
    const auto reply = session.handle(beast::buffers_to_string(buf.data()));
    buf.consume(buf.size());
    if (reply) ws.write(asio::buffer(*reply), ec);
    if (ec) return;
  }
}

void StreamServer::Impl::serve(std::shared_ptr<tcp::socket> sock) {
  try {
    beast::flat_buffer buf;
    http::request<http::string_body> req;
    http::read(*sock, buf, req);
    if (websocket::is_upgrade(req)) {
      run_websocket(*sock, req);
      return;
    }
    http::response<http::string_body> res;
    res.version(req.version());
    res.set(http::field::server, "handsteer");
    res.keep_alive(false);
    if (req.method() == http::verb::get && req.target() == "/health") {
      res.result(model ? http::status::ok : http::status::service_unavailable);
      res.set(http::field::content_type, "application/json");
      res.body() = health_message(model.get());
    } else {
      res.result(http::status::not_found);
      res.set(http::field::content_type, "text/plain");
      res.body() = "not found\n";
    }
    res.prepare_payload();
    http::write(*sock, res);
    beast::error_code ec;
    sock->shutdown(tcp::socket::shutdown_send, ec);
  } catch (const std::exception&) {
    // Client went away mid-handshake.
  }
}

void StreamServer::Impl::accept_loop() {
  for (;;) {
    auto sock = std::make_shared<tcp::socket>(io);
    beast::error_code ec;
    acceptor->accept(*sock, ec);
    std::lock_guard lock(mu);
    if (stopped) return;
    if (ec) continue;
    // Reap finished sessions.
    for (auto it = sessions.begin(); it != sessions.end();) {
      if (it->done->load()) {
        it->thread.join();
        it = sessions.erase(it);
      } else {
        ++it;
      }
    }
    auto done = std::make_shared<std::atomic<bool>>(false);
    sessions.push_back({sock, done, std::thread([this, sock, done] {
                          serve(sock);
                          done->store(true);
                        })});
  }
}

StreamServer::StreamServer(std::shared_ptr<const RecognizerModel> model, std::string bind,
                           std::uint16_t port)
    : impl_(std::make_unique<Impl>()), port_(port) {
  impl_->model = std::move(model);
  impl_->bind = std::move(bind);
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
  beast::error_code ec;
  const auto addr = asio::ip::make_address(impl_->bind, ec);
  if (ec) throw Error(ErrorCode::InvalidArgument, "bad bind address " + impl_->bind);
  impl_->acceptor.emplace(impl_->io);
  const tcp::endpoint ep(addr, port_);
  impl_->acceptor->open(ep.protocol(), ec);
  if (!ec) impl_->acceptor->set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) impl_->acceptor->bind(ep, ec);
  if (!ec) impl_->acceptor->listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::IOFailure, "cannot listen on " + impl_->bind + ":" +
                                               std::to_string(port_) + ": " + ec.message());
  port_ = impl_->acceptor->local_endpoint().port();
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

void StreamServer::wait() {
  std::unique_lock lock(impl_->mu);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

void StreamServer::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopped) return;
    impl_->stopped = true;
    beast::error_code ec;
    for (auto& r : impl_->sessions) r.sock->shutdown(tcp::socket::shutdown_both, ec);
  }
  impl_->stopped_cv.notify_all();
  if (impl_->accept_thread.joinable()) {
    // Wake the blocking accept with a throwaway connection.
    beast::error_code ec;
    auto addr = impl_->acceptor->local_endpoint().address();
    if (addr.is_unspecified())
      addr = addr.is_v6() ? asio::ip::address(asio::ip::address_v6::loopback())
                          : asio::ip::address(asio::ip::address_v4::loopback());
    tcp::socket poke(impl_->io);
    poke.connect(tcp::endpoint(addr, port_), ec);
    impl_->accept_thread.join();
  }
  if (impl_->acceptor) {
    beast::error_code ec;
    impl_->acceptor->close(ec);
  }
  for (auto& r : impl_->sessions)
    if (r.thread.joinable()) r.thread.join();
  impl_->sessions.clear();
}

}  // namespace handsteer

namespace handsteer {

std::string fetch_health(const std::string& host, std::uint16_t port) {
  asio::io_context io;
  tcp::resolver resolver(io);
  tcp::socket sock(io);
  asio::connect(sock, resolver.resolve(host, std::to_string(port)));
  http::request<http::empty_body> req(http::verb::get, "/health", 11);
  req.set(http::field::host, host);
  http::write(sock, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(sock, buf, res);
  beast::error_code ec;
  sock.shutdown(tcp::socket::shutdown_both, ec);
  return res.body();
}

std::vector<std::string> replay_frames(const std::string& host, std::uint16_t port,
                                       const std::vector<FeatureFrame>& frames, int window) {
  asio::io_context io;
  tcp::resolver resolver(io);
  websocket::stream<tcp::socket> ws(io);
  asio::connect(ws.next_layer(), resolver.resolve(host, std::to_string(port)));
  ws.handshake(host + ":" + std::to_string(port), "/");
  ws.text(true);
  std::vector<std::string> replies;
  beast::flat_buffer buf;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    ws.write(asio::buffer(frame_message(frames[i])));
    if (i < static_cast<std::size_t>(window)) continue;
    ws.read(buf);
    replies.push_back(beast::buffers_to_string(buf.data()));
    buf.consume(buf.size());
  }
  beast::error_code ec;
  ws.close(websocket::close_code::normal, ec);
  return replies;
}

}  // namespace handsteer
