#include "webagent/fixtures/cdp_server.hpp"

#include <sys/socket.h>

#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace webagent::fixtures {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {
constexpr const char* kBrowserPath = "/devtools/browser/fixture";
}

struct CdpServer::Impl {
  asio::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::unique_ptr<tcp::socket>> sockets;
};

CdpServer::CdpServer(std::shared_ptr<FixtureBrowser> browser, int port)
    : browser_(std::move(browser)), impl_(std::make_unique<Impl>()) {
  tcp::endpoint ep(asio::ip::make_address("127.0.0.1"), static_cast<unsigned short>(port));
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  port_ = impl_->acceptor.local_endpoint().port();
  acceptor_thread_ = std::thread([this] { accept_loop(); });
}

CdpServer::~CdpServer() { stop(); }

std::string CdpServer::http_endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

std::string CdpServer::websocket_url() const {
  return "ws://127.0.0.1:" + std::to_string(port_) + kBrowserPath;
}

void CdpServer::stop() {
  if (stopping_.exchange(true)) return;
  try {
    asio::io_context wake_ctx;
    tcp::socket wake(wake_ctx);
    wake.connect(tcp::endpoint(asio::ip::make_address("127.0.0.1"), static_cast<unsigned short>(port_)));
  } catch (const std::exception&) {
  }
  if (acceptor_thread_.joinable()) acceptor_thread_.join();
  {
    std::lock_guard lock(mu_);
    for (auto& s : impl_->sockets) {
      if (s) ::shutdown(s->native_handle(), SHUT_RDWR);
    }
  }
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  boost::system::error_code ec;
  impl_->acceptor.close(ec);
}

void CdpServer::accept_loop() {
  while (!stopping_) {
    auto sock = std::make_unique<tcp::socket>(impl_->ioc);
    boost::system::error_code ec;
    impl_->acceptor.accept(*sock, ec);
    if (stopping_) break;
    if (ec) continue;
    std::lock_guard lock(mu_);
    impl_->sockets.push_back(std::move(sock));
    int slot = static_cast<int>(impl_->sockets.size()) - 1;
    workers_.emplace_back([this, slot] { serve(slot); });
  }
}

void CdpServer::serve(int slot) {
  tcp::socket* sock;
  {
    std::lock_guard lock(mu_);
    sock = impl_->sockets[static_cast<std::size_t>(slot)].get();
  }
  std::vector<std::string> sessions;
  try {
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(*sock, buffer, req);

    if (!websocket::is_upgrade(req)) {
      http::response<http::string_body> res;
      res.version(req.version());
      res.keep_alive(false);
      res.set(http::field::content_type, "application/json");
      std::string target(req.target());
      if (target == "/json/version") {
        res.result(http::status::ok);
        res.body() = json{{"Browser", "WebagentFixtureBrowser/1.0"},
                          {"Protocol-Version", "1.3"},
                          {"webSocketDebuggerUrl", websocket_url()}}
                         .dump();
      } else if (target == "/json/list" || target == "/json") {
        res.result(http::status::ok);
        json list = json::array();
        json targets = browser_->handle("Target.getTargets", json::object(), "", {});
        for (const auto& t : targets["targetInfos"]) {
          list.push_back({{"id", t["targetId"]}, {"type", "page"}, {"title", t["title"]}, {"url", t["url"]}});
        }
        res.body() = list.dump();
      } else {
        res.result(http::status::not_found);
        res.body() = "{}";
      }
      res.prepare_payload();
      http::write(*sock, res);
      boost::system::error_code ec;
      sock->shutdown(tcp::socket::shutdown_both, ec);
      return;
    }

    websocket::stream<tcp::socket&> ws(*sock);
    ws.read_message_max(64 * 1024 * 1024);
    ws.accept(req);
    ws.text(true);
    beast::flat_buffer msg;
    while (!stopping_) {
      msg.clear();
      ws.read(msg);
      json in = json::parse(beast::buffers_to_string(msg.data()), nullptr, false);
      if (in.is_discarded() || !in.is_object()) continue;
      json id = in.value("id", json());
      std::string method = in.value("method", std::string());
      json params = in.value("params", json::object());
      std::string session = in.value("sessionId", std::string());

      auto emit = [&](const std::string& ev, const json& ev_params) {
        json out{{"method", ev}, {"params", ev_params}};
        if (!session.empty()) out["sessionId"] = session;
        ws.write(asio::buffer(out.dump()));
      };
      json out{{"id", id}};
      if (!session.empty()) out["sessionId"] = session;
      try {
        json result = browser_->handle(method, params, session, emit);
        if (method == "Target.attachToTarget" && result.contains("sessionId")) {
          sessions.push_back(result["sessionId"].get<std::string>());
        }
        out["result"] = result;
      } catch (const ProtocolError& e) {
        out["error"] = {{"code", e.code()}, {"message", e.what()}};
      } catch (const std::exception& e) {
        out["error"] = {{"code", -32603}, {"message", e.what()}};
      }
      ws.write(asio::buffer(out.dump()));
    }
  } catch (const std::exception&) {
  }
  if (!sessions.empty()) browser_->detach_sessions(sessions);
}

}  // namespace webagent::fixtures
