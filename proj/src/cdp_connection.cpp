#include <atomic>
#include <condition_variable>
#include <deque>
#include <future>
#include <map>
#include <mutex>
#include <thread>

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "webagent/cdp.hpp"
#include "webagent/http_client.hpp"
#include "webagent/url.hpp"

namespace webagent {

namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

class BeastConnection : public CdpConnection, public std::enable_shared_from_this<BeastConnection> {
 public:
  BeastConnection() : ws_(ioc_) {}

  ~BeastConnection() override {
    close();
  }

  void open(const std::string& host, const std::string& port, const std::string& target,
            std::chrono::milliseconds timeout) {
    tcp::resolver resolver(ioc_);
    auto results = resolver.resolve(host, port);
    beast::get_lowest_layer(ws_).expires_after(timeout);
    beast::get_lowest_layer(ws_).connect(results);
    beast::get_lowest_layer(ws_).expires_never();
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::client));
    ws_.read_message_max(256 * 1024 * 1024);
    ws_.handshake(host + ":" + port, target);
    open_ = true;
    start_read();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  json call(const std::string& method, const json& params, const std::string& session_id,
            std::chrono::milliseconds timeout) override {
    if (!open_) throw CdpClosed("connection closed");
    std::int64_t id;
    std::future<json> fut;
    {
      std::lock_guard lock(mu_);
      id = next_id_++;
      fut = pending_[id].get_future();
    }
    json msg = {{"id", id}, {"method", method}, {"params", params}};
    if (!session_id.empty()) msg["sessionId"] = session_id;
    auto text = std::make_shared<std::string>(msg.dump());
    asio::post(ioc_, [this, text] {
      outbox_.push_back(text);
      if (outbox_.size() == 1) write_next();
    });
    if (fut.wait_for(timeout) != std::future_status::ready) {
      std::lock_guard lock(mu_);
      pending_.erase(id);
      throw CdpTimeout(method + " timed out");
    }
    json resp = fut.get();
    if (resp.contains("error")) {
      const json& e = resp["error"];
      throw CdpError(e.value("code", 0), method + ": " + e.value("message", std::string("error")));
    }
    return resp.value("result", json::object());
  }

  int subscribe(EventHandler handler) override {
    std::lock_guard lock(mu_);
    int token = next_token_++;
    handlers_[token] = std::move(handler);
    return token;
  }

  void unsubscribe(int token) override {
    std::lock_guard lock(mu_);
    handlers_.erase(token);
  }

  bool alive() const override { return open_; }

  void close() override {
    if (thread_.joinable()) {
      asio::post(ioc_, [this] {
        beast::error_code ec;
        if (ws_.is_open()) beast::get_lowest_layer(ws_).socket().close(ec);
      });
      thread_.join();
    }
    fail_all("connection closed");
  }

 private:
  void start_read() {
    ws_.async_read(buffer_, [this](beast::error_code ec, std::size_t) {
      if (ec) {
        fail_all("connection lost: " + ec.message());
        return;
      }
      std::string text = beast::buffers_to_string(buffer_.data());
      buffer_.consume(buffer_.size());
      dispatch(text);
      start_read();
    });
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(*outbox_.front()), [this](beast::error_code ec, std::size_t) {
      if (ec) {
        fail_all("write failed: " + ec.message());
        return;
      }
      outbox_.pop_front();
      if (!outbox_.empty()) write_next();
    });
  }

  void dispatch(const std::string& text) {
    json msg = json::parse(text, nullptr, false);
    if (msg.is_discarded()) return;
    if (msg.contains("id")) {
      std::lock_guard lock(mu_);
      auto it = pending_.find(msg["id"].get<std::int64_t>());
      if (it != pending_.end()) {
        it->second.set_value(std::move(msg));
        pending_.erase(it);
      }
      return;
    }
    if (!msg.contains("method")) return;
    std::vector<EventHandler> handlers;
    {
      std::lock_guard lock(mu_);
      for (auto& [_, h] : handlers_) handlers.push_back(h);
    }
    std::string method = msg["method"].get<std::string>();
    json params = msg.value("params", json::object());
    std::string session = msg.value("sessionId", std::string());
    for (auto& h : handlers) h(method, params, session);
  }

  void fail_all(const std::string& reason) {
    open_ = false;
    std::lock_guard lock(mu_);
    for (auto& [_, p] : pending_) {
      p.set_value(json{{"error", {{"code", -1}, {"message", reason}}}});
    }
    pending_.clear();
    closed_reason_ = reason;
  }

  asio::io_context ioc_;
  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<std::string>> outbox_;
  std::thread thread_;
  std::atomic<bool> open_{false};

  std::mutex mu_;
  std::int64_t next_id_ = 1;
  std::map<std::int64_t, std::promise<json>> pending_;
  int next_token_ = 1;
  std::map<int, EventHandler> handlers_;
  std::string closed_reason_;
};

}  // namespace

std::shared_ptr<CdpConnection> CdpConnection::connect(const std::string& ws_url,
                                                      std::chrono::milliseconds timeout) {
  auto url = parse_url(ws_url);
  if (!url || (url->scheme != "ws" && url->scheme != "http")) {
    throw CdpClosed("not a websocket URL: " + ws_url);
  }
  auto conn = std::make_shared<BeastConnection>();
  std::string port = std::to_string(url->port ? url->port : 80);
  try {
    conn->open(url->host, port, url->path_and_query().empty() ? "/" : url->path_and_query(), timeout);
  } catch (const boost::system::system_error& e) {
    throw CdpClosed("cannot connect to " + ws_url + ": " + e.what());
  }
  return conn;
}

std::string CdpConnection::discover(const std::string& http_endpoint) {
  std::string base = http_endpoint;
  while (!base.empty() && base.back() == '/') base.pop_back();
  HttpResponse resp;
  try {
    resp = http_request("GET", base + "/json/version");
  } catch (const HttpError& e) {
    throw CdpClosed(std::string("discovery failed: ") + e.what());
  }
  if (resp.status != 200) throw CdpClosed("discovery failed: HTTP " + std::to_string(resp.status));
  json j = json::parse(resp.body, nullptr, false);
  if (j.is_discarded() || !j.contains("webSocketDebuggerUrl")) {
    throw CdpClosed("discovery response lacks webSocketDebuggerUrl");
  }
  return j["webSocketDebuggerUrl"].get<std::string>();
}

}  // namespace webagent
