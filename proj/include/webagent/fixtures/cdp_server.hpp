#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "webagent/fixtures/fixture_browser.hpp"

namespace webagent::fixtures {

/// Serves a FixtureBrowser on 127.0.0.1 over the DevTools websocket
/// transport, with /json/version discovery. One thread per connection.
class CdpServer {
 public:
  /// `port` 0 picks a free port.
  explicit CdpServer(std::shared_ptr<FixtureBrowser> browser, int port = 0);
  ~CdpServer();

  CdpServer(const CdpServer&) = delete;
  CdpServer& operator=(const CdpServer&) = delete;

  int port() const { return port_; }
  /// http://127.0.0.1:port
  std::string http_endpoint() const;
  std::string websocket_url() const;

  void stop();

 private:
  struct Impl;

  void accept_loop();
  void serve(int slot);

  std::shared_ptr<FixtureBrowser> browser_;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_thread_;
  std::mutex mu_;
  std::vector<std::thread> workers_;
};

}  // namespace webagent::fixtures
