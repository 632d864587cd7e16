#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace webagent {

/// Error object returned by the remote end for one command.
class CdpError : public std::runtime_error {
 public:
  CdpError(int code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class CdpClosed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CdpTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Websocket client for the DevTools protocol. Commands are matched to
/// responses by id; events are delivered on the reader thread.
class CdpConnection {
 public:
  using EventHandler =
      std::function<void(const std::string& method, const nlohmann::json& params,
                         const std::string& session_id)>;

  /// `ws_url` is ws://host:port/path.
  static std::shared_ptr<CdpConnection> connect(const std::string& ws_url,
                                                std::chrono::milliseconds timeout = std::chrono::seconds(10));
  /// Reads webSocketDebuggerUrl from http://host:port/json/version.
  static std::string discover(const std::string& http_endpoint);

  virtual ~CdpConnection() = default;

  virtual nlohmann::json call(const std::string& method, const nlohmann::json& params = nlohmann::json::object(),
                              const std::string& session_id = {},
                              std::chrono::milliseconds timeout = std::chrono::seconds(30)) = 0;
  virtual int subscribe(EventHandler handler) = 0;
  virtual void unsubscribe(int token) = 0;
  virtual bool alive() const = 0;
  virtual void close() = 0;
};

}  // namespace webagent
