#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "webagent/browser.hpp"
#include "webagent/fixtures/dom.hpp"
#include "webagent/fixtures/layout.hpp"
#include "webagent/http_client.hpp"
#include "webagent/image.hpp"

namespace webagent::fixtures {

/// Error reply for a protocol command.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

/// Issues one HTTP request without following redirects.
using HttpFetcher =
    std::function<HttpResponse(const std::string& method, const std::string& url, const std::string& form_body)>;

/// Fetcher over plain HTTP.
HttpFetcher http_fetcher();

/// Runtime.evaluate expression answered with the page's SoM manifest.
inline constexpr const char* kSomBindingExpression = "window.__webagentSom()";

/// A small browser engine for fixture pages, driven through the subset of
/// the remote-debugging protocol that CdpSession uses. Only loopback hosts
/// are reachable. Thread-safe; commands are handled one at a time.
class FixtureBrowser {
 public:
  using Emit = std::function<void(const std::string& method, const nlohmann::json& params)>;

  explicit FixtureBrowser(HttpFetcher fetch = http_fetcher(), Viewport initial = {});
  ~FixtureBrowser();

  /// Handles one command. `session_id` is empty for browser-level commands.
  /// Events caused by the command go to `emit` before this returns.
  nlohmann::json handle(const std::string& method, const nlohmann::json& params, const std::string& session_id,
                        const Emit& emit);

  /// Drops every target attached through `sessions` (connection closed).
  void detach_sessions(const std::vector<std::string>& sessions);

  std::size_t target_count() const;

 private:
  struct Page;

  Page& page_for_session(const std::string& session_id);
  nlohmann::json handle_browser(const std::string& method, const nlohmann::json& params);
  nlohmann::json handle_page(Page& page, const std::string& method, const nlohmann::json& params, const Emit& emit);

  void navigate(Page& page, const std::string& url, const std::string& method, const std::string& body,
                bool push_history, const Emit& emit);
  bool load_images(Page& page, const Emit& emit);
  void ensure_layout(Page& page);
  const Raster* image(const std::string& url);
  Node* node_from_params(Page& page, const nlohmann::json& params);

  void click_at(Page& page, int x, int y, const Emit& emit);
  void activate(Page& page, Node* target, const Emit& emit);
  void submit_form(Page& page, Node* form, Node* submitter, const Emit& emit);
  void key_down(Page& page, const std::string& key, const std::string& text, int modifiers, const Emit& emit);
  void insert_text(Page& page, const std::string& text);
  void scroll_by(Page& page, int delta);
  nlohmann::json evaluate(Page& page, const std::string& expression);

  mutable std::mutex mu_;
  HttpFetcher fetch_;
  Viewport initial_viewport_;
  std::vector<std::unique_ptr<Page>> pages_;
  std::map<std::string, std::string> session_target_;
  std::map<std::string, std::string> context_of_target_;
  std::map<std::string, std::shared_ptr<Raster>> image_cache_;
  int next_id_ = 1;
  int next_request_ = 1;
};

}  // namespace webagent::fixtures
