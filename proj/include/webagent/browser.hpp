#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "webagent/action.hpp"
#include "webagent/image.hpp"

namespace webagent {

struct Viewport {
  int width = 1280;
  int height = 2048;

  static Viewport standard() { return {1280, 2048}; }
  static Viewport short_context() { return {1280, 720}; }
  friend bool operator==(const Viewport&, const Viewport&) = default;
};

struct TabInfo {
  int index = 0;
  std::string title;
  std::string url;
  bool focused = false;
};

/// Accessibility node as reported by the browser.
struct AxNode {
  std::int64_t node_id = 0;
  std::string role;
  std::string name;
  std::vector<std::pair<std::string, std::string>> properties;
  std::vector<AxNode> children;
  bool ignored = false;
  std::int64_t backend_node_id = 0;

  std::optional<std::string> property(std::string_view key) const;
};

struct PageSnapshot {
  std::string url;
  std::string title;
  Raster screenshot;
  AxNode accessibility_root;
  double scroll_y = 0;
};

struct CssSelector {
  std::string selector;
  friend bool operator==(const CssSelector&, const CssSelector&) = default;
};
struct BackendNodeId {
  std::int64_t id = 0;
  friend bool operator==(const BackendNodeId&, const BackendNodeId&) = default;
};
using ElementLocator = std::variant<CssSelector, BackendNodeId>;

/// An element addressed by the agent: a mark id (set-of-marks mode) or an
/// accessibility node id (tree modes), plus the locator used on the wire.
struct ElementRef {
  std::optional<std::int64_t> mark_id;
  std::optional<std::int64_t> tree_node_id;
  ElementLocator locator;
};

using ElementResolver = std::function<std::optional<ElementRef>(std::int64_t id)>;

class BrowserError : public std::runtime_error {
 public:
  enum class Kind { element_not_found, timeout, session_lost, script_error, navigation, invalid_argument, protocol };

  BrowserError(Kind kind, const std::string& message, std::string diagnostics = {})
      : std::runtime_error(message), kind_(kind), diagnostics_(std::move(diagnostics)) {}
  Kind kind() const { return kind_; }
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  Kind kind_;
  std::string diagnostics_;
};

std::string_view to_string(BrowserError::Kind k);

struct SettleOptions {
  std::chrono::milliseconds network_idle{500};
  std::chrono::milliseconds cap{10000};
};

struct SessionOptions {
  Viewport viewport;
  SettleOptions settle;
  std::chrono::milliseconds action_timeout{10000};
};

/// One isolated browser session (its own context and tabs). Single owner:
/// callers serialize every action and capture.
class BrowserSession {
 public:
  virtual ~BrowserSession() = default;

  virtual Viewport viewport() const = 0;

  virtual void goto_url(const std::string& url) = 0;
  virtual void go_back() = 0;
  virtual void go_forward() = 0;
  virtual void new_tab() = 0;
  virtual void tab_focus(int index) = 0;
  virtual void tab_close() = 0;
  virtual void click(const ElementLocator& element) = 0;
  virtual void hover(const ElementLocator& element) = 0;
  virtual void type_text(const ElementLocator& element, const std::string& text, bool press_enter) = 0;
  virtual void press(const std::string& key_comb) = 0;
  virtual void scroll(action::Direction direction) = 0;

  virtual PageSnapshot capture_snapshot() = 0;
  virtual nlohmann::json execute_script(const std::string& source) = 0;

  virtual std::string current_url() = 0;
  virtual std::vector<TabInfo> tabs() = 0;
  virtual double scroll_offset() = 0;

  /// Visible text of every element matching `selector`, in document order.
  virtual std::vector<std::string> query_text(const std::string& selector) = 0;
  /// Attribute value of every matching element that carries it, in document
  /// order. URL-valued attributes (href, src) are returned absolute.
  virtual std::vector<std::string> query_attribute(const std::string& selector,
                                                   const std::string& attribute) = 0;
};

/// Result of one executed action.
struct TransitionResult {
  bool terminal = false;
  std::string answer;
};

/// Dispatches one parsed action to its executor arm. Element-bearing actions
/// are resolved through `resolver`; an unknown id raises element_not_found.
TransitionResult execute_action(BrowserSession& session, const ParsedAction& action,
                                const ElementResolver& resolver);

/// Normalized key combination: modifiers in canonical order then the key, e.g.
/// "ctrl+v" -> {"Control", "v"}.
struct KeyCombination {
  bool alt = false, control = false, meta = false, shift = false;
  std::string key;
  int modifier_mask() const { return (alt ? 1 : 0) | (control ? 2 : 0) | (meta ? 4 : 0) | (shift ? 8 : 0); }
  std::string to_string() const;
};
KeyCombination parse_key_combination(const std::string& text);

/// Visible text of an HTML fragment: tags dropped, script and style bodies
/// removed, entities decoded, whitespace runs collapsed. Block-level tags
/// and <br> break lines.
std::string html_to_text(std::string_view html);

/// Session over the DevTools remote-control protocol. `endpoint` is either a
/// ws:// browser URL or an http://host:port discovery address.
std::unique_ptr<BrowserSession> open_cdp_session(const std::string& endpoint,
                                                 const SessionOptions& options = {});

}  // namespace webagent
