#include <algorithm>
#include <condition_variable>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "webagent/browser.hpp"
#include "webagent/cdp.hpp"
#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

/// Network and navigation activity of one attached page.
struct PageActivity {
  bool navigating = false;
  std::set<std::string> requests;
  Clock::time_point last_change = Clock::now();
};

struct Tab {
  std::string target_id;
  std::string session_id;
};

class CdpSession : public BrowserSession {
 public:
  CdpSession(std::shared_ptr<CdpConnection> conn, SessionOptions options)
      : conn_(std::move(conn)), options_(options) {
    token_ = conn_->subscribe([this](const std::string& m, const json& p, const std::string& s) {
      on_event(m, p, s);
    });
    context_id_ = cmd("Target.createBrowserContext", {{"disposeOnDetach", true}})
                      .value("browserContextId", std::string());
    open_tab();
  }

  ~CdpSession() override {
    conn_->unsubscribe(token_);
    if (conn_->alive() && !context_id_.empty()) {
      try {
        conn_->call("Target.disposeBrowserContext", {{"browserContextId", context_id_}}, {},
                    std::chrono::seconds(5));
      } catch (const std::exception&) {
      }
    }
  }

  Viewport viewport() const override { return options_.viewport; }

  void goto_url(const std::string& url) override {
    std::string target = url;
    if (!is_absolute_url(target) && target.rfind("about:", 0) != 0) target = "http://" + target;
    mark_activity();
    json r = page_cmd("Page.navigate", {{"url", target}});
    if (r.contains("errorText") && !r["errorText"].get<std::string>().empty()) {
      throw BrowserError(BrowserError::Kind::navigation,
                         "navigation to " + target + " failed: " + r["errorText"].get<std::string>());
    }
    settle();
  }

  void go_back() override { history_step(-1); }
  void go_forward() override { history_step(1); }

  void new_tab() override { open_tab(); }

  void tab_focus(int index) override {
    if (index < 0 || index >= static_cast<int>(tabs_.size())) {
      throw BrowserError(BrowserError::Kind::invalid_argument,
                         "tab index " + std::to_string(index) + " out of range (" +
                             std::to_string(tabs_.size()) + " open)");
    }
    focused_ = static_cast<std::size_t>(index);
    cmd("Target.activateTarget", {{"targetId", tabs_[focused_].target_id}});
  }

  void tab_close() override {
    Tab closing = tabs_[focused_];
    cmd("Target.closeTarget", {{"targetId", closing.target_id}});
    tabs_.erase(tabs_.begin() + static_cast<std::ptrdiff_t>(focused_));
    {
      std::lock_guard lock(mu_);
      activity_.erase(closing.session_id);
    }
    if (tabs_.empty()) {
      open_tab();
      return;
    }
    focused_ = tabs_.size() - 1;
    cmd("Target.activateTarget", {{"targetId", tabs_[focused_].target_id}});
  }

  void click(const ElementLocator& element) override {
    auto [x, y] = element_center(element);
    mark_activity();
    mouse("mouseMoved", x, y);
    mouse("mousePressed", x, y);
    mouse("mouseReleased", x, y);
    settle();
  }

  void hover(const ElementLocator& element) override {
    auto [x, y] = element_center(element);
    mark_activity();
    mouse("mouseMoved", x, y);
    settle();
  }

  void type_text(const ElementLocator& element, const std::string& text, bool press_enter) override {
    auto [x, y] = element_center(element);
    mark_activity();
    mouse("mouseMoved", x, y);
    mouse("mousePressed", x, y);
    mouse("mouseReleased", x, y);
    page_cmd("DOM.focus", node_param(element));
    if (!text.empty()) page_cmd("Input.insertText", {{"text", text}});
    if (press_enter) key_press(parse_key_combination("Enter"));
    settle();
  }

  void press(const std::string& key_comb) override {
    KeyCombination kc = parse_key_combination(key_comb);
    mark_activity();
    key_press(kc);
    settle();
  }

  void scroll(action::Direction direction) override {
    double delta = 0.75 * options_.viewport.height * (direction == action::Direction::down ? 1 : -1);
    mark_activity();
    page_cmd("Input.dispatchMouseEvent", {{"type", "mouseWheel"},
                                          {"x", options_.viewport.width / 2},
                                          {"y", options_.viewport.height / 2},
                                          {"deltaX", 0},
                                          {"deltaY", delta}});
    settle();
  }

  PageSnapshot capture_snapshot() override {
    PageSnapshot snap;
    auto [url, title] = history_current();
    snap.url = url;
    snap.title = title;
    json shot = page_cmd("Page.captureScreenshot", {{"format", "png"}});
    try {
      snap.screenshot = decode_png(base64_decode(shot.value("data", std::string())));
    } catch (const ImageDecodeError& e) {
      throw BrowserError(BrowserError::Kind::protocol, std::string("bad screenshot: ") + e.what());
    }
    snap.accessibility_root = build_ax_tree(page_cmd("Accessibility.getFullAXTree", json::object()));
    snap.scroll_y = scroll_offset();
    return snap;
  }

  json execute_script(const std::string& source) override {
    json r = page_cmd("Runtime.evaluate",
                      {{"expression", source}, {"returnByValue", true}, {"awaitPromise", true}});
    if (r.contains("exceptionDetails")) {
      const json& d = r["exceptionDetails"];
      std::string msg = d.value("text", std::string("script error"));
      if (d.contains("exception") && d["exception"].contains("description")) {
        msg += ": " + d["exception"]["description"].get<std::string>();
      }
      throw BrowserError(BrowserError::Kind::script_error, msg, d.dump());
    }
    const json& result = r.value("result", json::object());
    return result.contains("value") ? result["value"] : json();
  }

  std::string current_url() override { return history_current().first; }

  std::vector<TabInfo> tabs() override {
    json targets = cmd("Target.getTargets", json::object()).value("targetInfos", json::array());
    std::vector<TabInfo> out;
    for (std::size_t i = 0; i < tabs_.size(); ++i) {
      TabInfo info;
      info.index = static_cast<int>(i);
      info.focused = i == focused_;
      for (const auto& t : targets) {
        if (t.value("targetId", std::string()) == tabs_[i].target_id) {
          info.title = t.value("title", std::string());
          info.url = t.value("url", std::string());
        }
      }
      out.push_back(info);
    }
    return out;
  }

  double scroll_offset() override {
    json v = execute_script("window.scrollY");
    return v.is_number() ? v.get<double>() : 0.0;
  }

  std::vector<std::string> query_text(const std::string& selector) override {
    std::vector<std::string> out;
    for (std::int64_t node : query_all(selector)) {
      json r = page_cmd("DOM.getOuterHTML", {{"nodeId", node}});
      out.push_back(html_to_text(r.value("outerHTML", std::string())));
    }
    return out;
  }

  std::vector<std::string> query_attribute(const std::string& selector,
                                           const std::string& attribute) override {
    std::vector<std::string> out;
    std::string base;
    for (std::int64_t node : query_all(selector)) {
      json attrs = page_cmd("DOM.getAttributes", {{"nodeId", node}}).value("attributes", json::array());
      for (std::size_t i = 0; i + 1 < attrs.size(); i += 2) {
        if (to_lower(attrs[i].get<std::string>()) != to_lower(attribute)) continue;
        std::string value = attrs[i + 1].get<std::string>();
        if (attribute == "href" || attribute == "src") {
          if (base.empty()) base = current_url();
          value = resolve_url(base, value);
        }
        out.push_back(value);
      }
    }
    return out;
  }

 private:
  json cmd(const std::string& method, const json& params, const std::string& session = {}) {
    try {
      return conn_->call(method, params, session, options_.action_timeout);
    } catch (const CdpTimeout& e) {
      throw BrowserError(BrowserError::Kind::timeout, e.what());
    } catch (const CdpClosed& e) {
      throw BrowserError(BrowserError::Kind::session_lost, e.what());
    } catch (const CdpError& e) {
      if (e.code() == -1 || !conn_->alive()) {
        throw BrowserError(BrowserError::Kind::session_lost, e.what());
      }
      std::string msg = to_lower(e.what());
      if (msg.find("no node") != std::string::npos || msg.find("could not find node") != std::string::npos ||
          msg.find("not found") != std::string::npos) {
        throw BrowserError(BrowserError::Kind::element_not_found, e.what());
      }
      throw BrowserError(BrowserError::Kind::protocol, e.what());
    }
  }

  json page_cmd(const std::string& method, const json& params) {
    return cmd(method, params, tabs_[focused_].session_id);
  }

  void open_tab() {
    json params = {{"url", "about:blank"}};
    if (!context_id_.empty()) params["browserContextId"] = context_id_;
    std::string target = cmd("Target.createTarget", params).value("targetId", std::string());
    std::string session =
        cmd("Target.attachToTarget", {{"targetId", target}, {"flatten", true}}).value("sessionId", std::string());
    {
      std::lock_guard lock(mu_);
      activity_[session] = PageActivity{};
    }
    tabs_.push_back({target, session});
    focused_ = tabs_.size() - 1;
    cmd("Page.enable", json::object(), session);
    cmd("Network.enable", json::object(), session);
    cmd("Emulation.setDeviceMetricsOverride",
        {{"width", options_.viewport.width},
         {"height", options_.viewport.height},
         {"deviceScaleFactor", 1},
         {"mobile", false}},
        session);
    cmd("Target.activateTarget", {{"targetId", target}});
  }

  void on_event(const std::string& method, const json& params, const std::string& session) {
    std::lock_guard lock(mu_);
    auto it = activity_.find(session);
    if (it == activity_.end()) return;
    PageActivity& a = it->second;
    if (method == "Page.frameStartedLoading") {
      a.navigating = true;
    } else if (method == "Page.loadEventFired") {
      a.navigating = false;
    } else if (method == "Network.requestWillBeSent") {
      a.requests.insert(params.value("requestId", std::string()));
    } else if (method == "Network.loadingFinished" || method == "Network.loadingFailed") {
      a.requests.erase(params.value("requestId", std::string()));
    } else {
      return;
    }
    a.last_change = Clock::now();
    cv_.notify_all();
  }

  void mark_activity() {
    std::lock_guard lock(mu_);
    activity_[tabs_[focused_].session_id].last_change = Clock::now();
  }

  /// Waits until the focused page has no pending navigation, no in-flight
  /// requests and has been quiet for the idle window, or the cap elapses.
  void settle() {
    const std::string session = tabs_[focused_].session_id;
    auto deadline = Clock::now() + options_.settle.cap;
    std::unique_lock lock(mu_);
    for (;;) {
      if (!conn_->alive()) throw BrowserError(BrowserError::Kind::session_lost, "connection lost");
      PageActivity& a = activity_[session];
      auto now = Clock::now();
      bool busy = a.navigating || !a.requests.empty();
      auto quiet_at = a.last_change + options_.settle.network_idle;
      if (!busy && now >= quiet_at) return;
      if (now >= deadline) {
        if (a.navigating) {
          throw BrowserError(BrowserError::Kind::timeout, "page did not finish loading within " +
                                                              std::to_string(options_.settle.cap.count()) + " ms");
        }
        return;
      }
      auto wake = busy ? deadline : std::min(quiet_at, deadline);
      cv_.wait_until(lock, std::min(wake, now + std::chrono::milliseconds(50)));
    }
  }

  std::pair<std::string, std::string> history_current() {
    json h = page_cmd("Page.getNavigationHistory", json::object());
    int idx = h.value("currentIndex", 0);
    const json& entries = h["entries"];
    if (idx < 0 || idx >= static_cast<int>(entries.size())) return {"about:blank", ""};
    return {entries[idx].value("url", std::string()), entries[idx].value("title", std::string())};
  }

  void history_step(int delta) {
    json h = page_cmd("Page.getNavigationHistory", json::object());
    int idx = h.value("currentIndex", 0) + delta;
    const json& entries = h["entries"];
    if (idx < 0 || idx >= static_cast<int>(entries.size())) return;
    mark_activity();
    page_cmd("Page.navigateToHistoryEntry", {{"entryId", entries[idx]["id"]}});
    settle();
  }

  json node_param(const ElementLocator& element) {
    if (auto b = std::get_if<BackendNodeId>(&element)) return {{"backendNodeId", b->id}};
    const std::string& selector = std::get<CssSelector>(element).selector;
    std::int64_t root = page_cmd("DOM.getDocument", {{"depth", 0}})["root"]["nodeId"].get<std::int64_t>();
    std::int64_t node =
        page_cmd("DOM.querySelector", {{"nodeId", root}, {"selector", selector}}).value("nodeId", 0);
    if (node == 0) {
      throw BrowserError(BrowserError::Kind::element_not_found, "no element matches '" + selector + "'");
    }
    return {{"nodeId", node}};
  }

  std::vector<std::int64_t> query_all(const std::string& selector) {
    std::int64_t root = page_cmd("DOM.getDocument", {{"depth", 0}})["root"]["nodeId"].get<std::int64_t>();
    json ids = page_cmd("DOM.querySelectorAll", {{"nodeId", root}, {"selector", selector}})
                   .value("nodeIds", json::array());
    return ids.get<std::vector<std::int64_t>>();
  }

  std::pair<double, double> element_center(const ElementLocator& element) {
    json node = node_param(element);
    page_cmd("DOM.scrollIntoViewIfNeeded", node);
    json quads = page_cmd("DOM.getContentQuads", node).value("quads", json::array());
    if (quads.empty() || quads[0].size() < 8) {
      throw BrowserError(BrowserError::Kind::element_not_found, "element has no visible box");
    }
    const json& q = quads[0];
    double x = 0, y = 0;
    for (int i = 0; i < 4; ++i) {
      x += q[2 * i].get<double>();
      y += q[2 * i + 1].get<double>();
    }
    return {x / 4, y / 4};
  }

  void mouse(const char* type, double x, double y) {
    json p = {{"type", type}, {"x", x}, {"y", y}, {"modifiers", 0}};
    if (std::string_view(type) != "mouseMoved") {
      p["button"] = "left";
      p["clickCount"] = 1;
    }
    page_cmd("Input.dispatchMouseEvent", p);
  }

  void key_press(const KeyCombination& kc) {
    json down = {{"type", "keyDown"}, {"key", kc.key}, {"modifiers", kc.modifier_mask()}};
    bool printable = kc.key.size() == 1 && !kc.control && !kc.meta && !kc.alt;
    if (printable) down["text"] = kc.key;
    if (kc.key == "Enter") down["text"] = "\r";
    page_cmd("Input.dispatchKeyEvent", down);
    page_cmd("Input.dispatchKeyEvent", {{"type", "keyUp"}, {"key", kc.key}, {"modifiers", kc.modifier_mask()}});
  }

  static AxNode build_ax_tree(const json& result) {
    const json nodes = result.value("nodes", json::array());
    std::map<std::string, const json*> by_id;
    for (const auto& n : nodes) by_id[n.value("nodeId", std::string())] = &n;

    std::function<AxNode(const json&)> build = [&](const json& n) {
      AxNode node;
      std::string id = n.value("nodeId", std::string());
      node.node_id = std::strtoll(id.c_str(), nullptr, 10);
      node.ignored = n.value("ignored", false);
      node.backend_node_id = n.value("backendDOMNodeId", std::int64_t{0});
      if (n.contains("role")) node.role = n["role"].value("value", std::string());
      if (n.contains("name")) {
        const json& v = n["name"].value("value", json());
        node.name = v.is_string() ? v.get<std::string>() : (v.is_null() ? "" : v.dump());
      }
      for (const auto& p : n.value("properties", json::array())) {
        const json& v = p["value"].value("value", json());
        node.properties.emplace_back(p.value("name", std::string()),
                                     v.is_string() ? v.get<std::string>() : v.dump());
      }
      for (const auto& c : n.value("childIds", json::array())) {
        auto it = by_id.find(c.get<std::string>());
        if (it != by_id.end()) node.children.push_back(build(*it->second));
      }
      return node;
    };

    std::set<std::string> child_ids;
    for (const auto& n : nodes) {
      for (const auto& c : n.value("childIds", json::array())) child_ids.insert(c.get<std::string>());
    }
    for (const auto& n : nodes) {
      if (!child_ids.count(n.value("nodeId", std::string()))) return build(n);
    }
    AxNode empty;
    empty.role = "RootWebArea";
    return empty;
  }

  std::shared_ptr<CdpConnection> conn_;
  SessionOptions options_;
  int token_ = 0;
  std::string context_id_;
  std::vector<Tab> tabs_;
  std::size_t focused_ = 0;

  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, PageActivity> activity_;
};

}  // namespace

std::unique_ptr<BrowserSession> open_cdp_session(const std::string& endpoint, const SessionOptions& options) {
  std::shared_ptr<CdpConnection> conn;
  try {
    std::string ws = endpoint;
    if (ws.rfind("http://", 0) == 0) ws = CdpConnection::discover(ws);
    conn = CdpConnection::connect(ws);
  } catch (const CdpClosed& e) {
    throw BrowserError(BrowserError::Kind::session_lost, e.what());
  }
  return std::make_unique<CdpSession>(std::move(conn), options);
}

}  // namespace webagent
