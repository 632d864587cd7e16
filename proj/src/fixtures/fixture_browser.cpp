#include "webagent/fixtures/fixture_browser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <span>

#include "webagent/fixtures/selector.hpp"
#include "webagent/fixtures/semantics.hpp"
#include "webagent/som.hpp"
#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent::fixtures {

using nlohmann::json;

namespace {

constexpr const char* kBlankPage = "<html><head><title></title></head><body></body></html>";

/// Navigation that never reached a document.
struct NavigationRefused {
  std::string error_text;
};

bool loopback(const Url& u) {
  return u.host == "127.0.0.1" || u.host == "localhost" || u.host == "[::1]" || u.host == "::1";
}

Node* closest(Node* n, const std::function<bool(const Node*)>& pred) {
  for (Node* a = n; a; a = a->parent) {
    if (a->is_element() && pred(a)) return a;
  }
  return nullptr;
}

bool attached(const Document& doc, const Node* n) {
  while (n && n->parent) n = n->parent;
  return n == doc.root();
}

std::string text_value(const Node* el) {
  if (el->tag == "textarea") {
    std::string v;
    for (const Node* c : el->children) v += c->text;
    return v;
  }
  const std::string* v = el->attr("value");
  return v ? *v : std::string();
}

void pop_utf8(std::string& s) {
  if (s.empty()) return;
  std::size_t i = s.size() - 1;
  while (i > 0 && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) --i;
  s.erase(i);
}

bool focusable(const Node* el) {
  if (!el || !el->is_element() || el->has_attr("disabled")) return false;
  const std::string& t = el->tag;
  if (t == "a") return el->has_attr("href");
  if (t == "input") return input_type(el) != "hidden";
  return t == "button" || t == "select" || t == "textarea" || t == "summary" || el->has_attr("tabindex");
}

json remote_value(const json& v) {
  json r;
  if (v.is_number()) {
    r = {{"type", "number"}, {"value", v}, {"description", v.dump()}};
  } else if (v.is_string()) {
    r = {{"type", "string"}, {"value", v}};
  } else if (v.is_boolean()) {
    r = {{"type", "boolean"}, {"value", v}};
  } else if (v.is_null()) {
    r = {{"type", "object"}, {"subtype", "null"}, {"value", nullptr}};
  } else {
    r = {{"type", "object"}, {"value", v}, {"description", "Object"}};
  }
  return {{"result", r}};
}

}  // namespace

struct FixtureBrowser::Page {
  struct Entry {
    int id = 0;
    std::string url;
    std::string title;
  };
  std::string target_id;
  std::string context_id;
  std::string frame_id;
  std::vector<Entry> history;
  int current = -1;
  std::string url = "about:blank";
  std::unique_ptr<Document> doc;
  std::optional<Layout> layout;
  Viewport viewport;
  int scroll_y = 0;
  Node* focused = nullptr;
  Node* hovered = nullptr;
  bool select_all = false;

  void invalidate() { layout.reset(); }
};

HttpFetcher http_fetcher() {
  return [](const std::string& method, const std::string& url, const std::string& body) {
    return http_request(method, url, body, method == "POST" ? "application/x-www-form-urlencoded" : "");
  };
}

FixtureBrowser::FixtureBrowser(HttpFetcher fetch, Viewport initial)
    : fetch_(std::move(fetch)), initial_viewport_(initial) {}

FixtureBrowser::~FixtureBrowser() = default;

std::size_t FixtureBrowser::target_count() const {
  std::lock_guard lock(mu_);
  return pages_.size();
}

void FixtureBrowser::detach_sessions(const std::vector<std::string>& sessions) {
  std::lock_guard lock(mu_);
  for (const auto& s : sessions) session_target_.erase(s);
}

json FixtureBrowser::handle(const std::string& method, const json& params, const std::string& session_id,
                            const Emit& emit) {
  std::lock_guard lock(mu_);
  if (session_id.empty()) return handle_browser(method, params);
  return handle_page(page_for_session(session_id), method, params, emit);
}

FixtureBrowser::Page& FixtureBrowser::page_for_session(const std::string& session_id) {
  auto it = session_target_.find(session_id);
  if (it != session_target_.end()) {
    for (auto& p : pages_) {
      if (p->target_id == it->second) return *p;
    }
  }
  throw ProtocolError(-32001, "Session with given id not found.");
}

json FixtureBrowser::handle_browser(const std::string& method, const json& params) {
  auto find_page = [&](const std::string& target) -> Page& {
    for (auto& p : pages_) {
      if (p->target_id == target) return *p;
    }
    throw ProtocolError(-32602, "No target with given id found");
  };
  const Emit quiet = [](const std::string&, const json&) {};

  if (method == "Browser.getVersion") {
    return {{"protocolVersion", "1.3"}, {"product", "WebagentFixtureBrowser/1.0"}};
  }
  if (method == "Target.createBrowserContext") return {{"browserContextId", "C" + std::to_string(next_id_++)}};
  if (method == "Target.disposeBrowserContext") {
    std::string ctx = params.value("browserContextId", std::string());
    std::erase_if(pages_, [&](const std::unique_ptr<Page>& p) {
      if (p->context_id != ctx) return false;
      std::erase_if(session_target_, [&](const auto& kv) { return kv.second == p->target_id; });
      return true;
    });
    return json::object();
  }
  if (method == "Target.createTarget") {
    auto page = std::make_unique<Page>();
    page->target_id = "T" + std::to_string(next_id_++);
    page->frame_id = "F" + page->target_id;
    page->context_id = params.value("browserContextId", std::string());
    page->viewport = initial_viewport_;
    Page& p = *page;
    pages_.push_back(std::move(page));
    std::string url = params.value("url", std::string("about:blank"));
    try {
      navigate(p, url, "GET", "", true, quiet);
    } catch (const NavigationRefused&) {
      navigate(p, "about:blank", "GET", "", true, quiet);
    }
    return {{"targetId", p.target_id}};
  }
  if (method == "Target.attachToTarget") {
    Page& p = find_page(params.value("targetId", std::string()));
    std::string session = "S" + std::to_string(next_id_++);
    session_target_[session] = p.target_id;
    return {{"sessionId", session}};
  }
  if (method == "Target.activateTarget") {
    find_page(params.value("targetId", std::string()));
    return json::object();
  }
  if (method == "Target.closeTarget") {
    std::string target = params.value("targetId", std::string());
    find_page(target);
    std::erase_if(pages_, [&](const std::unique_ptr<Page>& p) { return p->target_id == target; });
    std::erase_if(session_target_, [&](const auto& kv) { return kv.second == target; });
    return {{"success", true}};
  }
  if (method == "Target.getTargets") {
    json infos = json::array();
    for (const auto& p : pages_) {
      infos.push_back({{"targetId", p->target_id},
                       {"type", "page"},
                       {"title", p->doc ? p->doc->title() : std::string()},
                       {"url", p->url},
                       {"attached", true},
                       {"browserContextId", p->context_id}});
    }
    return {{"targetInfos", infos}};
  }
  if (method == "Target.setDiscoverTargets" || method == "Target.setAutoAttach") return json::object();
  throw ProtocolError(-32601, "'" + method + "' wasn't found");
}

json FixtureBrowser::handle_page(Page& page, const std::string& method, const json& params, const Emit& emit) {
  if (method == "Page.enable" || method == "Network.enable" || method == "Runtime.enable" ||
      method == "DOM.enable" || method == "Accessibility.enable" || method == "Page.bringToFront") {
    return json::object();
  }
  if (method == "Emulation.setDeviceMetricsOverride") {
    page.viewport.width = params.value("width", page.viewport.width);
    page.viewport.height = params.value("height", page.viewport.height);
    page.invalidate();
    return json::object();
  }
  if (method == "Page.navigate") {
    std::string url = params.value("url", std::string());
    try {
      navigate(page, url, "GET", "", true, emit);
    } catch (const NavigationRefused& e) {
      return {{"frameId", page.frame_id}, {"errorText", e.error_text}};
    }
    return {{"frameId", page.frame_id}, {"loaderId", "L" + std::to_string(next_request_)}};
  }
  if (method == "Page.getNavigationHistory") {
    json entries = json::array();
    for (const auto& e : page.history) {
      entries.push_back({{"id", e.id}, {"url", e.url}, {"userTypedURL", e.url}, {"title", e.title},
                         {"transitionType", "link"}});
    }
    return {{"currentIndex", page.current}, {"entries", entries}};
  }
  if (method == "Page.navigateToHistoryEntry") {
    int id = params.value("entryId", -1);
    for (std::size_t i = 0; i < page.history.size(); ++i) {
      if (page.history[i].id != id) continue;
      page.current = static_cast<int>(i);
      try {
        navigate(page, page.history[i].url, "GET", "", false, emit);
      } catch (const NavigationRefused& e) {
        throw ProtocolError(-32000, e.error_text);
      }
      return json::object();
    }
    throw ProtocolError(-32000, "No entry with passed id");
  }
  if (method == "Page.captureScreenshot") {
    ensure_layout(page);
    Raster shot = paint(*page.layout, page.viewport.width, page.viewport.height, page.scroll_y,
                        [this](const std::string& src) { return image(src); });
    return {{"data", base64_encode(encode_png(shot))}};
  }
  if (method == "Accessibility.getFullAXTree") {
    std::string base = page.url;
    return accessibility_tree(*page.doc, page.focused, [&](const std::string& ref) { return resolve_url(base, ref); });
  }
  if (method == "Runtime.evaluate") return evaluate(page, params.value("expression", std::string()));
  if (method == "DOM.getDocument") {
    return {{"root",
             {{"nodeId", node_id(page.doc->root())},
              {"backendNodeId", node_id(page.doc->root())},
              {"nodeType", 9},
              {"nodeName", "#document"},
              {"localName", ""},
              {"nodeValue", ""},
              {"documentURL", page.url},
              {"childNodeCount", page.doc->root()->children.size()}}}};
  }
  if (method == "DOM.querySelector" || method == "DOM.querySelectorAll") {
    Node* scope = node_from_params(page, params);
    std::vector<Node*> matches;
    try {
      matches = Selector::parse(params.value("selector", std::string())).query_all(*page.doc);
    } catch (const SelectorError&) {
      throw ProtocolError(-32000, "DOM Error while querying");
    }
    json ids = json::array();
    for (Node* m : matches) {
      if (m == scope) continue;
      for (Node* a = m->parent; a; a = a->parent) {
        if (a == scope) {
          ids.push_back(node_id(m));
          break;
        }
      }
    }
    if (method == "DOM.querySelector") return {{"nodeId", ids.empty() ? json(0) : ids[0]}};
    return {{"nodeIds", ids}};
  }
  if (method == "DOM.getOuterHTML") return {{"outerHTML", outer_html(node_from_params(page, params))}};
  if (method == "DOM.getAttributes") {
    json flat = json::array();
    for (const auto& [k, v] : node_from_params(page, params)->attributes) {
      flat.push_back(k);
      flat.push_back(v);
    }
    return {{"attributes", flat}};
  }
  if (method == "DOM.scrollIntoViewIfNeeded") {
    Node* n = node_from_params(page, params);
    ensure_layout(page);
    Rect box = page.layout->box(n);
    if (!page.layout->rendered(n)) throw ProtocolError(-32000, "Node does not have a layout object");
    if (box.y < page.scroll_y || box.y + box.height > page.scroll_y + page.viewport.height) {
      scroll_by(page, box.y + box.height / 2 - page.viewport.height / 2 - page.scroll_y);
    }
    return json::object();
  }
  if (method == "DOM.getContentQuads") {
    Node* n = node_from_params(page, params);
    ensure_layout(page);
    Rect b = page.layout->box(n);
    if (b.empty()) throw ProtocolError(-32000, "Could not compute content quads.");
    double x0 = b.x, y0 = b.y - page.scroll_y, x1 = b.x + b.width, y1 = y0 + b.height;
    return {{"quads", json::array({json::array({x0, y0, x1, y0, x1, y1, x0, y1})})}};
  }
  if (method == "DOM.focus") {
    Node* n = node_from_params(page, params);
    if (!focusable(n)) throw ProtocolError(-32000, "Element is not focusable");
    if (page.focused != n) {
      page.focused = n;
      page.select_all = false;
      page.invalidate();
    }
    return json::object();
  }
  if (method == "Input.dispatchMouseEvent") {
    std::string type = params.value("type", std::string());
    int x = static_cast<int>(params.value("x", 0.0));
    int y = static_cast<int>(params.value("y", 0.0));
    ensure_layout(page);
    if (type == "mouseMoved") {
      page.hovered = hit_test(*page.doc, *page.layout, x, y + page.scroll_y);
    } else if (type == "mouseReleased") {
      click_at(page, x, y, emit);
    } else if (type == "mouseWheel") {
      scroll_by(page, static_cast<int>(std::lround(params.value("deltaY", 0.0))));
    }
    return json::object();
  }
  if (method == "Input.dispatchKeyEvent") {
    if (params.value("type", std::string()) == "keyDown" || params.value("type", std::string()) == "rawKeyDown") {
      key_down(page, params.value("key", std::string()), params.value("text", std::string()),
               params.value("modifiers", 0), emit);
    }
    return json::object();
  }
  if (method == "Input.insertText") {
    insert_text(page, params.value("text", std::string()));
    return json::object();
  }
  throw ProtocolError(-32601, "'" + method + "' wasn't found");
}

Node* FixtureBrowser::node_from_params(Page& page, const json& params) {
  int id = 0;
  if (params.contains("nodeId")) id = params["nodeId"].get<int>();
  else if (params.contains("backendNodeId")) id = params["backendNodeId"].get<int>();
  Node* n = page.doc->node(id - 1);
  if (!n || !attached(*page.doc, n)) throw ProtocolError(-32000, "Could not find node with given id");
  return n;
}

void FixtureBrowser::navigate(Page& page, const std::string& url, const std::string& method, const std::string& body,
                              bool push_history, const Emit& emit) {
  std::string current = url;
  std::string m = method;
  std::string b = body;
  std::unique_ptr<Document> doc;
  if (current == "about:blank" || current.empty()) {
    current = "about:blank";
    doc = parse_html(kBlankPage);
  } else {
    auto parsed = parse_url(current);
    if (!parsed || parsed->scheme != "http") throw NavigationRefused{"net::ERR_ABORTED"};
    if (!loopback(*parsed)) throw NavigationRefused{"net::ERR_BLOCKED_BY_CLIENT"};
    emit("Page.frameStartedLoading", {{"frameId", page.frame_id}});
    HttpResponse resp;
    std::string failure;
    for (int hop = 0;; ++hop) {
      std::string request_id = "R" + std::to_string(next_request_++);
      emit("Network.requestWillBeSent", {{"requestId", request_id},
                                         {"frameId", page.frame_id},
                                         {"type", "Document"},
                                         {"request", {{"url", current}, {"method", m}}}});
      try {
        resp = fetch_(m, current, b);
      } catch (const std::exception& e) {
        emit("Network.loadingFailed", {{"requestId", request_id}, {"errorText", "net::ERR_CONNECTION_REFUSED"}});
        failure = "net::ERR_CONNECTION_REFUSED";
        break;
      }
      emit("Network.responseReceived",
           {{"requestId", request_id}, {"response", {{"url", current}, {"status", resp.status}}}});
      emit("Network.loadingFinished", {{"requestId", request_id}});
      bool redirect = resp.status == 301 || resp.status == 302 || resp.status == 303 || resp.status == 307 ||
                      resp.status == 308;
      if (!redirect || resp.location.empty()) break;
      if (hop >= 5) {
        failure = "net::ERR_TOO_MANY_REDIRECTS";
        break;
      }
      std::string next = resolve_url(current, resp.location);
      auto pn = parse_url(next);
      if (!pn || !loopback(*pn)) {
        failure = "net::ERR_BLOCKED_BY_CLIENT";
        break;
      }
      current = next;
      if (resp.status != 307 && resp.status != 308) {
        m = "GET";
        b.clear();
      }
    }
    if (!failure.empty()) {
      doc = parse_html("<html><head><title>" + escape_html(current) +
                       "</title></head><body><h1>This page can't be reached</h1><p>" + failure + "</p></body></html>");
    } else if (resp.content_type.starts_with("image/")) {
      doc = parse_html("<html><head><title>" + escape_html(url_basename(current)) + "</title></head><body><img src=\"" +
                       escape_html(current) + "\" alt=\"\"></body></html>");
    } else {
      doc = parse_html(resp.body);
    }
    page.doc = std::move(doc);
    page.url = current;
    page.focused = nullptr;
    page.hovered = nullptr;
    page.select_all = false;
    page.scroll_y = 0;
    page.invalidate();
    load_images(page, emit);
    if (push_history) {
      page.history.resize(static_cast<std::size_t>(page.current + 1));
      page.history.push_back({next_id_++, current, page.doc->title()});
      page.current = static_cast<int>(page.history.size()) - 1;
    } else if (page.current >= 0) {
      page.history[static_cast<std::size_t>(page.current)].title = page.doc->title();
    }
    emit("Page.frameNavigated", {{"frame", {{"id", page.frame_id}, {"url", current}}}});
    emit("Page.domContentEventFired", {{"timestamp", 0}});
    emit("Page.loadEventFired", {{"timestamp", 0}});
    emit("Page.frameStoppedLoading", {{"frameId", page.frame_id}});
    if (!failure.empty() && push_history) throw NavigationRefused{failure};
    return;
  }
  page.doc = std::move(doc);
  page.url = current;
  page.focused = nullptr;
  page.hovered = nullptr;
  page.select_all = false;
  page.scroll_y = 0;
  page.invalidate();
  if (push_history) {
    page.history.resize(static_cast<std::size_t>(page.current + 1));
    page.history.push_back({next_id_++, current, ""});
    page.current = static_cast<int>(page.history.size()) - 1;
  }
}

bool FixtureBrowser::load_images(Page& page, const Emit& emit) {
  bool all = true;
  for (Node* n : document_order(*page.doc)) {
    if (!n->is_element() || n->tag != "img") continue;
    const std::string* src = n->attr("src");
    if (!src || src->empty()) continue;
    std::string url = resolve_url(page.url, *src);
    if (image_cache_.count(url)) continue;
    std::string request_id = "R" + std::to_string(next_request_++);
    emit("Network.requestWillBeSent", {{"requestId", request_id},
                                       {"frameId", page.frame_id},
                                       {"type", "Image"},
                                       {"request", {{"url", url}, {"method", "GET"}}}});
    std::shared_ptr<Raster> decoded;
    auto pu = parse_url(url);
    if (pu && pu->scheme == "http" && loopback(*pu)) {
      try {
        HttpResponse r = fetch_("GET", url, "");
        if (r.status == 200) {
          decoded = std::make_shared<Raster>(decode_png(
              std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(r.body.data()), r.body.size())));
        }
      } catch (const std::exception&) {
        decoded.reset();
      }
    }
    image_cache_[url] = decoded;
    if (decoded) {
      emit("Network.loadingFinished", {{"requestId", request_id}});
    } else {
      all = false;
      emit("Network.loadingFailed", {{"requestId", request_id}, {"errorText", "net::ERR_FAILED"}});
    }
  }
  return all;
}

const Raster* FixtureBrowser::image(const std::string& url) {
  auto it = image_cache_.find(url);
  return it == image_cache_.end() ? nullptr : it->second.get();
}

void FixtureBrowser::ensure_layout(Page& page) {
  if (page.layout) return;
  const std::string base = page.url;
  page.layout = layout_document(
      *page.doc, page.viewport.width,
      [&](const std::string& src) -> std::optional<ImageSize> {
        const Raster* r = image(resolve_url(base, src));
        if (!r) return std::nullopt;
        return ImageSize{r->width(), r->height()};
      },
      page.focused);
  for (auto& op : page.layout->ops) {
    if (op.kind == PaintOp::Kind::image) op.text = resolve_url(base, op.text);
  }
  int max_scroll = std::max(0, page.layout->height - page.viewport.height);
  page.scroll_y = std::clamp(page.scroll_y, 0, max_scroll);
}

void FixtureBrowser::scroll_by(Page& page, int delta) {
  ensure_layout(page);
  int max_scroll = std::max(0, page.layout->height - page.viewport.height);
  page.scroll_y = std::clamp(page.scroll_y + delta, 0, max_scroll);
}

void FixtureBrowser::click_at(Page& page, int x, int y, const Emit& emit) {
  ensure_layout(page);
  Node* hit = hit_test(*page.doc, *page.layout, x, y + page.scroll_y);
  activate(page, hit, emit);
}

void FixtureBrowser::activate(Page& page, Node* target, const Emit& emit) {
  Node* el = closest(target, [](const Node* n) {
    const std::string& t = n->tag;
    return (t == "a" && n->has_attr("href")) || t == "button" || t == "input" || t == "select" ||
           t == "textarea" || t == "label" || t == "summary";
  });
  auto set_focus = [&](Node* n) {
    if (page.focused != n) {
      page.focused = n;
      page.invalidate();
    }
    page.select_all = false;
  };
  if (!el || el->has_attr("disabled")) {
    set_focus(nullptr);
    return;
  }
  if (el->tag == "label") {
    Node* control = nullptr;
    if (const std::string* f = el->attr("for")) {
      for (Node* n : document_order(*page.doc)) {
        const std::string* id = n->is_element() ? n->attr("id") : nullptr;
        if (id && *id == *f) {
          control = n;
          break;
        }
      }
    } else {
      for (Node* n : document_order(*page.doc)) {
        if (n->is_element() && (n->tag == "input" || n->tag == "select" || n->tag == "textarea") &&
            closest(n, [&](const Node* a) { return a == el; })) {
          control = n;
          break;
        }
      }
    }
    if (control && control->tag != "label") activate(page, control, emit);
    return;
  }
  if (el->tag == "a") {
    std::string href = *el->attr("href");
    if (href.starts_with("javascript:")) return;
    set_focus(nullptr);
    try {
      navigate(page, resolve_url(page.url, href), "GET", "", true, emit);
    } catch (const NavigationRefused&) {
    }
    return;
  }
  if (is_text_input(el) || el->tag == "select") {
    set_focus(el);
    return;
  }
  std::string type = el->tag == "button" ? to_lower(el->attr("type") ? *el->attr("type") : "submit") : input_type(el);
  if (el->tag == "input" && type == "checkbox") {
    if (el->has_attr("checked")) {
      std::erase_if(el->attributes, [](const auto& kv) { return kv.first == "checked"; });
    } else {
      el->set_attr("checked", "");
    }
    set_focus(el);
    page.invalidate();
    return;
  }
  if (el->tag == "input" && type == "radio") {
    const std::string* name = el->attr("name");
    for (Node* n : document_order(*page.doc)) {
      if (n->is_element() && n->tag == "input" && input_type(n) == "radio" && name && n->attr("name") &&
          *n->attr("name") == *name) {
        std::erase_if(n->attributes, [](const auto& kv) { return kv.first == "checked"; });
      }
    }
    el->set_attr("checked", "");
    set_focus(el);
    page.invalidate();
    return;
  }
  set_focus(el);
  if (type == "submit") {
    Node* form = closest(el, [](const Node* n) { return n->tag == "form"; });
    if (form) submit_form(page, form, el, emit);
  }
}

void FixtureBrowser::submit_form(Page& page, Node* form, Node* submitter, const Emit& emit) {
  FormFields fields;
  for (Node* n : document_order(*page.doc)) {
    if (!n->is_element() || !closest(n, [&](const Node* a) { return a == form; }) || n == form) continue;
    const std::string* name = n->attr("name");
    if (!name || name->empty() || n->has_attr("disabled")) continue;
    if (n->tag == "input") {
      std::string type = input_type(n);
      if (type == "checkbox" || type == "radio") {
        if (n->has_attr("checked")) fields.emplace_back(*name, n->attr("value") ? *n->attr("value") : "on");
      } else if (type == "submit" || type == "button" || type == "reset" || type == "image") {
        if (n == submitter) fields.emplace_back(*name, text_value(n));
      } else {
        fields.emplace_back(*name, text_value(n));
      }
    } else if (n->tag == "textarea") {
      fields.emplace_back(*name, text_value(n));
    } else if (n->tag == "select") {
      const Node* chosen = nullptr;
      for (const Node* c : n->children) {
        if (!c->is_element() || c->tag != "option") continue;
        if (!chosen || c->has_attr("selected")) chosen = c;
        if (c->has_attr("selected")) break;
      }
      if (chosen) fields.emplace_back(*name, chosen->attr("value") ? *chosen->attr("value") : collapsed_text(chosen));
    } else if (n->tag == "button" && n == submitter) {
      fields.emplace_back(*name, n->attr("value") ? *n->attr("value") : "");
    }
  }
  std::string method = to_lower(form->attr("method") ? *form->attr("method") : "get");
  std::string action = resolve_url(page.url, form->attr("action") ? *form->attr("action") : page.url);
  try {
    if (method == "post") {
      navigate(page, action, "POST", encode_form_urlencoded(fields), true, emit);
    } else {
      std::size_t cut = action.find_first_of("?#");
      if (cut != std::string::npos) action.resize(cut);
      navigate(page, action + "?" + encode_form_urlencoded(fields), "GET", "", true, emit);
    }
  } catch (const NavigationRefused&) {
  }
}

void FixtureBrowser::key_down(Page& page, const std::string& key, const std::string& text, int modifiers,
                              const Emit& emit) {
  const bool command = (modifiers & (2 | 4)) != 0;
  Node* el = page.focused;
  const bool editing = is_text_input(el);
  if (command) {
    if (to_lower(key) == "a" && editing) page.select_all = true;
    return;
  }
  if (key == "Enter") {
    if (editing && el->tag == "textarea") {
      insert_text(page, "\n");
    } else if (editing) {
      Node* form = closest(el, [](const Node* n) { return n->tag == "form"; });
      if (form) submit_form(page, form, nullptr, emit);
    } else if (el && (el->tag == "a" || el->tag == "button" || input_type(el) == "submit")) {
      activate(page, el, emit);
    }
    return;
  }
  if (key == "Backspace" || key == "Delete") {
    if (!editing) return;
    std::string v = page.select_all ? std::string() : text_value(el);
    if (!page.select_all && key == "Backspace") pop_utf8(v);
    page.select_all = false;
    page.focused = el;
    if (el->tag == "textarea") {
      el->children.clear();
      page.doc->create(Node::Type::text, "", el)->text = v;
    } else {
      el->set_attr("value", v);
    }
    page.invalidate();
    return;
  }
  if (key == "Tab") {
    std::vector<Node*> order;
    for (Node* n : document_order(*page.doc)) {
      if (focusable(n)) order.push_back(n);
    }
    if (order.empty()) return;
    auto it = std::find(order.begin(), order.end(), el);
    page.focused = it == order.end() || std::next(it) == order.end() ? order.front() : *std::next(it);
    page.select_all = false;
    page.invalidate();
    return;
  }
  if (!editing) {
    int step = page.viewport.height * 3 / 4;
    if (key == "PageDown" || key == " ") scroll_by(page, step);
    if (key == "PageUp") scroll_by(page, -step);
    if (key == "ArrowDown") scroll_by(page, 40);
    if (key == "ArrowUp") scroll_by(page, -40);
    if (key == "End") scroll_by(page, 1 << 24);
    if (key == "Home") scroll_by(page, -(1 << 24));
    return;
  }
  if (!text.empty() && text != "\r") insert_text(page, text);
}

void FixtureBrowser::insert_text(Page& page, const std::string& text) {
  Node* el = page.focused;
  if (!is_text_input(el)) return;
  std::string v = page.select_all ? text : text_value(el) + text;
  page.select_all = false;
  if (el->tag == "textarea") {
    el->children.clear();
    page.doc->create(Node::Type::text, "", el)->text = v;
  } else {
    el->set_attr("value", v);
  }
  page.invalidate();
}

json FixtureBrowser::evaluate(Page& page, const std::string& expression) {
  std::string e = trim(expression);
  if (!e.empty() && e.back() == ';') e = trim(e.substr(0, e.size() - 1));
  if (e == kSomBindingExpression) {
    ensure_layout(page);
    Rect viewport{0, page.scroll_y, page.viewport.width, page.viewport.height};
    return remote_value(som_manifest_to_json(compute_som(*page.doc, *page.layout, viewport, page.url)));
  }
  if (e == "window.scrollY" || e == "window.pageYOffset" || e == "document.scrollingElement.scrollTop") {
    ensure_layout(page);
    return remote_value(page.scroll_y);
  }
  if (e == "document.title") return remote_value(page.doc->title());
  if (e == "location.href" || e == "window.location.href" || e == "document.URL") return remote_value(page.url);
  if (e == "document.readyState") return remote_value("complete");
  if (e == "window.innerWidth") return remote_value(page.viewport.width);
  if (e == "window.innerHeight") return remote_value(page.viewport.height);
  if (e.size() >= 2 && e.front() == '\'' && e.back() == '\'' && e.find('\'', 1) == e.size() - 1) {
    return remote_value(e.substr(1, e.size() - 2));
  }
  if (e == "undefined") return {{"result", {{"type", "undefined"}}}};
  try {
    return remote_value(json::parse(e));
  } catch (const json::exception&) {
  }
  std::string description = "EvalError: the fixture browser only evaluates literals and known properties: " + e;
  return {{"result", {{"type", "object"}, {"subtype", "error"}, {"description", description}}},
          {"exceptionDetails",
           {{"exceptionId", 1},
            {"text", "Uncaught"},
            {"lineNumber", 0},
            {"columnNumber", 0},
            {"exception", {{"type", "object"}, {"subtype", "error"}, {"className", "EvalError"},
                           {"description", description}}}}}};
}

}  // namespace webagent::fixtures
