#include "webagent/fixtures/semantics.hpp"

#include <cctype>
#include <map>
#include <set>

#include "webagent/fixtures/selector.hpp"
#include "webagent/text_util.hpp"

namespace webagent::fixtures {

using nlohmann::json;

namespace {

std::string collapse(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out += ' ';
      space = false;
      out += c;
    }
  }
  return out;
}

void content_name(const Node* n, std::string& out) {
  if (n->is_text()) {
    out += " " + n->text;
    return;
  }
  if (n->is_element() && is_hidden(n)) return;
  if (n->is_element() && n->tag == "img") {
    if (const std::string* alt = n->attr("alt")) out += " " + *alt;
    return;
  }
  for (const Node* c : n->children) content_name(c, out);
}

bool names_from_content(const std::string& role) {
  static const std::set<std::string> r = {"link",       "button",   "heading", "cell",
                                          "columnheader", "tab",    "menuitem", "DisclosureTriangle",
                                          "LabelText",  "option"};
  return r.count(role) != 0;
}

std::string label_for(const Document& doc, const Node* el) {
  const std::string* id = el->attr("id");
  for (const auto& n : doc.nodes()) {
    if (!n->is_element() || n->tag != "label") continue;
    const std::string* f = n->attr("for");
    if ((f && id && *f == *id)) return collapsed_text(n.get());
  }
  for (const Node* a = el->parent; a; a = a->parent) {
    if (a->is_element() && a->tag == "label") {
      std::string raw;
      for (const Node* c : a->children) {
        if (c != el && c->is_text()) raw += " " + c->text;
      }
      return collapse(raw);
    }
  }
  return {};
}

std::string selected_option_text(const Node* select) {
  const Node* first = nullptr;
  for (const Node* c : select->children) {
    if (!c->is_element() || c->tag != "option") continue;
    if (!first) first = c;
    if (c->has_attr("selected")) return collapsed_text(c);
  }
  return first ? collapsed_text(first) : std::string();
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

constexpr int kValueTextIdBase = 1000000;

json prop(const std::string& name, const std::string& type, json value) {
  return {{"name", name}, {"value", {{"type", type}, {"value", std::move(value)}}}};
}

class AxBuilder {
 public:
  AxBuilder(const Document& doc, const Node* focused, const UrlResolver& resolve)
      : doc_(doc), focused_(focused), resolve_(resolve) {}

  json run() {
    const Node* root = doc_.root();
    json node = base(root, "RootWebArea", doc_.title());
    json children = json::array();
    for (const Node* c : root->children) emit(c, children);
    node["childIds"] = children;
    nodes_.insert(nodes_.begin(), node);
    return {{"nodes", nodes_}};
  }

 private:
  json base(const Node* n, const std::string& role, const std::string& name) {
    return {{"nodeId", std::to_string(node_id(n))},
            {"ignored", false},
            {"role", {{"type", "role"}, {"value", role}}},
            {"name", {{"type", "computedString"}, {"value", name}}},
            {"properties", json::array()},
            {"childIds", json::array()},
            {"backendDOMNodeId", node_id(n)}};
  }

  /// Appends the AX nodes for `n` and adds its top-level ids to `ids`.
  void emit(const Node* n, json& ids) {
    if (n->is_text()) {
      std::string t = collapse(n->text);
      if (t.empty()) return;
      nodes_.push_back(base(n, "StaticText", t));
      ids.push_back(std::to_string(node_id(n)));
      return;
    }
    if (!n->is_element() || is_hidden(n)) return;
    const std::string* aria_hidden = n->attr("aria-hidden");
    if (aria_hidden && *aria_hidden == "true") {
      json node = base(n, "none", "");
      node["ignored"] = true;
      nodes_.push_back(node);
      ids.push_back(std::to_string(node_id(n)));
      return;
    }
    std::string role = ax_role(n);
    json node = base(n, role, ax_name(doc_, n));
    json& props = node["properties"];
    if (role == "heading") props.push_back(prop("level", "integer", n->tag[1] - '0'));
    if (role == "checkbox" || role == "radio") {
      props.push_back(prop("checked", "tristate", n->has_attr("checked") ? "true" : "false"));
    }
    if (role == "combobox") props.push_back(prop("value", "string", selected_option_text(n)));
    if (n->has_attr("disabled")) props.push_back(prop("disabled", "boolean", true));
    if (n->has_attr("required")) props.push_back(prop("required", "boolean", true));
    if (n == focused_) props.push_back(prop("focused", "boolean", true));
    if ((role == "link" || role == "img")) {
      const std::string* u = n->attr(role == "link" ? "href" : "src");
      if (u) props.push_back(prop("url", "string", resolve_ ? resolve_(*u) : *u));
    }
    std::size_t at = nodes_.size();
    nodes_.push_back(json());
    json children = json::array();
    if (role == "textbox" || role == "searchbox") {
      std::string v = text_value(n);
      if (!v.empty()) {
        json t = base(n, "StaticText", collapse(v));
        t["nodeId"] = std::to_string(kValueTextIdBase + node_id(n));
        t.erase("backendDOMNodeId");
        nodes_.push_back(t);
        children.push_back(t["nodeId"]);
      }
    } else if (role != "img" && role != "combobox") {
      for (const Node* c : n->children) emit(c, children);
    }
    node["childIds"] = children;
    nodes_[at] = std::move(node);
    ids.push_back(std::to_string(node_id(n)));
  }

  const Document& doc_;
  const Node* focused_;
  const UrlResolver& resolve_;
  json nodes_ = json::array();
};

}  // namespace

std::string ax_role(const Node* el) {
  if (const std::string* r = el->attr("role")) {
    if (!r->empty()) return *r;
  }
  const std::string& t = el->tag;
  if (t == "a") return el->has_attr("href") ? "link" : "generic";
  if (t == "button") return "button";
  if (t == "input") {
    std::string type = input_type(el);
    if (type == "submit" || type == "button" || type == "reset") return "button";
    if (type == "checkbox") return "checkbox";
    if (type == "radio") return "radio";
    if (type == "search") return "searchbox";
    return "textbox";
  }
  if (t == "textarea") return "textbox";
  if (t == "select") return "combobox";
  if (t == "img") return "img";
  if (t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6') return "heading";
  static const std::map<std::string, std::string> simple = {
      {"p", "paragraph"},     {"ul", "list"},          {"ol", "list"},         {"li", "listitem"},
      {"nav", "navigation"},  {"header", "banner"},    {"footer", "contentinfo"}, {"main", "main"},
      {"article", "article"}, {"aside", "complementary"}, {"table", "table"},  {"tr", "row"},
      {"td", "cell"},         {"th", "columnheader"},  {"label", "LabelText"}, {"hr", "separator"},
      {"details", "group"},   {"summary", "DisclosureTriangle"}, {"blockquote", "blockquote"},
      {"figure", "figure"},   {"dl", "list"},          {"dt", "term"},         {"dd", "definition"}};
  auto it = simple.find(t);
  return it == simple.end() ? "generic" : it->second;
}

std::string ax_name(const Document& doc, const Node* el) {
  if (const std::string* l = el->attr("aria-label")) {
    if (!trim(*l).empty()) return collapse(*l);
  }
  std::string role = ax_role(el);
  if (el->tag == "img") {
    const std::string* alt = el->attr("alt");
    return alt ? collapse(*alt) : std::string();
  }
  if (el->tag == "input" && role == "button") {
    const std::string* v = el->attr("value");
    return v ? collapse(*v) : std::string(input_type(el) == "reset" ? "Reset" : "Submit");
  }
  if (el->tag == "input" || el->tag == "textarea" || el->tag == "select") {
    std::string l = label_for(doc, el);
    if (!l.empty()) return l;
    if (const std::string* ph = el->attr("placeholder")) return collapse(*ph);
    if (const std::string* title = el->attr("title")) return collapse(*title);
    return {};
  }
  if (names_from_content(role)) {
    std::string raw;
    content_name(el, raw);
    return collapse(raw);
  }
  return {};
}

json accessibility_tree(const Document& doc, const Node* focused, const UrlResolver& resolve) {
  return AxBuilder(doc, focused, resolve).run();
}

bool is_interactable(const Node* el) {
  if (!el->is_element()) return false;
  const std::string& t = el->tag;
  if (t == "a" && el->has_attr("href")) return true;
  if (t == "button" || t == "select" || t == "textarea" || t == "summary" || t == "img") return true;
  if (t == "input" && input_type(el) != "hidden") return true;
  static const std::set<std::string> roles = {"button", "link",     "checkbox", "radio", "tab",
                                              "menuitem", "combobox", "switch",  "slider"};
  if (const std::string* r = el->attr("role")) {
    if (roles.count(*r)) return true;
  }
  if (el->has_attr("onclick")) return true;
  if (const std::string* ti = el->attr("tabindex")) {
    try {
      if (std::stoi(*ti) >= 0) return true;
    } catch (const std::exception&) {
    }
  }
  return false;
}

std::string unique_selector(const Document& doc, const Node* el) {
  if (const std::string* id = el->attr("id")) {
    bool ident = !id->empty() && !std::isdigit(static_cast<unsigned char>((*id)[0]));
    for (char c : *id) ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_');
    if (ident && Selector::parse("#" + *id).query_all(doc).size() == 1) return "#" + *id;
  }
  std::vector<std::string> steps;
  for (const Node* n = el; n && n->is_element(); n = n->parent) {
    if (n->tag == "html") {
      steps.push_back("html");
      break;
    }
    steps.push_back(n->tag + ":nth-child(" + std::to_string(n->element_position()) + ")");
  }
  std::string out;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (!out.empty()) out += " > ";
    out += *it;
  }
  return out;
}

namespace {

std::string mark_tag(const Node* el) {
  std::string tag = el->tag;
  const std::string* r = el->attr("role");
  if (r && !r->empty() && (tag == "div" || tag == "span" || tag == "li")) tag = *r;
  for (char& c : tag) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return tag;
}

std::string mark_text(const Document& doc, const Node* el) {
  const std::string& t = el->tag;
  if (t == "img") {
    const std::string* alt = el->attr("alt");
    return alt ? collapse(*alt) : std::string();
  }
  if (t == "select") return selected_option_text(el);
  if (t == "input" || t == "textarea") {
    std::string type = t == "input" ? input_type(el) : "text";
    if (type == "submit" || type == "button" || type == "reset") {
      const std::string* v = el->attr("value");
      return v ? collapse(*v) : std::string(type == "reset" ? "Reset" : "Submit");
    }
    return ax_name(doc, el);
  }
  std::string text = collapsed_text(el);
  if (text.empty()) {
    if (const std::string* l = el->attr("aria-label")) text = collapse(*l);
  }
  return text;
}

const Node* block_ancestor(const Node* n) {
  for (const Node* a = n->parent; a; a = a->parent) {
    if (a->is_element() && is_block_level(a)) return a;
  }
  return nullptr;
}

bool inside_interactable(const Node* n) {
  for (const Node* a = n->parent; a; a = a->parent) {
    if (a->is_element() && is_interactable(a)) return true;
  }
  return false;
}

bool covers(const Node* el, const Node* hit) {
  for (const Node* n = hit; n; n = n->parent) {
    if (n == el) return true;
  }
  return false;
}

}  // namespace

SomManifest compute_som(const Document& doc, const Layout& layout, const Rect& viewport, const std::string& page_url) {
  SomManifest m;
  m.page_url = page_url;
  std::set<std::string> selectors;
  const Node* last_block = nullptr;
  std::int64_t last_after = -1;
  for (Node* n : document_order(doc)) {
    if (n->is_element()) {
      if (!is_interactable(n) || !layout.rendered(n)) continue;
      Rect box = layout.box(n);
      if (box.empty() || !box.intersects(viewport)) continue;
      Node* hit = hit_test(doc, layout, box.x + box.width / 2, box.y + box.height / 2);
      if (!covers(n, hit)) continue;
      std::string selector = unique_selector(doc, n);
      if (!selectors.insert(selector).second) continue;
      SomMark mark;
      mark.id = static_cast<std::int64_t>(m.marks.size()) + 1;
      mark.bbox = box;
      mark.tag_type = mark_tag(n);
      mark.text_content = mark_text(doc, n);
      mark.selector = selector;
      m.marks.push_back(std::move(mark));
    } else if (n->is_text()) {
      std::string t = collapse(n->text);
      if (t.empty() || !layout.rendered(n) || inside_interactable(n)) continue;
      if (!layout.box(n).intersects(viewport)) continue;
      std::int64_t after = static_cast<std::int64_t>(m.marks.size());
      const Node* block = block_ancestor(n);
      if (!m.static_texts.empty() && block == last_block && after == last_after) {
        m.static_texts.back().text += " " + t;
      } else {
        m.static_texts.push_back({t, after});
      }
      last_block = block;
      last_after = after;
    }
  }
  return m;
}

}  // namespace webagent::fixtures
