#include "webagent/fixtures/dom.hpp"

#include <cctype>
#include <set>

#include "webagent/text_util.hpp"

namespace webagent::fixtures {

const std::string* Node::attr(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

void Node::set_attr(const std::string& name, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(name, std::move(value));
}

bool Node::has_class(std::string_view cls) const {
  const std::string* c = attr("class");
  if (!c) return false;
  for (const auto& part : split(*c, " ")) {
    if (part == cls) return true;
  }
  return false;
}

int Node::element_position() const {
  if (!parent) return 1;
  int pos = 0;
  for (const Node* s : parent->children) {
    if (s->is_element()) ++pos;
    if (s == this) return pos;
  }
  return pos;
}

int Node::element_sibling_count() const {
  if (!parent) return 1;
  int n = 0;
  for (const Node* s : parent->children) n += s->is_element() ? 1 : 0;
  return n;
}

Node* Document::node(int index) const {
  if (index < 0 || index >= static_cast<int>(nodes_.size())) return nullptr;
  return nodes_[static_cast<std::size_t>(index)].get();
}

Node* Document::find_first(std::string_view tag) const {
  for (const auto& n : nodes_) {
    if (n->is_element() && n->tag == tag) return n.get();
  }
  return nullptr;
}

std::string Document::title() const {
  Node* t = find_first("title");
  return t ? collapsed_text(t) : std::string();
}

Node* Document::create(Node::Type type, std::string tag, Node* parent) {
  auto n = std::make_unique<Node>();
  n->type = type;
  n->tag = std::move(tag);
  n->parent = parent;
  n->index = static_cast<int>(nodes_.size());
  if (parent) parent->children.push_back(n.get());
  nodes_.push_back(std::move(n));
  return nodes_.back().get();
}

bool is_void_element(std::string_view tag) {
  static const std::set<std::string_view> v = {"area", "base", "br", "col", "embed", "hr", "img",
                                               "input", "link", "meta", "source", "track", "wbr"};
  return v.count(tag) != 0;
}

std::string decode_entities(std::string_view s) {
  if (s.find('&') == std::string_view::npos) return std::string(s);
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '&') {
      std::size_t semi = s.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 10) {
        std::string_view name = s.substr(i + 1, semi - i - 1);
        std::string rep;
        if (name == "amp") rep = "&";
        else if (name == "lt") rep = "<";
        else if (name == "gt") rep = ">";
        else if (name == "quot") rep = "\"";
        else if (name == "apos" || name == "#39") rep = "'";
        else if (name == "nbsp") rep = " ";
        if (!rep.empty()) {
          out += rep;
          i = semi;
          continue;
        }
      }
    }
    out += s[i];
  }
  return out;
}

std::string escape_html(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::unique_ptr<Document> parse_html(std::string_view html) {
  auto doc = std::make_unique<Document>();
  Node* root = doc->create(Node::Type::document, "", nullptr);
  Node* cur = root;
  std::size_t i = 0;
  auto add_text = [&](std::string_view raw) {
    if (raw.empty()) return;
    Node* t = doc->create(Node::Type::text, "", cur);
    t->text = decode_entities(raw);
  };
  while (i < html.size()) {
    std::size_t lt = html.find('<', i);
    if (lt == std::string_view::npos) {
      add_text(html.substr(i));
      break;
    }
    add_text(html.substr(i, lt - i));
    i = lt;
    if (html.compare(i, 4, "<!--") == 0) {
      std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (html.compare(i, 2, "<!") == 0 || html.compare(i, 2, "<?") == 0) {
      std::size_t end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    bool closing = i + 1 < html.size() && html[i + 1] == '/';
    std::size_t j = i + (closing ? 2 : 1);
    std::size_t name_start = j;
    while (j < html.size() && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '-')) ++j;
    std::string name = to_lower(html.substr(name_start, j - name_start));
    if (name.empty()) {
      add_text("<");
      ++i;
      continue;
    }
    if (closing) {
      std::size_t end = html.find('>', j);
      i = end == std::string_view::npos ? html.size() : end + 1;
      for (Node* n = cur; n && n != root; n = n->parent) {
        if (n->tag == name) {
          cur = n->parent;
          break;
        }
      }
      continue;
    }
    Node* el = doc->create(Node::Type::element, name, cur);
    bool self_closing = false;
    for (;;) {
      while (j < html.size() && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
      if (j >= html.size()) break;
      if (html[j] == '>') {
        ++j;
        break;
      }
      if (html[j] == '/') {
        self_closing = true;
        ++j;
        continue;
      }
      std::size_t an = j;
      while (j < html.size() && !std::isspace(static_cast<unsigned char>(html[j])) && html[j] != '=' &&
             html[j] != '>' && html[j] != '/') {
        ++j;
      }
      std::string aname = to_lower(html.substr(an, j - an));
      std::string aval;
      while (j < html.size() && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
      if (j < html.size() && html[j] == '=') {
        ++j;
        while (j < html.size() && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
        if (j < html.size() && (html[j] == '"' || html[j] == '\'')) {
          char q = html[j++];
          std::size_t end = html.find(q, j);
          if (end == std::string_view::npos) end = html.size();
          aval = decode_entities(html.substr(j, end - j));
          j = end + 1;
        } else {
          std::size_t vs = j;
          while (j < html.size() && !std::isspace(static_cast<unsigned char>(html[j])) && html[j] != '>') ++j;
          aval = decode_entities(html.substr(vs, j - vs));
        }
      }
      if (!aname.empty()) el->attributes.emplace_back(aname, aval);
    }
    i = j;
    if (name == "script" || name == "style" || name == "textarea" || name == "title") {
      std::string lower_rest = to_lower(html.substr(i));
      std::size_t end = lower_rest.find("</" + name);
      std::size_t stop = end == std::string::npos ? html.size() : i + end;
      if (stop > i) {
        Node* t = doc->create(Node::Type::text, "", el);
        t->text = name == "script" || name == "style" ? std::string(html.substr(i, stop - i))
                                                      : decode_entities(html.substr(i, stop - i));
      }
      std::size_t gt = html.find('>', stop);
      i = gt == std::string_view::npos ? html.size() : gt + 1;
      continue;
    }
    if (!self_closing && !is_void_element(name)) cur = el;
  }
  return doc;
}

namespace {

void gather_text(const Node* n, std::string& out) {
  if (n->is_text()) {
    out += n->text;
    return;
  }
  if (n->is_element() && (n->tag == "script" || n->tag == "style")) return;
  for (const Node* c : n->children) gather_text(c, out);
}

void serialize(const Node* n, std::string& out) {
  if (n->is_text()) {
    if (n->parent && (n->parent->tag == "script" || n->parent->tag == "style")) {
      out += n->text;
    } else {
      out += escape_html(n->text);
    }
    return;
  }
  if (n->type == Node::Type::document) {
    for (const Node* c : n->children) serialize(c, out);
    return;
  }
  out += "<" + n->tag;
  for (const auto& [k, v] : n->attributes) out += " " + k + "=\"" + escape_html(v) + "\"";
  out += ">";
  if (is_void_element(n->tag)) return;
  for (const Node* c : n->children) serialize(c, out);
  out += "</" + n->tag + ">";
}

}  // namespace

std::string collapsed_text(const Node* node) {
  std::string raw;
  gather_text(node, raw);
  std::string out;
  bool space = false;
  for (char c : raw) {
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

std::vector<Node*> document_order(const Document& doc) {
  std::vector<Node*> out;
  std::vector<Node*> stack{doc.root()};
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    out.push_back(n);
    for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::string outer_html(const Node* node) {
  std::string out;
  serialize(node, out);
  return out;
}

}  // namespace webagent::fixtures
