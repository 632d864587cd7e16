#include "webagent/fixtures/selector.hpp"

#include <cctype>

#include "webagent/text_util.hpp"

namespace webagent::fixtures {

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  bool done() const { return i_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[i_]; }
  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  std::string ident() {
    std::size_t start = i_;
    while (!done() && ident_char(s_[i_])) ++i_;
    if (start == i_) fail("expected identifier");
    return std::string(s_.substr(start, i_ - start));
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw SelectorError("selector '" + std::string(s_) + "': " + what + " at " + std::to_string(i_));
  }
  void advance() { ++i_; }
  std::string_view rest_until(char c) {
    std::size_t end = s_.find(c, i_);
    if (end == std::string_view::npos) fail(std::string("missing '") + c + "'");
    std::string_view out = s_.substr(i_, end - i_);
    i_ = end;
    return out;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

Selector Selector::parse(std::string_view text) {
  Selector sel;
  Parser p(text);
  p.skip_ws();
  if (p.done()) p.fail("empty selector");
  Complex current;
  char pending = ' ';
  while (true) {
    p.skip_ws();
    Simple simple;
    bool any = false;
    if (p.peek() == '*') {
      p.advance();
      simple.tag = "*";
      any = true;
    } else if (!p.done() && ident_char(p.peek())) {
      simple.tag = to_lower(p.ident());
      any = true;
    }
    while (!p.done()) {
      char c = p.peek();
      if (c == '#') {
        p.advance();
        simple.id = p.ident();
      } else if (c == '.') {
        p.advance();
        simple.classes.push_back(p.ident());
      } else if (c == '[') {
        p.advance();
        p.skip_ws();
        std::string name = to_lower(p.ident());
        p.skip_ws();
        std::optional<std::string> value;
        if (p.peek() == '=') {
          p.advance();
          p.skip_ws();
          char q = p.peek();
          if (q == '"' || q == '\'') {
            p.advance();
            value = std::string(p.rest_until(q));
            p.advance();
          } else {
            value = p.ident();
          }
          p.skip_ws();
        }
        p.expect(']');
        simple.attrs.emplace_back(std::move(name), std::move(value));
      } else if (c == ':') {
        p.advance();
        std::string pseudo = to_lower(p.ident());
        if (pseudo == "first-child") {
          simple.nth_child = 1;
        } else if (pseudo == "last-child") {
          simple.nth_child = -1;
        } else if (pseudo == "nth-child") {
          p.expect('(');
          std::string n = trim(p.rest_until(')'));
          p.advance();
          try {
            std::size_t used = 0;
            simple.nth_child = std::stoi(n, &used);
            if (used != n.size() || simple.nth_child < 1) throw std::invalid_argument(n);
          } catch (const std::exception&) {
            p.fail("unsupported nth-child argument '" + n + "'");
          }
        } else {
          p.fail("unsupported pseudo-class :" + pseudo);
        }
      } else {
        break;
      }
      any = true;
    }
    if (!any) p.fail("expected a simple selector");
    current.push_back(Step{std::move(simple), pending});
    pending = ' ';

    bool ws = !p.done() && std::isspace(static_cast<unsigned char>(p.peek()));
    p.skip_ws();
    if (p.done()) break;
    char c = p.peek();
    if (c == ',') {
      p.advance();
      sel.alternatives_.push_back(std::move(current));
      current.clear();
      p.skip_ws();
      if (p.done()) p.fail("trailing comma");
      continue;
    }
    if (c == '>') {
      p.advance();
      pending = '>';
      continue;
    }
    if (!ws) p.fail(std::string("unexpected '") + c + "'");
  }
  sel.alternatives_.push_back(std::move(current));
  return sel;
}

bool Selector::match_simple(const Simple& s, const Node* n) {
  if (!n || !n->is_element()) return false;
  if (!s.tag.empty() && s.tag != "*" && s.tag != n->tag) return false;
  if (!s.id.empty()) {
    const std::string* id = n->attr("id");
    if (!id || *id != s.id) return false;
  }
  for (const auto& c : s.classes) {
    if (!n->has_class(c)) return false;
  }
  for (const auto& [name, value] : s.attrs) {
    const std::string* v = n->attr(name);
    if (!v) return false;
    if (value && *v != *value) return false;
  }
  if (s.nth_child > 0 && n->element_position() != s.nth_child) return false;
  if (s.nth_child == -1 && n->element_position() != n->element_sibling_count()) return false;
  return true;
}

bool Selector::match_complex(const Complex& c, std::size_t at, const Node* n) {
  if (!match_simple(c[at].simple, n)) return false;
  if (at == 0) return true;
  if (c[at].combinator == '>') return match_complex(c, at - 1, n->parent);
  for (const Node* a = n->parent; a; a = a->parent) {
    if (match_complex(c, at - 1, a)) return true;
  }
  return false;
}

bool Selector::matches(const Node* element) const {
  for (const auto& c : alternatives_) {
    if (match_complex(c, c.size() - 1, element)) return true;
  }
  return false;
}

std::vector<Node*> Selector::query_all(const Document& doc) const {
  std::vector<Node*> out;
  for (Node* n : document_order(doc)) {
    if (n->is_element() && matches(n)) out.push_back(n);
  }
  return out;
}

Node* Selector::query_first(const Document& doc) const {
  for (Node* n : document_order(doc)) {
    if (n->is_element() && matches(n)) return n;
  }
  return nullptr;
}

}  // namespace webagent::fixtures
