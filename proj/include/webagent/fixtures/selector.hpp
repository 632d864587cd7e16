#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "webagent/fixtures/dom.hpp"

namespace webagent::fixtures {

class SelectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSS selector subset: type, universal, #id, .class, [attr], [attr=value],
/// :first-child, :last-child, :nth-child(n), descendant and child
/// combinators, and comma-separated lists.
class Selector {
 public:
  static Selector parse(std::string_view text);

  bool matches(const Node* element) const;
  std::vector<Node*> query_all(const Document& doc) const;
  Node* query_first(const Document& doc) const;

 private:
  struct Simple {
    std::string tag;  // empty or "*" for any
    std::string id;
    std::vector<std::string> classes;
    std::vector<std::pair<std::string, std::optional<std::string>>> attrs;
    int nth_child = 0;  // 0: none, -1: last-child
  };
  struct Step {
    Simple simple;
    char combinator = ' ';  // relation to the previous step: ' ' or '>'
  };
  using Complex = std::vector<Step>;

  static bool match_simple(const Simple& s, const Node* n);
  static bool match_complex(const Complex& c, std::size_t at, const Node* n);

  std::vector<Complex> alternatives_;
};

}  // namespace webagent::fixtures
