#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace webagent::fixtures {

struct Node {
  enum class Type { document, element, text };

  Type type = Type::element;
  std::string tag;   // lowercase; empty for text and document nodes
  std::string text;  // text nodes only
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node*> children;
  Node* parent = nullptr;
  int index = 0;  // position in Document::nodes, document order

  bool is_element() const { return type == Type::element; }
  bool is_text() const { return type == Type::text; }
  const std::string* attr(std::string_view name) const;
  bool has_attr(std::string_view name) const { return attr(name) != nullptr; }
  void set_attr(const std::string& name, std::string value);
  bool has_class(std::string_view cls) const;
  /// Index among element siblings, 1-based.
  int element_position() const;
  int element_sibling_count() const;
};

/// A parsed page. Nodes are owned by the document and numbered in document
/// order, so indices double as stable node ids.
class Document {
 public:
  Node* root() const { return nodes_.front().get(); }
  const std::vector<std::unique_ptr<Node>>& nodes() const { return nodes_; }
  Node* node(int index) const;
  Node* find_first(std::string_view tag) const;
  std::string title() const;

  Node* create(Node::Type type, std::string tag, Node* parent);

 private:
  std::vector<std::unique_ptr<Node>> nodes_;
};

/// Lenient parser for the fixture pages' HTML subset: elements, attributes,
/// text, comments, void elements, raw-text script/style bodies and the
/// common named entities.
std::unique_ptr<Document> parse_html(std::string_view html);

std::string decode_entities(std::string_view s);
std::string escape_html(std::string_view s);

/// Text content with whitespace runs collapsed and trimmed.
std::string collapsed_text(const Node* node);

/// Outer HTML serialization (used by DOM.getOuterHTML).
std::string outer_html(const Node* node);

bool is_void_element(std::string_view tag);

/// Pre-order walk of the live tree.
std::vector<Node*> document_order(const Document& doc);

}  // namespace webagent::fixtures
