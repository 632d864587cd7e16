#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "webagent/fixtures/dom.hpp"
#include "webagent/image.hpp"

namespace webagent::fixtures {

struct PaintOp {
  enum class Kind { fill, stroke, text, image };
  Kind kind = Kind::fill;
  Rect rect;  // for text, x/y is the pen origin
  Rgb color;
  std::string text;  // text, or the image source
  int scale = 2;
  bool bold = false;
};

/// Block-and-inline layout of a fixture page. Geometry is in page pixels
/// with the origin at the document's top-left corner.
struct Layout {
  /// Per node index: one rect per line the node occupies (blocks and atoms
  /// have exactly one).
  std::vector<std::vector<Rect>> fragments;
  std::vector<PaintOp> ops;
  int width = 0;
  int height = 0;

  bool rendered(const Node* n) const;
  /// Union of the node's fragments; empty when not rendered.
  Rect box(const Node* n) const;
};

struct ImageSize {
  int width = 0;
  int height = 0;
};
using ImageSizeLookup = std::function<std::optional<ImageSize>(const std::string& src)>;
using ImageLookup = std::function<const Raster*(const std::string& src)>;

/// Excluded from rendering and from the accessibility tree: head-only tags,
/// `hidden`, inline display:none and hidden inputs.
bool is_hidden(const Node* element);
bool is_block_level(const Node* element);
/// Lowercased type attribute of an input, "text" when absent.
std::string input_type(const Node* element);
bool is_text_input(const Node* element);

Layout layout_document(const Document& doc, int viewport_width, const ImageSizeLookup& images,
                       const Node* focused = nullptr);

/// Paints the viewport `[scroll_y, scroll_y + height)` of the page.
Raster paint(const Layout& layout, int width, int height, int scroll_y, const ImageLookup& images);

/// Deepest rendered element whose fragments contain the page point.
Node* hit_test(const Document& doc, const Layout& layout, int x, int y);

}  // namespace webagent::fixtures
