#include "webagent/fixtures/layout.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "webagent/text_util.hpp"

namespace webagent::fixtures {

namespace {

constexpr Rgb kText{20, 20, 20};
constexpr Rgb kLink{0, 0, 200};
constexpr Rgb kMuted{120, 120, 120};
constexpr Rgb kBorder{140, 140, 140};
constexpr Rgb kPanel{238, 238, 238};
constexpr Rgb kCardBorder{200, 200, 200};
constexpr Rgb kButton{225, 225, 225};
constexpr Rgb kFocus{30, 100, 220};
constexpr Rgb kWhite{255, 255, 255};

constexpr int kGlyphRows = 7;

struct TextStyle {
  Rgb color = kText;
  int scale = 2;
  bool bold = false;
  bool underline = false;
};

int line_height(int scale) { return kGlyphRows * scale + 3 * scale; }

struct BlockStyle {
  int padding = 0;
  int padding_left = 0;
  int margin_bottom = 0;
  bool border = false;
  std::optional<Rgb> background;
};

BlockStyle block_style(const Node* el) {
  BlockStyle s;
  const std::string& t = el->tag;
  if (t == "body") s.padding = 8;
  if (t == "p" || t == "ul" || t == "ol" || t == "form" || t == "table" || t == "dl" || t == "pre" ||
      t == "blockquote" || t == "fieldset" || t == "figure") {
    s.margin_bottom = 10;
  }
  if (t.size() == 2 && t[0] == 'h' && t[1] >= '1' && t[1] <= '6') s.margin_bottom = 10;
  if (t == "ul" || t == "ol") s.padding_left = 24;
  if (t == "li") s.margin_bottom = 4;
  if (t == "nav" || t == "header" || t == "footer") {
    s.padding = 8;
    s.margin_bottom = 10;
    s.background = kPanel;
  }
  if (el->has_class("card")) {
    s.padding = 8;
    s.margin_bottom = 8;
    s.border = true;
  }
  return s;
}

TextStyle child_style(TextStyle st, const Node* el) {
  const std::string& t = el->tag;
  if (t == "a" && el->has_attr("href")) {
    st.color = kLink;
    st.underline = true;
  }
  if (t == "b" || t == "strong" || t == "th") st.bold = true;
  if (t == "h1") st = {st.color, 4, true, st.underline};
  if (t == "h2") st = {st.color, 3, true, st.underline};
  if (t == "h3" || t == "h4" || t == "h5" || t == "h6") st = {st.color, 2, true, st.underline};
  if (el->has_class("muted")) st.color = kMuted;
  if (el->has_class("price")) st.color = {170, 0, 0};
  return st;
}

bool is_atom(const Node* el) {
  static const std::set<std::string> atoms = {"img", "input", "button", "select", "textarea"};
  return atoms.count(el->tag) != 0;
}

std::string fit(std::string s, int width, int scale) {
  std::size_t max_chars = static_cast<std::size_t>(std::max(0, width / (6 * scale)));
  if (s.size() > max_chars) s.resize(max_chars);
  return s;
}

std::string button_label(const Node* el) {
  if (el->tag == "button") return collapsed_text(el);
  if (const std::string* v = el->attr("value")) return *v;
  return input_type(el) == "reset" ? "Reset" : "Submit";
}

std::string selected_option(const Node* select) {
  const Node* first = nullptr;
  for (const Node* c : select->children) {
    if (!c->is_element() || c->tag != "option") continue;
    if (!first) first = c;
    if (c->has_attr("selected")) return collapsed_text(c);
  }
  return first ? collapsed_text(first) : std::string();
}

struct Item {
  enum class Kind { word, atom, line_break };
  Kind kind = Kind::word;
  const Node* node = nullptr;  // text node or atom element
  std::string text;
  TextStyle style;
  int width = 0;
  int height = 0;
  bool space_before = false;
  std::vector<const Node*> inline_chain;
};

class LayoutBuilder {
 public:
  LayoutBuilder(const Document& doc, const ImageSizeLookup& images, const Node* focused)
      : doc_(doc), images_(images), focused_(focused) {
    out_.fragments.resize(doc.nodes().size());
  }

  Layout run(int width) {
    out_.width = width;
    int y = 0;
    const Node* root = doc_.root();
    std::vector<const Node*> children(root->children.begin(), root->children.end());
    y += layout_children(children, 0, 0, width, TextStyle{});
    out_.height = y;
    return std::move(out_);
  }

 private:
  void add_fragment(const Node* n, const Rect& r, int line_id) {
    auto& frags = out_.fragments[static_cast<std::size_t>(n->index)];
    auto it = line_of_.find(n->index);
    if (!frags.empty() && it != line_of_.end() && it->second == line_id && line_id >= 0) {
      Rect& last = frags.back();
      int x0 = std::min(last.x, r.x), y0 = std::min(last.y, r.y);
      int x1 = std::max(last.x + last.width, r.x + r.width), y1 = std::max(last.y + last.height, r.y + r.height);
      last = {x0, y0, x1 - x0, y1 - y0};
      return;
    }
    frags.push_back(r);
    line_of_[n->index] = line_id;
  }

  /// Lays out a sequence of sibling nodes inside a block container; returns
  /// the height used.
  int layout_children(const std::vector<const Node*>& children, int x, int y, int width, const TextStyle& st) {
    int cursor = y;
    std::vector<const Node*> run;
    auto flush = [&] {
      if (run.empty()) return;
      cursor += layout_inline(run, x, cursor, width, st);
      run.clear();
    };
    for (const Node* c : children) {
      if (c->is_element() && is_hidden(c)) continue;
      if (c->is_element() && is_block_level(c)) {
        flush();
        cursor += layout_block(c, x, cursor, width, st);
        cursor += block_style(c).margin_bottom;
      } else {
        run.push_back(c);
      }
    }
    flush();
    return cursor - y;
  }

  int layout_block(const Node* el, int x, int y, int width, TextStyle st) {
    st = child_style(st, el);
    BlockStyle bs = block_style(el);
    std::size_t op_mark = out_.ops.size();
    int inset = bs.padding + (bs.border ? 1 : 0);
    int cx = x + inset + bs.padding_left;
    int cw = std::max(0, width - 2 * inset - bs.padding_left);
    int h;
    if (el->tag == "hr") {
      out_.ops.push_back({PaintOp::Kind::fill, {x, y + 4, width, 1}, kCardBorder, {}, 2, false});
      h = 9;
    } else {
      std::vector<const Node*> children(el->children.begin(), el->children.end());
      int inner = layout_children(children, cx, y + inset, cw, st);
      h = inner + 2 * inset;
    }
    Rect box{x, y, width, h};
    add_fragment(el, box, -1);
    std::vector<PaintOp> decor;
    if (bs.background) decor.push_back({PaintOp::Kind::fill, box, *bs.background, {}, 2, false});
    if (bs.border) decor.push_back({PaintOp::Kind::stroke, box, kCardBorder, {}, 2, false});
    out_.ops.insert(out_.ops.begin() + static_cast<std::ptrdiff_t>(op_mark), decor.begin(), decor.end());
    return h;
  }

  void collect(const Node* n, const TextStyle& st, std::vector<const Node*>& chain, std::vector<Item>& items,
               bool& pending_space) {
    if (n->is_text()) {
      const std::string& t = n->text;
      std::size_t i = 0;
      while (i < t.size()) {
        if (std::isspace(static_cast<unsigned char>(t[i]))) {
          pending_space = true;
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j < t.size() && !std::isspace(static_cast<unsigned char>(t[j]))) ++j;
        Item it;
        it.kind = Item::Kind::word;
        it.node = n;
        it.text = t.substr(i, j - i);
        it.style = st;
        it.width = Raster::text_width(it.text, st.scale);
        it.height = line_height(st.scale);
        it.space_before = pending_space;
        it.inline_chain = chain;
        pending_space = false;
        items.push_back(std::move(it));
        i = j;
      }
      return;
    }
    if (!n->is_element() || is_hidden(n)) return;
    if (n->tag == "br") {
      Item it;
      it.kind = Item::Kind::line_break;
      it.node = n;
      it.style = st;
      it.inline_chain = chain;
      items.push_back(std::move(it));
      pending_space = false;
      return;
    }
    if (is_atom(n)) {
      Item it;
      it.kind = Item::Kind::atom;
      it.node = n;
      it.style = st;
      auto [w, h] = atom_size(n, st);
      it.width = w;
      it.height = h;
      it.space_before = pending_space;
      it.inline_chain = chain;
      pending_space = false;
      items.push_back(std::move(it));
      return;
    }
    TextStyle inner = child_style(st, n);
    bool block = is_block_level(n);
    if (block) {
      Item br;
      br.kind = Item::Kind::line_break;
      br.style = st;
      br.height = 0;
      items.push_back(br);
    }
    chain.push_back(n);
    for (const Node* c : n->children) collect(c, inner, chain, items, pending_space);
    chain.pop_back();
    if (block) {
      Item br;
      br.kind = Item::Kind::line_break;
      br.style = st;
      br.height = 0;
      items.push_back(br);
    }
    if (n->tag == "td" || n->tag == "th") pending_space = true;
  }

  std::pair<int, int> atom_size(const Node* el, const TextStyle& st) {
    if (el->tag == "img") {
      auto num = [&](const char* name) -> std::optional<int> {
        const std::string* v = el->attr(name);
        if (!v) return std::nullopt;
        try {
          return std::stoi(*v);
        } catch (const std::exception&) {
          return std::nullopt;
        }
      };
      auto w = num("width");
      auto h = num("height");
      if (!w || !h) {
        const std::string* src = el->attr("src");
        std::optional<ImageSize> natural = src && images_ ? images_(*src) : std::nullopt;
        if (natural && natural->width > 0 && natural->height > 0) {
          if (w && !h) h = *w * natural->height / natural->width;
          if (h && !w) w = *h * natural->width / natural->height;
          if (!w) w = natural->width;
          if (!h) h = natural->height;
        } else {
          w = w.value_or(100);
          h = h.value_or(100);
        }
      }
      return {*w, *h};
    }
    if (el->tag == "select") return {200, 32};
    if (el->tag == "textarea") return {400, 80};
    if (el->tag == "button") return {Raster::text_width(button_label(el), st.scale) + 24, 32};
    std::string type = input_type(el);
    if (type == "checkbox" || type == "radio") return {18, 18};
    if (type == "submit" || type == "button" || type == "reset") {
      return {Raster::text_width(button_label(el), st.scale) + 24, 32};
    }
    return {300, 32};
  }

  void paint_atom(const Item& it, const Rect& r) {
    const Node* el = it.node;
    auto& ops = out_.ops;
    auto text_at = [&](int x, int y, std::string s, Rgb c) {
      ops.push_back({PaintOp::Kind::text, {x, y, 0, 0}, c, std::move(s), 2, false});
    };
    if (el->tag == "img") {
      ops.push_back({PaintOp::Kind::fill, r, {230, 230, 230}, {}, 2, false});
      const std::string* src = el->attr("src");
      if (src) ops.push_back({PaintOp::Kind::image, r, {}, *src, 2, false});
      return;
    }
    std::string type = el->tag == "input" ? input_type(el) : el->tag;
    if (el->tag == "button" || type == "submit" || type == "button" || type == "reset") {
      ops.push_back({PaintOp::Kind::fill, r, kButton, {}, 2, false});
      ops.push_back({PaintOp::Kind::stroke, r, kBorder, {}, 2, false});
      text_at(r.x + 12, r.y + 9, fit(button_label(el), r.width - 12, 2), kText);
    } else if (type == "checkbox" || type == "radio") {
      ops.push_back({PaintOp::Kind::fill, r, kWhite, {}, 2, false});
      ops.push_back({PaintOp::Kind::stroke, r, kBorder, {}, 2, false});
      if (el->has_attr("checked")) ops.push_back({PaintOp::Kind::fill, {r.x + 4, r.y + 4, 10, 10}, kText, {}, 2, false});
    } else if (el->tag == "select") {
      ops.push_back({PaintOp::Kind::fill, r, kWhite, {}, 2, false});
      ops.push_back({PaintOp::Kind::stroke, r, kBorder, {}, 2, false});
      text_at(r.x + 6, r.y + 9, fit(selected_option(el) + " v", r.width - 12, 2), kText);
    } else if (el->tag == "textarea") {
      ops.push_back({PaintOp::Kind::fill, r, kWhite, {}, 2, false});
      ops.push_back({PaintOp::Kind::stroke, r, kBorder, {}, 2, false});
      std::string value;
      for (const Node* c : el->children) value += c->text;
      int row = 0;
      for (const auto& line : split(value, "\n")) {
        if (row >= 3) break;
        text_at(r.x + 6, r.y + 6 + row * 20, fit(line, r.width - 12, 2), kText);
        ++row;
      }
    } else {
      ops.push_back({PaintOp::Kind::fill, r, kWhite, {}, 2, false});
      ops.push_back({PaintOp::Kind::stroke, r, kBorder, {}, 2, false});
      const std::string* v = el->attr("value");
      if (v && !v->empty()) {
        std::string shown = type == "password" ? std::string(v->size(), '*') : *v;
        text_at(r.x + 6, r.y + 9, fit(shown, r.width - 12, 2), kText);
      } else if (const std::string* ph = el->attr("placeholder")) {
        text_at(r.x + 6, r.y + 9, fit(*ph, r.width - 12, 2), kMuted);
      }
    }
    if (el == focused_) ops.push_back({PaintOp::Kind::stroke, r, kFocus, {}, 2, false});
  }

  int layout_inline(const std::vector<const Node*>& run, int x, int y, int width, const TextStyle& st) {
    std::vector<Item> items;
    std::vector<const Node*> chain;
    bool pending_space = false;
    for (const Node* n : run) collect(n, st, chain, items, pending_space);

    struct Placed {
      const Item* item;
      int x;
    };
    int cursor_y = y;
    std::vector<Placed> line;
    int line_x = 0;

    auto finish_line = [&](bool forced, int break_height) {
      if (line.empty()) {
        if (forced && break_height > 0) cursor_y += break_height;
        return;
      }
      int lh = 0;
      for (const auto& p : line) lh = std::max(lh, p.item->height);
      int line_id = next_line_id_++;
      for (const auto& p : line) {
        const Item& it = *p.item;
        Rect r{x + p.x, cursor_y + lh - it.height, it.width, it.height};
        add_fragment(it.node, r, line_id);
        for (const Node* a : it.inline_chain) add_fragment(a, r, line_id);
        if (it.kind == Item::Kind::atom) {
          paint_atom(it, r);
        } else {
          const TextStyle& ts = it.style;
          int ty = r.y + ts.scale;
          out_.ops.push_back({PaintOp::Kind::text, {r.x, ty, 0, 0}, ts.color, it.text, ts.scale, ts.bold});
          if (ts.underline) {
            out_.ops.push_back(
                {PaintOp::Kind::fill, {r.x, ty + kGlyphRows * ts.scale + 1, it.width, 1}, ts.color, {}, 2, false});
          }
        }
      }
      cursor_y += lh;
      line.clear();
      line_x = 0;
    };

    for (const Item& it : items) {
      if (it.kind == Item::Kind::line_break) {
        finish_line(true, it.node ? line_height(it.style.scale) : 0);
        if (it.node) add_fragment(it.node, {x, cursor_y, 0, 0}, -1);
        continue;
      }
      int space = it.space_before && !line.empty() ? 6 * it.style.scale : 0;
      if (!line.empty() && line_x + space + it.width > width) {
        finish_line(false, 0);
        space = 0;
      }
      line.push_back({&it, line_x + space});
      line_x += space + it.width;
    }
    finish_line(false, 0);
    return cursor_y - y;
  }

  const Document& doc_;
  const ImageSizeLookup& images_;
  const Node* focused_;
  Layout out_;
  std::map<int, int> line_of_;
  int next_line_id_ = 0;
};

}  // namespace

bool Layout::rendered(const Node* n) const {
  if (!n || n->index < 0 || static_cast<std::size_t>(n->index) >= fragments.size()) return false;
  return !fragments[static_cast<std::size_t>(n->index)].empty();
}

Rect Layout::box(const Node* n) const {
  if (!rendered(n)) return {};
  const auto& f = fragments[static_cast<std::size_t>(n->index)];
  int x0 = f[0].x, y0 = f[0].y, x1 = f[0].x + f[0].width, y1 = f[0].y + f[0].height;
  for (const Rect& r : f) {
    x0 = std::min(x0, r.x);
    y0 = std::min(y0, r.y);
    x1 = std::max(x1, r.x + r.width);
    y1 = std::max(y1, r.y + r.height);
  }
  return {x0, y0, x1 - x0, y1 - y0};
}

bool is_hidden(const Node* el) {
  if (!el->is_element()) return false;
  static const std::set<std::string> never = {"head",     "script", "style", "title", "meta",
                                              "link",     "template", "option", "noscript"};
  if (never.count(el->tag)) return true;
  if (el->has_attr("hidden")) return true;
  if (el->tag == "input" && input_type(el) == "hidden") return true;
  if (const std::string* style = el->attr("style")) {
    std::string compact;
    for (char c : *style) {
      if (!std::isspace(static_cast<unsigned char>(c))) compact += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (compact.find("display:none") != std::string::npos) return true;
  }
  return false;
}

bool is_block_level(const Node* el) {
  static const std::set<std::string> blocks = {
      "html",  "body",  "div",   "p",     "h1",      "h2",     "h3",         "h4",   "h5",   "h6",
      "ul",    "ol",    "li",    "form",  "header",  "footer", "nav",        "main", "section",
      "article", "aside", "table", "thead", "tbody", "tr",     "hr",         "fieldset", "figure",
      "figcaption", "dl", "dt",   "dd",    "pre",     "blockquote", "details", "summary"};
  return el->is_element() && blocks.count(el->tag) != 0;
}

std::string input_type(const Node* el) {
  const std::string* t = el->attr("type");
  return t && !t->empty() ? to_lower(*t) : std::string("text");
}

bool is_text_input(const Node* el) {
  if (!el || !el->is_element()) return false;
  if (el->tag == "textarea") return true;
  if (el->tag != "input") return false;
  static const std::set<std::string> text_types = {"text", "search", "email", "password", "number", "tel", "url"};
  return text_types.count(input_type(el)) != 0;
}

Layout layout_document(const Document& doc, int viewport_width, const ImageSizeLookup& images, const Node* focused) {
  return LayoutBuilder(doc, images, focused).run(viewport_width);
}

Raster paint(const Layout& layout, int width, int height, int scroll_y, const ImageLookup& images) {
  Raster r(width, height, kWhite);
  Rect view{0, scroll_y, width, height};
  for (const PaintOp& op : layout.ops) {
    switch (op.kind) {
      case PaintOp::Kind::fill:
        if (op.rect.intersects(view)) r.fill_rect({op.rect.x, op.rect.y - scroll_y, op.rect.width, op.rect.height}, op.color);
        break;
      case PaintOp::Kind::stroke:
        if (op.rect.intersects(view)) {
          r.stroke_rect({op.rect.x, op.rect.y - scroll_y, op.rect.width, op.rect.height}, op.color);
        }
        break;
      case PaintOp::Kind::image:
        if (op.rect.intersects(view) && images) {
          if (const Raster* img = images(op.text)) {
            r.blit_scaled(*img, {op.rect.x, op.rect.y - scroll_y, op.rect.width, op.rect.height});
          }
        }
        break;
      case PaintOp::Kind::text: {
        Rect extent{op.rect.x, op.rect.y, Raster::text_width(op.text, op.scale), kGlyphRows * op.scale};
        if (!extent.intersects(view)) break;
        r.draw_text(op.rect.x, op.rect.y - scroll_y, op.text, op.color, op.scale);
        if (op.bold) r.draw_text(op.rect.x + 1, op.rect.y - scroll_y, op.text, op.color, op.scale);
        break;
      }
    }
  }
  return r;
}

Node* hit_test(const Document& doc, const Layout& layout, int x, int y) {
  Node* hit = nullptr;
  for (Node* n : document_order(doc)) {
    if (!n->is_element() || !layout.rendered(n)) continue;
    for (const Rect& r : layout.fragments[static_cast<std::size_t>(n->index)]) {
      if (r.contains(x, y)) {
        hit = n;
        break;
      }
    }
  }
  return hit;
}

}  // namespace webagent::fixtures
