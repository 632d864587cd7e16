#include <gtest/gtest.h>

#include <random>

#include "webagent/observation.hpp"
#include "webagent/som.hpp"

namespace webagent {
namespace {

// Longest whole-line prefix that fits with "\n[...truncated]"; written
// independently of the implementation.
std::string expected_truncation(const std::string& text, std::size_t limit) {
  if (text.size() <= limit) return text;
  const std::string marker = "[...truncated]";
  std::string best;
  bool found = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\n') continue;
    if (i + 1 + marker.size() <= limit) {
      best = text.substr(0, i);
      found = true;
    }
  }
  return found ? best + "\n" + marker : marker;
}

std::string lines_of_length(std::size_t total, std::size_t line) {
  std::string s;
  int n = 0;
  while (s.size() < total) {
    std::string l = "[" + std::to_string(++n) + "] link '";
    while (l.size() + 1 < line) l += 'x';
    l += "'\n";
    s += l;
  }
  return s.substr(0, total);
}

TEST(Truncation, DefaultBudgetIs15360Chars) {
  EXPECT_EQ(default_observation_budget().max_chars(), 15360u);
  EXPECT_EQ(TextBudget::tokens(3840).max_chars(), 15360u);
  EXPECT_EQ(short_context_observation_budget().max_chars(), 2560u);
  EXPECT_THROW(TextBudget::chars(0).max_chars(), std::invalid_argument);
}

TEST(Truncation, BoundaryIsExact) {
  const auto budget = default_observation_budget();
  std::string at = lines_of_length(15360, 37);
  ASSERT_EQ(at.size(), 15360u);
  EXPECT_EQ(truncate_to_budget(at, budget), at);

  std::string over = lines_of_length(15361, 37);
  std::string cut = truncate_to_budget(over, budget);
  EXPECT_LE(cut.size(), 15360u);
  EXPECT_NE(cut, over);
  EXPECT_EQ(cut, expected_truncation(over, 15360));
  EXPECT_TRUE(cut.ends_with("\n[...truncated]"));
}

TEST(Truncation, MatchesOracleOnRandomInputs) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<std::size_t> total(0, 400), line(1, 60), limit(1, 200);
  for (int i = 0; i < 2000; ++i) {
    std::string text = lines_of_length(total(rng), line(rng));
    std::size_t l = limit(rng);
    std::string got = truncate_to_budget(text, TextBudget::chars(l));
    if (l >= 15) ASSERT_EQ(got, expected_truncation(text, l)) << l;
    ASSERT_LE(got.size(), l);
  }
}

TEST(Truncation, Idempotent) {
  std::mt19937 rng(23);
  for (int i = 0; i < 500; ++i) {
    std::string text = lines_of_length(std::uniform_int_distribution<std::size_t>(0, 3000)(rng), 29);
    auto b = TextBudget::chars(std::uniform_int_distribution<std::size_t>(20, 2000)(rng));
    auto once = truncate_to_budget(text, b);
    ASSERT_EQ(truncate_to_budget(once, b), once);
  }
}

AxNode node(std::int64_t id, std::string role, std::string name, std::vector<AxNode> kids = {}) {
  AxNode n;
  n.node_id = id;
  n.role = std::move(role);
  n.name = std::move(name);
  n.children = std::move(kids);
  return n;
}

TEST(AccessibilityTree, FlattenDropsNoiseAndPromotesChildren) {
  AxNode link = node(5, "link", "Add to Cart", {node(6, "StaticText", "Add to Cart")});
  AxNode heading = node(3, "heading", "Fax", {node(4, "StaticText", "Fax")});
  heading.properties = {{"level", "1"}};
  AxNode img = node(8, "img", "Fax photo");
  img.properties = {{"url", "http://h/media/fax.png"}};
  AxNode ignored = node(9, "paragraph", "hidden", {node(10, "StaticText", "kept child")});
  ignored.ignored = true;
  AxNode root = node(1, "RootWebArea", "Shop",
                     {node(2, "generic", "", {heading, link}), img, ignored, node(11, "StaticText", "  ")});
  EXPECT_EQ(flatten_accessibility_tree(root),
            "[1] RootWebArea 'Shop'\n"
            "\t[3] heading 'Fax' level: 1\n"
            "\t[5] link 'Add to Cart'\n"
            "\t[8] img 'Fax photo'\n"
            "\t[10] StaticText 'kept child'");
}

TEST(AccessibilityTree, CaptionsRewriteImageNames) {
  AxNode img = node(2, "img", "alt text");
  img.properties = {{"url", "http://h/media/shop/fax.png?v=1"}};
  AxNode broken = node(3, "img", "");
  AxNode root = node(1, "RootWebArea", "", {img, broken});
  auto out = augment_with_captions(root, [](const std::string& url) { return "a fax machine (" + url + ")"; });
  EXPECT_EQ(out.children[0].name,
            "Image, description: a fax machine (http://h/media/shop/fax.png?v=1), url: fax.png");
  EXPECT_EQ(out.children[1].name, "Image, description: unavailable");
  auto failing = augment_with_captions(root, [](const std::string&) -> std::string { throw std::runtime_error("x"); });
  EXPECT_EQ(failing.children[0].name, "Image, description: unavailable, url: fax.png");
}

SomManifest random_manifest(std::mt19937& rng) {
  static const std::vector<std::string> tags = {"A", "BUTTON", "INPUT", "IMG", "TEXTAREA", "SELECT"};
  static const std::vector<std::string> texts = {"", "Search", "Add to Cart", "[x]", "a ] b", "Price: $1.00",
                                                 "Image, description: a cat, url: cat.png"};
  SomManifest m;
  int n = std::uniform_int_distribution<int>(0, 12)(rng);
  for (int i = 1; i <= n; ++i) {
    SomMark k;
    k.id = i;
    k.bbox = {i * 3, i * 5, 10 + i, 8};
    k.tag_type = tags[std::uniform_int_distribution<std::size_t>(0, tags.size() - 1)(rng)];
    k.text_content = texts[std::uniform_int_distribution<std::size_t>(0, texts.size() - 1)(rng)];
    k.selector = "#m" + std::to_string(i);
    m.marks.push_back(k);
  }
  int s = std::uniform_int_distribution<int>(0, 4)(rng);
  for (int i = 0; i < s; ++i) {
    m.static_texts.push_back({"text " + std::to_string(i), std::uniform_int_distribution<std::int64_t>(0, n)(rng)});
  }
  std::stable_sort(m.static_texts.begin(), m.static_texts.end(),
                   [](const SomStaticText& a, const SomStaticText& b) { return a.after < b.after; });
  m.page_url = "http://h/p";
  return m;
}

TEST(SomText, RenderParseRecoversMarks) {
  std::mt19937 rng(31);
  for (int i = 0; i < 500; ++i) {
    SomManifest m = random_manifest(rng);
    auto lines = parse_som_text(render_som_text(m));
    std::vector<SomTextLine> marks;
    for (const auto& l : lines)
      if (l.id) marks.push_back(l);
    ASSERT_EQ(marks.size(), m.marks.size());
    for (std::size_t k = 0; k < marks.size(); ++k) {
      EXPECT_EQ(*marks[k].id, m.marks[k].id);
      EXPECT_EQ(marks[k].tag_type, m.marks[k].tag_type);
      EXPECT_EQ(marks[k].text, m.marks[k].text_content);
    }
    EXPECT_EQ(lines.size(), m.marks.size() + m.static_texts.size());
  }
}

TEST(SomText, LineFormat) {
  SomManifest m;
  m.marks = {{1, {0, 0, 10, 10}, "A", "Home", "#a"}, {2, {0, 20, 10, 10}, "INPUT", "Search", "#b"}};
  m.static_texts = {{"Welcome", 0}, {"|", 1}};
  EXPECT_EQ(render_som_text(m), "[] [StaticText] [Welcome]\n[1] [A] [Home]\n[] [StaticText] [|]\n[2] [INPUT] [Search]");
}

TEST(SomText, ManifestJsonRoundTripAndValidation) {
  std::mt19937 rng(37);
  for (int i = 0; i < 200; ++i) {
    SomManifest m = random_manifest(rng);
    ASSERT_EQ(som_manifest_from_json(som_manifest_to_json(m)), m);
  }
  auto j = som_manifest_to_json(SomManifest{{{1, {0, 0, 5, 5}, "A", "x", "#a"}, {3, {0, 0, 5, 5}, "A", "y", "#b"}},
                                            {},
                                            "http://h/"});
  EXPECT_THROW(som_manifest_from_json(j), SomFormatError);
  auto dup = som_manifest_to_json(SomManifest{{{1, {0, 0, 5, 5}, "A", "x", "#a"}, {2, {0, 0, 5, 5}, "A", "y", "#a"}},
                                              {},
                                              "http://h/"});
  EXPECT_THROW(som_manifest_from_json(dup), SomFormatError);
  auto flat = som_manifest_to_json(SomManifest{{{1, {0, 0, 0, 5}, "A", "x", "#a"}}, {}, "http://h/"});
  EXPECT_THROW(som_manifest_from_json(flat), SomFormatError);
}

TEST(SomOverlay, ColoursArePaletteIndexedById) {
  for (int id = 1; id < 50; ++id) EXPECT_EQ(som_color(id), som_color(id + kSomPaletteSize));
  Raster a(200, 200), b(200, 200);
  SomManifest m;
  m.marks = {{1, {10, 110, 50, 20}, "A", "x", "#a"}};
  draw_som_overlay(a, m, 100);
  draw_som_overlay(b, m, 100);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.at(10, 10), som_color(1));
  EXPECT_EQ(a.at(150, 150), (Rgb{255, 255, 255}));
}

TEST(ObservationModes, PayloadContract) {
  EXPECT_FALSE(uses_screenshot(ObservationMode::acc_tree));
  EXPECT_FALSE(uses_captions(ObservationMode::acc_tree));
  EXPECT_TRUE(uses_captions(ObservationMode::acc_tree_caps));
  EXPECT_FALSE(uses_screenshot(ObservationMode::acc_tree_caps));
  EXPECT_TRUE(uses_screenshot(ObservationMode::screenshot_acc_tree_caps));
  EXPECT_FALSE(uses_som(ObservationMode::screenshot_acc_tree_caps));
  EXPECT_TRUE(uses_som(ObservationMode::som_screenshot_caps));
  EXPECT_TRUE(uses_screenshot(ObservationMode::som_screenshot_caps));
  for (auto m : {ObservationMode::acc_tree, ObservationMode::acc_tree_caps, ObservationMode::screenshot_acc_tree_caps,
                 ObservationMode::som_screenshot_caps}) {
    EXPECT_EQ(observation_mode_from_string(to_string(m)), m);
  }
  EXPECT_EQ(observation_mode_from_string("som"), ObservationMode::som_screenshot_caps);
  EXPECT_EQ(observation_mode_from_string("multimodal"), ObservationMode::screenshot_acc_tree_caps);
  EXPECT_FALSE(observation_mode_from_string("html"));
}

}  // namespace
}  // namespace webagent
