#include <gtest/gtest.h>

#include "webagent/evaluator_spec.hpp"
#include "webagent/fixtures/dom.hpp"
#include "webagent/fixtures/scripted_agent.hpp"
#include "webagent/fixtures/selector.hpp"
#include "webagent/fixtures/semantics.hpp"

namespace webagent {
namespace {

using namespace fixtures;

const char* kPage = R"(<!doctype html>
<html><head><title>Shop &amp; Co</title><style>p { color: red }</style></head>
<body>
  <!-- header -->
  <nav class="top main"><a href="/">Home</a><a href="/cart" id="cart">Cart</a></nav>
  <ul class="items">
    <li><a href="/item/1">Mug</a><span class="price">$9.50</span></li>
    <li class="sale"><a href="/item/2">Tee</a><span class="price">$12.00</span></li>
    <li><img src="/media/fax.png" alt="Fax"><span class="price">$99.00</span></li>
  </ul>
  <form><label for="q">Search</label><input id="q" name="q" placeholder="Search products"><br>
  <button type="submit">Go</button></form>
  <script>if (a < b) { x = "</p>"; }</script>
</body></html>)";

std::vector<std::string> texts(const Document& d, const std::string& sel) {
  std::vector<std::string> out;
  for (Node* n : Selector::parse(sel).query_all(d)) out.push_back(collapsed_text(n));
  return out;
}

TEST(Dom, ParsesTheFixtureSubset) {
  auto doc = parse_html(kPage);
  EXPECT_EQ(doc->title(), "Shop & Co");
  Node* input = doc->find_first("input");
  ASSERT_NE(input, nullptr);
  EXPECT_TRUE(input->children.empty());
  EXPECT_EQ(*input->attr("placeholder"), "Search products");
  Node* script = doc->find_first("script");
  ASSERT_EQ(script->children.size(), 1u);
  EXPECT_EQ(script->children[0]->text, R"(if (a < b) { x = "</p>"; })");
  for (std::size_t i = 0; i < doc->nodes().size(); ++i) EXPECT_EQ(doc->nodes()[i]->index, static_cast<int>(i));
}

TEST(Dom, EntitiesAndEscaping) {
  EXPECT_EQ(decode_entities("&lt;a&gt; &amp; &quot;b&quot; &#39;c&#39;"), "<a> & \"b\" 'c'");
  for (std::string s : {"<b>", "a & b", "\"q\"", "plain"}) EXPECT_EQ(decode_entities(escape_html(s)), s);
}

TEST(Dom, OuterHtmlReparsesToSameText) {
  auto doc = parse_html(kPage);
  auto again = parse_html(outer_html(doc->find_first("html")));
  EXPECT_EQ(collapsed_text(again->find_first("body")), collapsed_text(doc->find_first("body")));
}

TEST(Selector, Subset) {
  auto doc = parse_html(kPage);
  EXPECT_EQ(texts(*doc, ".price"), (std::vector<std::string>{"$9.50", "$12.00", "$99.00"}));
  EXPECT_EQ(texts(*doc, "li.sale .price"), (std::vector<std::string>{"$12.00"}));
  EXPECT_EQ(texts(*doc, "ul > li:first-child > a"), (std::vector<std::string>{"Mug"}));
  EXPECT_EQ(texts(*doc, "li:last-child span"), (std::vector<std::string>{"$99.00"}));
  EXPECT_EQ(texts(*doc, "li:nth-child(2) a"), (std::vector<std::string>{"Tee"}));
  EXPECT_EQ(texts(*doc, "#cart, nav.top.main a[href='/']"), (std::vector<std::string>{"Home", "Cart"}));
  EXPECT_EQ(Selector::parse("img[alt]").query_all(*doc).size(), 1u);
  EXPECT_EQ(Selector::parse("body > a").query_all(*doc).size(), 0u);
  EXPECT_THROW(Selector::parse("a >"), SelectorError);
  EXPECT_THROW(Selector::parse("a:hover"), SelectorError);
}

TEST(Semantics, RolesAndNames) {
  auto doc = parse_html(kPage);
  EXPECT_EQ(ax_role(doc->find_first("a")), "link");
  EXPECT_EQ(ax_role(doc->find_first("button")), "button");
  EXPECT_EQ(ax_role(doc->find_first("input")), "textbox");
  EXPECT_EQ(ax_role(doc->find_first("img")), "img");
  EXPECT_EQ(ax_name(*doc, doc->find_first("img")), "Fax");
  EXPECT_EQ(ax_name(*doc, doc->find_first("input")), "Search");
  EXPECT_TRUE(is_interactable(doc->find_first("a")));
  EXPECT_TRUE(is_interactable(doc->find_first("img")));
  EXPECT_FALSE(is_interactable(doc->find_first("span")));
}

TEST(Semantics, UniqueSelectorFindsTheElement) {
  auto doc = parse_html(kPage);
  for (Node* n : document_order(*doc)) {
    if (!n->is_element()) continue;
    auto sel = unique_selector(*doc, n);
    auto all = Selector::parse(sel).query_all(*doc);
    ASSERT_EQ(all.size(), 1u) << sel;
    EXPECT_EQ(all[0], n) << sel;
  }
  EXPECT_EQ(unique_selector(*doc, doc->find_first("input")), "#q");
}

TEST(EvaluatorSpecJson, RoundTrip) {
  std::vector<EvaluatorSpec> specs = {
      {ExactMatch{"$279.49"}},
      {MustInclude{{StringRef::parse("$25000 |OR| $25,000"), StringRef::parse("red")}}},
      {MustExclude{{StringRef::parse("$30000 |OR| $30,000")}}},
      {FuzzyMatch{"orange", "What colour?"}},
      {EvalVqa{"Is it a polo?", "yes"}},
      {FuzzyImageMatch{"images/bike.png", 0.8}},
      {PageState{FuncUrl{"latest_post"}, {".post img", Extract::image}, {{FuzzyImageMatch{"a.png", 0.9}}}}},
      {PageState{LastPageUrl{}, {".price", Extract::text}, {{MustInclude{{StringRef::parse("$9")}}}}}},
  };
  for (const auto& s : specs) {
    EXPECT_EQ(evaluator_from_json(evaluator_to_json(s)), s) << evaluator_to_json(s).dump();
  }
  EXPECT_TRUE(is_visual(specs[4]));
  EXPECT_TRUE(is_visual(specs[5]));
  EXPECT_TRUE(is_string_primitive(specs[0]));
  EXPECT_FALSE(is_string_primitive(specs[6]));
  EXPECT_THROW(evaluator_from_json({{"type", "regex"}}), EvaluatorFormatError);
}

TEST(EvaluatorSpecJson, UrlSpecStrings) {
  for (UrlSpec u : {UrlSpec{LiteralUrl{"/wishlist"}}, UrlSpec{FuncUrl{"latest"}}, UrlSpec{LastPageUrl{}}}) {
    EXPECT_EQ(parse_url_spec(url_spec_to_string(u)), u);
  }
}

TEST(ScriptedAgent, TemplateFilling) {
  SiteUrls sites;
  sites.base[Site::shopping] = "http://h/shop";
  const std::string tree =
      "[1] RootWebArea 'Shop'\n\t[44] LabelText 'Price'\n\t[45] textbox 'Price'\n\t[46] link 'Price list'";
  EXPECT_EQ(fill_script_template("click [{{id:Price list}}]", tree, sites), "click [46]");
  EXPECT_EQ(fill_script_template("type [{{id:=Price@textbox,INPUT}}] [9] [0]", tree, sites), "type [45] [9] [0]");
  EXPECT_EQ(fill_script_template("click [{{id:=Price}}]", tree, sites), "click [44]");
  EXPECT_EQ(fill_script_template("goto [{{site:shopping}}/cart]", tree, sites), "goto [http://h/shop/cart]");
  EXPECT_THROW(fill_script_template("click [{{id:Nope}}]", tree, sites), ScriptError);
  const std::string som = "[] [StaticText] [Hi]\n[3] [A] [Brass desk lamp]\n[4] [INPUT] [Price]";
  EXPECT_EQ(fill_script_template("click [{{id:lamp}}]", som, sites), "click [3]");
  EXPECT_EQ(fill_script_template("click [{{id:=Price@INPUT}}]", som, sites), "click [4]");
}

TEST(ScriptedAgent, ReplaysStepsInOrder) {
  ScriptedAgentTransport t({{"click [{{id:Mug}}]", ""}, {"", "no action here"}}, {});
  ModelRequest r;
  r.messages = {ChatMessage::text(Role::user, "OBSERVATION:\nTab 0 (current): S\n\n[7] link 'Mug'\nURL: x")};
  auto first = t.send(r);
  EXPECT_NE(first.find("```click [7]```"), std::string::npos);
  EXPECT_EQ(t.send(r), "no action here");
  EXPECT_EQ(t.steps_used(), 2);
}

}  // namespace
}  // namespace webagent
