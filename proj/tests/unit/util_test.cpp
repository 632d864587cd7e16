#include <gtest/gtest.h>

#include <random>

#include "webagent/browser.hpp"
#include "webagent/site_urls.hpp"
#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent {
namespace {

TEST(Url, ParseComponents) {
  auto u = parse_url("HTTP://Shop.Test:8080/a/b?q=1#frag");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->scheme, "http");
  EXPECT_EQ(u->host, "shop.test");
  EXPECT_EQ(u->port, 8080);
  EXPECT_EQ(u->path, "/a/b");
  EXPECT_EQ(u->query, "q=1");
  EXPECT_EQ(u->fragment, "frag");
  EXPECT_EQ(u->origin(), "http://shop.test:8080");
  EXPECT_EQ(u->path_and_query(), "/a/b?q=1");
  EXPECT_FALSE(parse_url("/relative"));
  EXPECT_TRUE(parse_url("about:blank"));
  EXPECT_TRUE(is_absolute_url("https://x/"));
  EXPECT_FALSE(is_absolute_url("//x/y"));
}

TEST(Url, Resolve) {
  const std::string base = "http://h:1/shop/item/7?x=1";
  EXPECT_EQ(resolve_url(base, "http://o/p"), "http://o/p");
  EXPECT_EQ(resolve_url(base, "//o/p"), "http://o/p");
  EXPECT_EQ(resolve_url(base, "/cart"), "http://h:1/cart");
  EXPECT_EQ(resolve_url(base, "8"), "http://h:1/shop/item/8");
  EXPECT_EQ(resolve_url(base, "../list"), "http://h:1/shop/list");
  EXPECT_EQ(resolve_url(base, "?y=2"), "http://h:1/shop/item/7?y=2");
}

TEST(Url, NormalizeForCompare) {
  EXPECT_EQ(normalize_url_for_compare("http://H/a/?q=1#x"), normalize_url_for_compare("http://h/a?q=1"));
  EXPECT_NE(normalize_url_for_compare("http://h/a?q=1"), normalize_url_for_compare("http://h/a?q=2"));
  EXPECT_EQ(url_basename("http://h/img/car.png?x=1"), "car.png");
}

TEST(Url, PercentAndFormRoundTrip) {
  std::mt19937 rng(4);
  const std::string alphabet = "ab &=+%/?#é\n";
  for (int i = 0; i < 500; ++i) {
    FormFields f;
    int n = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int k = 0; k < n; ++k) {
      std::string key, value;
      int kl = std::uniform_int_distribution<int>(1, 6)(rng), vl = std::uniform_int_distribution<int>(0, 6)(rng);
      for (int c = 0; c < kl; ++c) key += alphabet[rng() % alphabet.size()];
      for (int c = 0; c < vl; ++c) value += alphabet[rng() % alphabet.size()];
      f.emplace_back(key, value);
    }
    ASSERT_EQ(parse_form_urlencoded(encode_form_urlencoded(f)), f);
    for (const auto& [k, v] : f) ASSERT_EQ(percent_decode(percent_encode(v)), v);
  }
  EXPECT_EQ(percent_decode("a+b%20c"), "a b c");
  EXPECT_EQ(percent_decode("a+b", false), "a+b");
}

TEST(TextUtil, Basics) {
  EXPECT_EQ(trim("\t a b \n"), "a b");
  EXPECT_EQ(normalize_for_match("  Foo\n\tBAR  baz "), "foo bar baz");
  EXPECT_EQ(split("a,,b", ","), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(join({"a", "b"}, "+"), "a+b");
  EXPECT_EQ(replace_all("aaa", "a", "bb"), "bbbbbb");
  EXPECT_EQ(sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(base64_encode(std::string_view("hello")), "aGVsbG8=");
  EXPECT_EQ(format_percent(149.0 / 910), "16.37%");
}

TEST(TextUtil, Base64RoundTrip) {
  std::mt19937 rng(9);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::uint8_t> data(rng() % 40);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(base64_decode(base64_encode(data)), data);
  }
}

TEST(SiteUrls, ResolveAndExpand) {
  SiteUrls s;
  s.base[Site::shopping] = "http://127.0.0.1:9/shop/";
  s.base[Site::reddit] = "http://127.0.0.1:9/forum";
  EXPECT_EQ(s.resolve(Site::shopping, "/cart"), "http://127.0.0.1:9/shop/cart");
  EXPECT_EQ(s.resolve(Site::shopping, ""), "http://127.0.0.1:9/shop/");
  EXPECT_EQ(s.resolve(Site::reddit, "http://other/x"), "http://other/x");
  EXPECT_EQ(s.resolve(Site::multi, "/x").rfind("http://127.0.0.1:9/", 0), 0u);
  EXPECT_EQ(s.expand("go to {{site:shopping}}/cart or {{site:reddit}}"),
            "go to http://127.0.0.1:9/shop/cart or http://127.0.0.1:9/forum");
}

TEST(SiteUrls, FromEnvironment) {
  ::setenv("WEBAGENT_CLASSIFIEDS_URL", "http://c.test", 1);
  ::unsetenv("WEBAGENT_REDDIT_URL");
  auto s = SiteUrls::from_environment();
  ::unsetenv("WEBAGENT_CLASSIFIEDS_URL");
  EXPECT_EQ(s.base.at(Site::classifieds), "http://c.test");
  EXPECT_FALSE(s.base.count(Site::reddit));
}

TEST(KeyCombination, Normalizes) {
  EXPECT_EQ(parse_key_combination("ctrl+v").to_string(), "Control+v");
  EXPECT_EQ(parse_key_combination("Shift+Ctrl+enter").to_string(), "Control+Shift+Enter");
  EXPECT_EQ(parse_key_combination("Meta+a").modifier_mask(), 4);
  EXPECT_EQ(parse_key_combination("Control++").to_string(), "Control++");
  EXPECT_EQ(parse_key_combination("f5").key, "F5");
  EXPECT_THROW(parse_key_combination("Hyper+a"), BrowserError);
  EXPECT_THROW(parse_key_combination(""), BrowserError);
  EXPECT_THROW(parse_key_combination("notakey"), BrowserError);
}

TEST(HtmlToText, DropsMarkupAndScripts) {
  EXPECT_EQ(html_to_text("<p>Price: <b>$9.50</b></p><script>var x=1;</script><p>A &amp; B</p>"),
            "Price: $9.50\nA & B");
}

}  // namespace
}  // namespace webagent
