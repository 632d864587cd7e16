#include <gtest/gtest.h>

#include <random>

#include "webagent/evaluation.hpp"
#include "webagent/text_util.hpp"

namespace webagent {
namespace {

std::vector<StringRef> refs(std::initializer_list<const char*> items) {
  std::vector<StringRef> out;
  for (const char* s : items) out.push_back(StringRef::parse(s));
  return out;
}

TEST(StringPrimitives, PriceListCases) {
  const std::string p = "$1.99, $2.50, $10.00";
  EXPECT_EQ(must_include(p, refs({"1.99", "2.50", "10.00"})), 1);
  EXPECT_EQ(must_exclude(p, refs({"1.50", "2.00"})), 1);
  EXPECT_EQ(must_include(p, refs({"1.99", "3.00"})), 0);
  EXPECT_EQ(must_exclude(p, refs({"1.50", "2.50"})), 0);
}

TEST(StringPrimitives, AlternativesForPriceEdit) {
  auto include = refs({"$25000 |OR| $25,000"});
  auto exclude = refs({"$30000 |OR| $30,000"});
  EXPECT_EQ(include[0].alternatives, (std::vector<std::string>{"$25000", "$25,000"}));

  EXPECT_EQ(must_include("$25000", include), 1);
  EXPECT_EQ(must_include("$25,000", include), 1);
  EXPECT_EQ(must_include("$2500", include), 0);
  EXPECT_EQ(must_exclude("$25000", exclude), 1);
  EXPECT_EQ(must_exclude("$25,000", exclude), 1);
  EXPECT_EQ(must_exclude("$30,000", exclude), 0);
  EXPECT_EQ(must_exclude("$30000", exclude), 0);
  // Appending to the old value keeps it visible.
  EXPECT_EQ(must_exclude("$3000025000", exclude), 0);
}

TEST(StringPrimitives, OrTokenNeedsSurroundingSpaces) {
  EXPECT_EQ(StringRef::parse("a|OR|b").alternatives, (std::vector<std::string>{"a|OR|b"}));
  EXPECT_EQ(StringRef::parse("a |OR| b |OR| c").alternatives, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(StringRef::parse("a |OR| b").to_string(), "a |OR| b");
}

TEST(StringPrimitives, ExactMatchTrimsOnly) {
  EXPECT_EQ(exact_match("  $279.49\n", "$279.49"), 1);
  EXPECT_EQ(exact_match("$279.49.", "$279.49"), 0);
  EXPECT_EQ(exact_match("Post #412", "post #412"), 0);
  EXPECT_EQ(exact_match("", ""), 1);
}

TEST(StringPrimitives, SubstringIsCaseAndWhitespaceInsensitive) {
  EXPECT_EQ(must_include("Order  for\nRED tee", refs({"for red"})), 1);
  EXPECT_EQ(must_exclude("Order  for\nRED tee", refs({"FOR RED"})), 0);
}

// must_include and must_exclude on a single literal reference are the
// substring indicator and its complement.
TEST(StringPrimitives, IncludeExcludeDuality) {
  std::mt19937 rng(7);
  const std::string alphabet = "ab $1.,";
  std::uniform_int_distribution<int> len(0, 12), sub(1, 3);
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
  auto word = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += alphabet[ch(rng)];
    return s;
  };
  for (int i = 0; i < 3000; ++i) {
    std::string p = word(len(rng));
    std::string r = word(sub(rng));
    if (trim(r).empty() || r.find("|OR|") != std::string::npos) continue;
    std::vector<StringRef> one{StringRef{{r}}};
    int indicator = normalize_for_match(p).find(normalize_for_match(r)) != std::string::npos ? 1 : 0;
    ASSERT_EQ(must_include(p, one), indicator) << "'" << p << "' / '" << r << "'";
    ASSERT_EQ(must_exclude(p, one), 1 - indicator) << "'" << p << "' / '" << r << "'";
  }
}

}  // namespace
}  // namespace webagent
