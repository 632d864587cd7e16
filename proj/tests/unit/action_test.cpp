#include <gtest/gtest.h>

#include "test_support.hpp"
#include "webagent/action.hpp"

namespace webagent {
namespace {

using namespace action;

TEST(ActionGrammar, VerbatimOutputs) {
  auto wrap = [](std::string body) {
    return "Let's think step-by-step. ... In summary, the next action I will perform is ```" + body + "```";
  };
  EXPECT_EQ(parse_action(wrap("stop [$279.49]")), ParsedAction(Stop{"$279.49"}));
  EXPECT_EQ(parse_action(wrap("click [11]")), ParsedAction(Click{11}));
  EXPECT_EQ(parse_action(wrap("type [5] [guitar] [1]")), ParsedAction((Type{5, "guitar", true})));
}

TEST(ActionGrammar, RoundTripRandomized) {
  std::mt19937 rng(20240611);
  for (int i = 0; i < 2000; ++i) {
    ParsedAction a = testing::random_action(rng);
    std::string out = render_action_output(a);
    ASSERT_EQ(parse_action(out), a) << out;
    ASSERT_EQ(parse_action_body(render_action(a)), a) << render_action(a);
  }
}

TEST(ActionGrammar, EveryVerbRendersAndParses) {
  std::vector<ParsedAction> all = {Click{1},         Hover{2},  Type{3, "x", false}, Press{"Control+v"},
                                   Scroll{Direction::up}, NewTab{}, TabFocus{0},      TabClose{},
                                   Goto{"http://a/b"},    GoBack{}, GoForward{},      Stop{""}};
  ASSERT_EQ(all.size(), std::variant_size_v<ParsedAction>);
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].index(), i);
    EXPECT_EQ(parse_action_body(render_action(all[i])), all[i]);
  }
}

TEST(ActionGrammar, TabCloseAcceptsBothSpellings) {
  EXPECT_EQ(parse_action_body("tab_close"), ParsedAction(TabClose{}));
  EXPECT_EQ(parse_action_body("close_tab"), ParsedAction(TabClose{}));
  EXPECT_EQ(render_action(TabClose{}), "tab_close");
}

TEST(ActionGrammar, TypeDefaultsToEnter) {
  EXPECT_EQ(parse_action_body("type [4] [hello]"), ParsedAction((Type{4, "hello", true})));
  EXPECT_EQ(parse_action_body("type [4] [a [b] c] [0]"), ParsedAction((Type{4, "a [b] c", false})));
}

TEST(ActionGrammar, UsesLastSummaryPhrase) {
  std::string raw =
      "In summary, the next action I will perform is ```click [1]``` but on reflection "
      "In summary, the next action I will perform is ```hover [2]```";
  EXPECT_EQ(parse_action(raw), ParsedAction(Hover{2}));
}

TEST(ActionGrammar, PhraseIsCaseInsensitive) {
  EXPECT_EQ(parse_action("in SUMMARY, the next action i will perform is ```go_back```"), ParsedAction(GoBack{}));
}

TEST(ActionGrammar, Rejections) {
  const char* bad[] = {
      "no phrase at all ```click [1]```",
      "In summary, the next action I will perform is click [1]",
      "In summary, the next action I will perform is ```click [1]",
      "In summary, the next action I will perform is ```click [-1]```",
      "In summary, the next action I will perform is ```click [one]```",
      "In summary, the next action I will perform is ```scroll [left]```",
      "In summary, the next action I will perform is ```jump [3]```",
      "In summary, the next action I will perform is ```new_tab [3]```",
      "In summary, the next action I will perform is ```goto []```",
      "In summary, the next action I will perform is ```press []```",
      "In summary, the next action I will perform is ```click [1] [2]```",
  };
  for (const char* raw : bad) {
    try {
      parse_action(raw);
      ADD_FAILURE() << "accepted: " << raw;
    } catch (const ActionParseError& e) {
      EXPECT_EQ(e.raw(), raw);
    }
  }
}

TEST(ActionGrammar, ElementBearing) {
  EXPECT_TRUE(element_bearing(Click{3}));
  EXPECT_TRUE(element_bearing(Type{4, "", true}));
  EXPECT_FALSE(element_bearing(Scroll{}));
  EXPECT_EQ(element_of(Hover{9}), 9);
  EXPECT_EQ(element_of(Stop{}), -1);
}

}  // namespace
}  // namespace webagent
