#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "webagent/task_model.hpp"
#include "webagent/text_util.hpp"

namespace webagent {
namespace {

std::string pick(std::mt19937& rng, const std::vector<std::string>& from) {
  return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(rng)];
}

EvaluatorSpec random_string_eval(std::mt19937& rng) {
  const std::vector<std::string> words = {"$279.49", "Red", "B0983XCYK6", "N/A", "Post #412", "orange"};
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return {ExactMatch{pick(rng, words)}};
    case 1: return {MustInclude{{StringRef{{pick(rng, words)}}, StringRef{{pick(rng, words), pick(rng, words)}}}}};
    case 2: return {MustExclude{{StringRef{{pick(rng, words)}}}}};
    default: return {FuzzyMatch{pick(rng, words), std::uniform_int_distribution<int>(0, 1)(rng) ? "" : "which?"}};
  }
}

EvaluatorSpec random_visual_eval(std::mt19937& rng) {
  if (std::uniform_int_distribution<int>(0, 1)(rng)) return {EvalVqa{"Is this a polo shirt?", "yes"}};
  return {FuzzyImageMatch{"images/x.png", std::uniform_int_distribution<int>(0, 100)(rng) / 100.0}};
}

TaskSpec random_task(std::mt19937& rng, int n) {
  TaskSpec t;
  t.task_id = "task_" + std::to_string(n);
  t.site = static_cast<Site>(std::uniform_int_distribution<int>(0, 3)(rng));
  t.start_url = pick(rng, {"/", "/wishlist", "/item/101", "/search?q=a%20b"});
  t.intent = pick(rng, {"Buy it.", "What is \"this\"?", "Find the cat\nphoto"});
  if (n % 3 == 0) t.intent_template = "Find {{x}}";
  auto a = static_cast<Level>(std::uniform_int_distribution<int>(1, 3)(rng));
  auto v = static_cast<Level>(std::uniform_int_distribution<int>(1, 3)(rng));
  t.difficulty = {a, v, derive_overall_difficulty(a, v)};
  t.achievable = n % 5 != 0;
  if (!t.achievable) {
    t.evaluators.push_back({FuzzyMatch{"N/A", ""}});
  } else {
    int k = std::uniform_int_distribution<int>(1, 3)(rng);
    for (int i = 0; i < k; ++i) {
      if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
        bool image = std::uniform_int_distribution<int>(0, 1)(rng);
        PageState ps;
        ps.url = std::vector<UrlSpec>{LiteralUrl{"/wishlist"}, FuncUrl{"latest"}, LastPageUrl{}}
            [std::uniform_int_distribution<int>(0, 2)(rng)];
        ps.locator = {image ? ".item img" : ".price", image ? Extract::image : Extract::text};
        ps.inner.push_back(image ? random_visual_eval(rng) : random_string_eval(rng));
        t.evaluators.push_back({ps});
      } else {
        t.evaluators.push_back(std::uniform_int_distribution<int>(0, 3)(rng) ? random_string_eval(rng)
                                                                               : random_visual_eval(rng));
      }
    }
  }
  if (n % 4 == 0) {
    t.input_images = {"images/a.png"};
    t.subset_tags.insert(SubsetTag::image_input);
  }
  if (n % 6 == 0) t.subset_tags.insert(SubsetTag::ocr_required);
  if (n % 7 == 0) t.subset_tags.insert(SubsetTag::exact_image_match);
  return t;
}

TEST(TaskModel, SerializeParseRoundTrip) {
  std::mt19937 rng(42);
  for (int round = 0; round < 50; ++round) {
    std::vector<TaskSpec> tasks;
    for (int i = 0; i < 8; ++i) tasks.push_back(random_task(rng, round * 8 + i));
    auto text = serialize_task_file(tasks);
    auto parsed = parse_task_file(text);
    ASSERT_EQ(parsed, tasks);
    ASSERT_EQ(serialize_task_file(parsed), text);
  }
}

TEST(TaskModel, DifficultyDerivation) {
  using L = Level;
  EXPECT_EQ(derive_overall_difficulty(L::easy, L::easy), L::easy);
  EXPECT_EQ(derive_overall_difficulty(L::easy, L::medium), L::medium);
  EXPECT_EQ(derive_overall_difficulty(L::easy, L::hard), L::medium);
  EXPECT_EQ(derive_overall_difficulty(L::medium, L::hard), L::hard);
  EXPECT_EQ(derive_overall_difficulty(L::hard, L::hard), L::hard);
  for (int a = 1; a <= 3; ++a)
    for (int v = 1; v <= 3; ++v)
      EXPECT_EQ(derive_overall_difficulty(L(a), L(v)), derive_overall_difficulty(L(v), L(a)));
}

TEST(TaskModel, TemplateExpansion) {
  EXPECT_EQ(expand_template({"Price of {{product}} in {{site}}?", {{"product", "fax"}, {"site", "shop"}}}),
            "Price of fax in shop?");
  try {
    expand_template({"Price of {{product}}", {}});
    FAIL();
  } catch (const TemplateError& e) {
    EXPECT_EQ(e.slot(), "product");
  }
  for (std::string s : {"", "plain text", "braces { } alone", "one {brace}"}) {
    std::string once = expand_template({s, {}});
    EXPECT_EQ(once, s);
    EXPECT_EQ(expand_template({once, {}}), once);
  }
}

std::string one_task(const std::string& body_patch) {
  std::string base = R"({"task_id": "X", "site": "shopping", "start_url": "/", "intent": "i",
    "evaluators": [{"type": "exact_match", "reference": "a"}],
    "difficulty": {"action_difficulty": "easy", "visual_difficulty": "hard", "overall": "medium"})";
  return "[" + base + body_patch + "}]";
}

TEST(TaskModel, ValidationErrorsNameTaskAndField) {
  struct Case {
    std::string patch;
    std::string field;
  } cases[] = {
      {R"(, "achievable": false)", "evaluators"},
      {R"(, "subset_tags": ["image_input"])", "input_images"},
      {R"(, "input_images": ["a.png"])", "input_images"},
  };
  for (const auto& c : cases) {
    try {
      parse_task_file(one_task(c.patch));
      ADD_FAILURE() << c.patch;
    } catch (const TaskValidationError& e) {
      EXPECT_EQ(e.task_id(), "X");
      EXPECT_EQ(e.field(), c.field) << c.patch;
    }
  }
  auto wrong_overall = replace_all(one_task(""), R"("overall": "medium")", R"("overall": "hard")");
  try {
    parse_task_file(wrong_overall);
    ADD_FAILURE();
  } catch (const TaskValidationError& e) {
    EXPECT_EQ(e.field(), "difficulty.overall");
  }
}

TEST(TaskModel, UnachievableWithFuzzyMatchIsValid) {
  auto text = replace_all(one_task(R"(, "achievable": false)"), R"({"type": "exact_match", "reference": "a"})",
                          R"({"type": "fuzzy_match", "reference": "N/A"})");
  auto tasks = parse_task_file(text);
  ASSERT_EQ(tasks.size(), 1u);
  EXPECT_FALSE(tasks[0].achievable);
}

TEST(TaskModel, ParseErrorsCarryLineOrField) {
  try {
    parse_task_file("[\n{\"task_id\": \"A\",\n  oops\n}]");
    FAIL();
  } catch (const TaskParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  try {
    parse_task_file(replace_all(one_task(""), R"("site": "shopping")", R"("site": "mall")"));
    FAIL();
  } catch (const TaskParseError& e) {
    EXPECT_EQ(e.field(), "site");
  }
  try {
    parse_task_file(replace_all(one_task(""), R"("type": "exact_match")", R"("type": "regex")"));
    FAIL();
  } catch (const TaskParseError& e) {
    EXPECT_EQ(e.field(), "evaluators");
  }
  EXPECT_THROW(parse_task_file("{}"), TaskParseError);
}

TEST(TaskModel, DuplicateIdsRejected) {
  auto one = one_task("");
  auto two = one.substr(0, one.size() - 1) + "," + one.substr(1);
  EXPECT_THROW(parse_task_file(two), TaskValidationError);
}

TEST(TaskModel, FixtureTaskFileCoversTheMechanismSpace) {
  auto tasks = load_task_file(testing::fixture_dir() + "/tasks/tasks.json");
  EXPECT_GE(tasks.size(), 10u);
  std::set<std::string> types;
  std::set<std::size_t> url_kinds;
  std::set<Site> sites;
  std::set<SubsetTag> tags;
  bool unachievable = false;
  std::function<void(const EvaluatorSpec&)> visit = [&](const EvaluatorSpec& e) {
    types.insert(std::string(evaluator_type_name(e)));
    if (auto* ps = std::get_if<PageState>(&e.value)) {
      url_kinds.insert(ps->url.index());
      for (const auto& i : ps->inner) visit(i);
    }
  };
  for (const auto& t : tasks) {
    sites.insert(t.site);
    tags.insert(t.subset_tags.begin(), t.subset_tags.end());
    unachievable |= !t.achievable;
    for (const auto& e : t.evaluators) visit(e);
  }
  EXPECT_EQ(types, (std::set<std::string>{"exact_match", "must_include", "must_exclude", "fuzzy_match", "eval_vqa",
                                          "eval_fuzzy_image_match", "page_state"}));
  EXPECT_EQ(url_kinds.size(), 3u);
  EXPECT_TRUE(sites.count(Site::classifieds) && sites.count(Site::reddit) && sites.count(Site::shopping));
  EXPECT_EQ(tags.size(), 3u);
  EXPECT_TRUE(unachievable);
}

}  // namespace
}  // namespace webagent
