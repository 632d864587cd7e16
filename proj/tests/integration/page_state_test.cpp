#include <gtest/gtest.h>

#include "integration_support.hpp"
#include "webagent/evaluation.hpp"
#include "webagent/fixtures/scripted_agent.hpp"

namespace webagent {
namespace {

using testing::open_session;
using testing::site_url;

class PageStateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    testing::stack().reset();
    fixtures::register_fixture_resolvers(registry);
    task.task_id = "ps";
    task.site = Site::shopping;
    ctx.task = &task;
    ctx.task_dir = testing::fixture_dir() + "/tasks";
    ctx.sites = testing::stack().site_urls();
    ctx.judge = aux.get();
    ctx.vqa = aux.get();
    ctx.registry = &registry;
    ctx.fetch_image = fetch_image_over_http;
  }

  int evaluate(const PageState& ps) {
    details.clear();
    return evaluate_page_state(*session, ps, ctx, trajectory, details);
  }

  std::unique_ptr<BrowserSession> session = open_session();
  std::shared_ptr<ModelGateway> aux = fixtures::fixture_aux_gateway(testing::layout());
  ResolverRegistry registry;
  TaskSpec task;
  EvaluationContext ctx;
  Trajectory trajectory;
  std::vector<EvaluatorResult> details;
};

PageState text_state(UrlSpec url, std::string selector, EvaluatorSpec inner) {
  return PageState{std::move(url), {std::move(selector), Extract::text}, {std::move(inner)}};
}

TEST_F(PageStateTest, LiteralUrlIsSiteRelative) {
  auto ps = text_state(LiteralUrl{"/"}, ".product-item .price", {MustInclude{{StringRef::parse("$279.49")}}});
  EXPECT_EQ(evaluate(ps), 1);
  EXPECT_EQ(session->current_url(), site_url(Site::shopping, "/"));
  ps.inner = {{MustInclude{{StringRef::parse("$1.00")}}}};
  EXPECT_EQ(evaluate(ps), 0);
}

TEST_F(PageStateTest, LastPageReadsTheCurrentPage) {
  session->goto_url(site_url(Site::reddit, "/post/412"));
  auto ps = text_state(LastPageUrl{}, ".post-id", {ExactMatch{"Post #412"}});
  EXPECT_EQ(evaluate(ps), 1);
  session->goto_url(site_url(Site::reddit, "/post/411"));
  EXPECT_EQ(evaluate(ps), 0);
}

TEST_F(PageStateTest, FunctionUrlGoesThroughTheRegistry) {
  const UrlResolver* fn = registry.find("shopping_get_latest_order_url");
  ASSERT_NE(fn, nullptr);
  auto ps = text_state(FuncUrl{"shopping_get_latest_order_url"}, ".order-details",
                       {MustInclude{{StringRef::parse("B0983XCYK6"), StringRef::parse("Red")}}});
  EXPECT_EQ((*fn)(*session, ctx), site_url(Site::shopping, "/orders"));
  EXPECT_EQ(evaluate(ps), 0);

  session->goto_url(site_url(Site::shopping, "/product/B0983XCYK6"));
  session->click(testing::node_of(*session, "button", "Add to Cart"));
  session->click(testing::node_of(*session, "button", "Place Order"));
  std::string url = (*fn)(*session, ctx);
  EXPECT_NE(url, site_url(Site::shopping, "/orders"));
  session->goto_url(site_url(Site::shopping, "/"));
  EXPECT_EQ(evaluate(ps), 1);
  EXPECT_EQ(session->current_url(), url);
  EXPECT_THROW(evaluate(text_state(FuncUrl{"unknown"}, "p", {ExactMatch{"x"}})), EvaluationError);
}

TEST_F(PageStateTest, MissingElementScoresZero) {
  auto ps = text_state(LiteralUrl{"/cart"}, ".no-such-class", {MustExclude{{StringRef::parse("x")}}});
  EXPECT_EQ(evaluate(ps), 0);
}

TEST_F(PageStateTest, ImageExtractionFeedsVisualEvaluators) {
  task.site = Site::classifieds;
  PageState ps{LiteralUrl{"/item/102"}, {".listing-image", Extract::image},
               {{FuzzyImageMatch{"images/bike_mountain.png", 0.99}}}};
  EXPECT_EQ(evaluate(ps), 1);
  ps.url = LiteralUrl{"/item/103"};
  EXPECT_EQ(evaluate(ps), 0);
  ASSERT_EQ(details.size(), 2u);
  EXPECT_EQ(details[0].type, "eval_fuzzy_image_match");
  EXPECT_EQ(details[1].type, "page_state");
}

TEST_F(PageStateTest, TaskConjunction) {
  task.evaluators = {{ExactMatch{"$279.49"}},
                     {text_state(LiteralUrl{"/"}, ".product-item .price", {MustInclude{{StringRef::parse("$24.00")}}})}};
  trajectory.final_answer = "$279.49";
  auto out = evaluate_task(task, trajectory, *session, ctx);
  EXPECT_EQ(out.score, 1);
  EXPECT_FALSE(out.unevaluated);
  trajectory.final_answer = "$279.50";
  EXPECT_EQ(evaluate_task(task, trajectory, *session, ctx).score, 0);
}

}  // namespace
}  // namespace webagent
