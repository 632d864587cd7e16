#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "webagent/browser.hpp"
#include "webagent/evaluator_spec.hpp"
#include "webagent/image.hpp"
#include "webagent/model_gateway.hpp"
#include "webagent/site_urls.hpp"
#include "webagent/task_model.hpp"
#include "webagent/trajectory.hpp"

namespace webagent {

/// Raised when a score cannot be computed (backend failure, undecodable
/// image, unknown resolver). The task is reported as unevaluated.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// String primitives. Each returns 0 or 1.
int exact_match(std::string_view prediction, std::string_view reference);
int must_include(std::string_view prediction, const std::vector<StringRef>& references);
int must_exclude(std::string_view prediction, const std::vector<StringRef>& references);
int fuzzy_match(const std::string& prediction, const std::string& reference,
                const std::string& intent, ModelGateway& judge);

// Visual primitives.
int eval_vqa(const Raster& image, const std::string& question, std::string_view answer,
             ModelGateway& vqa_backend);
int eval_fuzzy_image_match(const Raster& query, const Raster& reference, double threshold);

struct EvaluationContext;

/// Computes the URL a page-state evaluator inspects.
using UrlResolver = std::function<std::string(BrowserSession&, const EvaluationContext&)>;

class ResolverRegistry {
 public:
  void add(std::string name, UrlResolver fn);
  const UrlResolver* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, UrlResolver> resolvers_;
};

struct EvaluationContext {
  const TaskSpec* task = nullptr;
  std::string task_dir;  // base for reference image paths
  SiteUrls sites;
  ModelGateway* judge = nullptr;
  ModelGateway* vqa = nullptr;
  const ResolverRegistry* registry = nullptr;
  /// Loads the raster behind an image URL; defaults to HTTP GET + PNG decode.
  std::function<Raster(const std::string& url)> fetch_image;
};

struct EvaluatorResult {
  std::string type;
  int score = 0;
  std::string message;
};

struct RewardOutcome {
  int score = 0;
  bool unevaluated = false;
  std::string error;
  std::vector<EvaluatorResult> details;
};

int evaluate_page_state(BrowserSession& session, const PageState& spec,
                        const EvaluationContext& ctx, const Trajectory& trajectory,
                        std::vector<EvaluatorResult>& details);

/// Conjunction over the task's evaluators. String primitives read the
/// trajectory's final answer; top-level visual primitives read the final
/// page screenshot.
RewardOutcome evaluate_task(const TaskSpec& task, const Trajectory& trajectory,
                            BrowserSession& session, const EvaluationContext& ctx);

Raster fetch_image_over_http(const std::string& url);

}  // namespace webagent
