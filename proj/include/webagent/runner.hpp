#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "webagent/agent.hpp"
#include "webagent/browser.hpp"
#include "webagent/evaluation.hpp"
#include "webagent/model_gateway.hpp"
#include "webagent/observation.hpp"
#include "webagent/site_urls.hpp"
#include "webagent/som.hpp"
#include "webagent/task_model.hpp"

namespace webagent {

struct TaskRow {
  std::string task_id;
  Site site = Site::classifieds;
  DifficultyRating difficulty;
  std::set<SubsetTag> subset_tags;
  bool achievable = true;
  int score = 0;
  bool unevaluated = false;
  int steps = 0;
  Termination termination = Termination::error;
  std::string error;
  std::vector<EvaluatorResult> details;
  double wall_ms = 0;  // reported in timing.json only
};

nlohmann::json task_row_to_json(const TaskRow& row);
TaskRow task_row_from_json(const nlohmann::json& j);

struct RateCell {
  int successes = 0;
  int total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(successes) / total; }
  void add(int score) {
    ++total;
    successes += score;
  }
};

struct Aggregates {
  int tasks = 0;
  int unevaluated = 0;
  RateCell overall;
  std::map<Site, RateCell> per_site;
  /// [action - 1][visual - 1]
  RateCell matrix[3][3];
  std::map<Level, RateCell> by_action;
  std::map<Level, RateCell> by_visual;
  std::map<Level, RateCell> by_overall;
  std::map<SubsetTag, RateCell> subsets;
  RateCell achievable;
  RateCell unachievable;
  /// Bucket i counts rows with 5i+1 .. 5i+5 steps (0-step rows fall in bucket 0).
  std::vector<int> step_histogram;
};

/// Rates cover evaluated rows only; the histogram covers every row.
Aggregates aggregate(const std::vector<TaskRow>& rows);

struct RunReport {
  std::vector<TaskRow> rows;
  Aggregates aggregates;
};

std::string render_report_text(const RunReport& report);
nlohmann::json render_report_json(const RunReport& report);

struct RunConfig {
  std::string task_file;
  SiteUrls sites;
  AgentConfig agent;
  std::string output_dir;
  int parallelism = 1;
  SessionOptions session;
  TextBudget budget = default_observation_budget();
  std::string reset_hook;  // shell command run before each task
  bool resume = false;
};

/// Everything a run needs from the outside world.
struct RunEnvironment {
  std::function<std::unique_ptr<BrowserSession>(const SessionOptions&)> open_session;
  /// Model client for one task's episode.
  std::function<std::shared_ptr<ModelGateway>(const TaskSpec&)> agent_model;
  std::shared_ptr<ModelGateway> captioner;
  std::shared_ptr<ModelGateway> vqa;
  std::shared_ptr<ModelGateway> judge;
  std::shared_ptr<SomProvider> som;
  ResolverRegistry resolvers;
  PromptAssets prompts;
  std::function<Raster(const std::string&)> fetch_image = fetch_image_over_http;
  /// Called before each task in place of the reset hook command when set.
  std::function<void()> reset;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs every task in the file and writes `<out>/<task_id>/{trajectory.jsonl,
/// step_NNN.png, result.json}` plus report.txt, report.json and timing.json.
/// Throws ConfigError before any episode on unusable configuration.
RunReport run(const RunConfig& config, RunEnvironment& env);

}  // namespace webagent
