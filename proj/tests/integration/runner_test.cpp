#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>

#include "integration_support.hpp"
#include "webagent/text_util.hpp"

namespace webagent {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Tasks with read-only episodes, so runs can share one site server.
std::string subset_task_file(const testing::TempDir& dir) {
  json all = json::parse(read_file(testing::layout().tasks()));
  json keep = json::array();
  for (const auto& t : all)
    if (t["task_id"] == "T1" || t["task_id"] == "T9" || t["task_id"] == "T5") keep.push_back(t);
  std::string path = dir.str("tasks.json");
  write_file(path, keep.dump(2));
  return path;
}

struct Harness {
  testing::TempDir dir;
  RunConfig config;
  RunEnvironment env;

  explicit Harness(ObservationMode mode = ObservationMode::acc_tree) {
    auto& stack = testing::stack();
    config = fixtures::fixture_run_config(stack, testing::layout(), mode, dir.str("out"));
    config.task_file = subset_task_file(dir);
    env = fixtures::make_fixture_environment(stack, testing::layout(), testing::prompt_dir(),
                                             fixtures::load_agent_scripts(testing::layout().agents("oracle")),
                                             mode, nullptr);
  }
  std::string out(const std::string& leaf) const { return config.output_dir + "/" + leaf; }
};

TEST(Runner, WritesArtifactsAndScores) {
  Harness h;
  RunReport r = run(h.config, h.env);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.score, 1) << row.task_id << " " << row.error;
    EXPECT_FALSE(row.unevaluated);
    EXPECT_TRUE(fs::exists(h.out(row.task_id + "/trajectory.jsonl")));
    EXPECT_TRUE(fs::exists(h.out(row.task_id + "/result.json")));
    EXPECT_TRUE(fs::exists(h.out(row.task_id + "/step_000.png")));
  }
  for (const char* f : {"report.txt", "report.json", "timing.json"}) EXPECT_TRUE(fs::exists(h.out(f))) << f;
  EXPECT_EQ(read_file(h.out("report.txt")), render_report_text(r));
  EXPECT_EQ(read_file(h.out("report.txt")).find("wall_ms"), std::string::npos);
}

TEST(Runner, ResumeSkipsFinishedTasks) {
  Harness h;
  run(h.config, h.env);
  std::string first = read_file(h.out("report.json"));
  std::string traj = read_file(h.out("T1/trajectory.jsonl"));

  fs::remove_all(h.out("T9"));
  std::atomic<int> opened{0};
  auto inner = h.env.agent_model;
  h.env.agent_model = [&](const TaskSpec& t) {
    ++opened;
    return inner(t);
  };
  h.config.resume = true;
  run(h.config, h.env);
  EXPECT_EQ(opened.load(), 1);
  EXPECT_EQ(read_file(h.out("report.json")), first);
  EXPECT_EQ(read_file(h.out("T1/trajectory.jsonl")), traj);

  run(h.config, h.env);
  EXPECT_EQ(opened.load(), 1);
  EXPECT_EQ(read_file(h.out("report.json")), first);
}

TEST(Runner, CrashInOneTaskLeavesOthersIntact) {
  Harness h;
  auto inner = h.env.agent_model;
  h.env.agent_model = [&](const TaskSpec& t) -> std::shared_ptr<ModelGateway> {
    if (t.task_id == "T9") throw std::runtime_error("backend exploded");
    return inner(t);
  };
  RunReport r = run(h.config, h.env);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) {
    if (row.task_id == "T9") {
      EXPECT_TRUE(row.unevaluated);
      EXPECT_EQ(row.error, "task aborted: backend exploded");
    } else {
      EXPECT_FALSE(row.unevaluated);
      EXPECT_EQ(row.score, 1);
    }
  }
  EXPECT_EQ(r.aggregates.unevaluated, 1);
  EXPECT_EQ(r.aggregates.overall.total, 2);
}

TEST(Runner, ParallelMatchesSerial) {
  Harness serial, parallel;
  run(serial.config, serial.env);
  parallel.config.parallelism = 3;
  run(parallel.config, parallel.env);
  EXPECT_EQ(read_file(parallel.out("report.json")), read_file(serial.out("report.json")));
  for (const char* t : {"T1", "T5", "T9"}) {
    std::string leaf = std::string(t) + "/trajectory.jsonl";
    EXPECT_EQ(read_file(parallel.out(leaf)), read_file(serial.out(leaf))) << t;
  }
}

TEST(Runner, AgentWithoutScriptFailsAtFirstStep) {
  Harness h;
  h.env = fixtures::make_fixture_environment(testing::stack(), testing::layout(), testing::prompt_dir(), {},
                                             ObservationMode::acc_tree, nullptr);
  RunReport r = run(h.config, h.env);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.score, 0) << row.task_id;
    EXPECT_EQ(row.steps, 1) << row.task_id;
  }
}

TEST(Runner, ConfigurationErrorsComeFirst) {
  Harness h;
  h.config.parallelism = 0;
  EXPECT_THROW(run(h.config, h.env), ConfigError);
  Harness som(ObservationMode::som_screenshot_caps);
  som.env.som = nullptr;
  EXPECT_THROW(run(som.config, som.env), ConfigError);
  Harness missing;
  missing.config.task_file = missing.dir.str("absent.json");
  EXPECT_THROW(run(missing.config, missing.env), ConfigError);
  EXPECT_FALSE(fs::exists(h.out("report.json")));
}

}  // namespace
}  // namespace webagent
