#include "webagent/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <thread>

#include "webagent/text_util.hpp"

namespace webagent {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Level level_from_int(int v) { return static_cast<Level>(v); }

json details_to_json(const std::vector<EvaluatorResult>& details) {
  json arr = json::array();
  for (const auto& d : details) arr.push_back({{"type", d.type}, {"score", d.score}, {"message", d.message}});
  return arr;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string cell_text(const RateCell& c) {
  return std::to_string(c.successes) + "/" + std::to_string(c.total) + " " + format_percent(c.rate());
}

std::string level_name(Level l) { return std::string(to_string(l)); }

}  // namespace

json task_row_to_json(const TaskRow& row) {
  json tags = json::array();
  for (SubsetTag t : row.subset_tags) tags.push_back(to_string(t));
  json j = {{"task_id", row.task_id},
            {"site", to_string(row.site)},
            {"difficulty",
             {{"action", static_cast<int>(row.difficulty.action_difficulty)},
              {"visual", static_cast<int>(row.difficulty.visual_difficulty)},
              {"overall", static_cast<int>(row.difficulty.overall)}}},
            {"subset_tags", tags},
            {"achievable", row.achievable},
            {"score", row.score},
            {"unevaluated", row.unevaluated},
            {"steps", row.steps},
            {"termination", to_string(row.termination)},
            {"details", details_to_json(row.details)}};
  if (!row.error.empty()) j["error"] = row.error;
  return j;
}

TaskRow task_row_from_json(const json& j) {
  TaskRow r;
  r.task_id = j.at("task_id").get<std::string>();
  r.site = site_from_string(j.at("site").get<std::string>()).value_or(Site::classifieds);
  const json& d = j.at("difficulty");
  r.difficulty = {level_from_int(d.at("action").get<int>()), level_from_int(d.at("visual").get<int>()),
                  level_from_int(d.at("overall").get<int>())};
  for (const auto& t : j.value("subset_tags", json::array())) {
    if (auto tag = subset_tag_from_string(t.get<std::string>())) r.subset_tags.insert(*tag);
  }
  r.achievable = j.value("achievable", true);
  r.score = j.at("score").get<int>();
  r.unevaluated = j.value("unevaluated", false);
  r.steps = j.value("steps", 0);
  std::string term = j.value("termination", std::string("error"));
  r.termination = term == "stopped" ? Termination::stopped
                  : term == "max_steps" ? Termination::max_steps
                                        : Termination::error;
  r.error = j.value("error", std::string());
  for (const auto& e : j.value("details", json::array())) {
    r.details.push_back({e.value("type", std::string()), e.value("score", 0), e.value("message", std::string())});
  }
  return r;
}

Aggregates aggregate(const std::vector<TaskRow>& rows) {
  Aggregates a;
  a.tasks = static_cast<int>(rows.size());
  for (const auto& r : rows) {
    std::size_t bucket = r.steps <= 0 ? 0 : static_cast<std::size_t>((r.steps - 1) / 5);
    if (a.step_histogram.size() <= bucket) a.step_histogram.resize(bucket + 1, 0);
    ++a.step_histogram[bucket];
    if (r.unevaluated) {
      ++a.unevaluated;
      continue;
    }
    a.overall.add(r.score);
    a.per_site[r.site].add(r.score);
    int ai = static_cast<int>(r.difficulty.action_difficulty) - 1;
    int vi = static_cast<int>(r.difficulty.visual_difficulty) - 1;
    a.matrix[ai][vi].add(r.score);
    a.by_action[r.difficulty.action_difficulty].add(r.score);
    a.by_visual[r.difficulty.visual_difficulty].add(r.score);
    a.by_overall[r.difficulty.overall].add(r.score);
    for (SubsetTag t : r.subset_tags) a.subsets[t].add(r.score);
    (r.achievable ? a.achievable : a.unachievable).add(r.score);
  }
  return a;
}

std::string render_report_text(const RunReport& report) {
  const Aggregates& a = report.aggregates;
  std::string out;
  out += "tasks " + std::to_string(a.tasks) + ", evaluated " + std::to_string(a.overall.total) + ", unevaluated " +
         std::to_string(a.unevaluated) + "\n";
  out += "success rate " + cell_text(a.overall) + "\n";
  if (a.tasks == 0) return out;

  out += "\nper site\n";
  for (const auto& [site, c] : a.per_site) out += "  " + pad(std::string(to_string(site)), 14) + cell_text(c) + "\n";

  out += "\naction x visual difficulty\n";
  out += "  " + pad("", 14);
  for (int v = 0; v < 3; ++v) out += pad("visual " + level_name(level_from_int(v + 1)), 22);
  out += "\n";
  for (int ac = 0; ac < 3; ++ac) {
    out += "  " + pad("action " + level_name(level_from_int(ac + 1)), 14);
    for (int v = 0; v < 3; ++v) out += pad(cell_text(a.matrix[ac][v]), 22);
    out += "\n";
  }
  out += "\noverall difficulty\n";
  for (const auto& [l, c] : a.by_overall) out += "  " + pad(level_name(l), 14) + cell_text(c) + "\n";

  out += "\nsubsets\n";
  for (const auto& [t, c] : a.subsets) out += "  " + pad(std::string(to_string(t)), 20) + cell_text(c) + "\n";
  out += "  " + pad("achievable", 20) + cell_text(a.achievable) + "\n";
  out += "  " + pad("unachievable", 20) + cell_text(a.unachievable) + "\n";

  out += "\ntrajectory length\n";
  for (std::size_t i = 0; i < a.step_histogram.size(); ++i) {
    out += "  " + pad(std::to_string(5 * i + 1) + "-" + std::to_string(5 * i + 5), 8) +
           std::to_string(a.step_histogram[i]) + "\n";
  }

  out += "\ntasks\n";
  for (const auto& r : report.rows) {
    out += "  " + pad(r.task_id, 16) + pad(std::string(to_string(r.site)), 13) +
           pad(r.unevaluated ? "unevaluated" : "score " + std::to_string(r.score), 13) +
           pad("steps " + std::to_string(r.steps), 10) + std::string(to_string(r.termination)) + "\n";
  }
  return out;
}

json render_report_json(const RunReport& report) {
  const Aggregates& a = report.aggregates;
  auto cell = [](const RateCell& c) {
    return json{{"successes", c.successes}, {"total", c.total}, {"rate", format_percent(c.rate())}};
  };
  json per_site = json::object();
  for (const auto& [s, c] : a.per_site) per_site[std::string(to_string(s))] = cell(c);
  json matrix = json::array();
  for (int ac = 0; ac < 3; ++ac) {
    json row = json::array();
    for (int v = 0; v < 3; ++v) row.push_back(cell(a.matrix[ac][v]));
    matrix.push_back(row);
  }
  json subsets = json::object();
  for (const auto& [t, c] : a.subsets) subsets[std::string(to_string(t))] = cell(c);
  json by_overall = json::object();
  for (const auto& [l, c] : a.by_overall) by_overall[level_name(l)] = cell(c);
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(task_row_to_json(r));
  return {{"tasks", a.tasks},
          {"unevaluated", a.unevaluated},
          {"overall", cell(a.overall)},
          {"per_site", per_site},
          {"difficulty_matrix", matrix},
          {"overall_difficulty", by_overall},
          {"subsets", subsets},
          {"achievable", cell(a.achievable)},
          {"unachievable", cell(a.unachievable)},
          {"step_histogram", a.step_histogram},
          {"rows", rows}};
}

namespace {

TaskRow row_skeleton(const TaskSpec& t) {
  TaskRow r;
  r.task_id = t.task_id;
  r.site = t.site;
  r.difficulty = t.difficulty;
  r.subset_tags = t.subset_tags;
  r.achievable = t.achievable;
  return r;
}

std::string step_file(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%03d.png", i);
  return buf;
}

TaskRow run_one(const TaskSpec& task, const RunConfig& config, RunEnvironment& env, const fs::path& task_dir_in,
                const fs::path& out_dir) {
  TaskRow row = row_skeleton(task);
  fs::create_directories(out_dir);
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (entry.path().extension() == ".png") fs::remove(entry.path());
  }

  std::unique_ptr<BrowserSession> session = env.open_session(config.session);
  session->goto_url(config.sites.resolve(task.site, task.start_url));

  TaskInputs inputs;
  for (const auto& path : task.input_images) {
    auto img = std::make_shared<const Raster>(load_png((task_dir_in / path).string()));
    inputs.images.push_back(img);
    if (uses_captions(config.agent.mode)) {
      std::string caption = "unavailable";
      if (env.captioner) {
        try {
          caption = env.captioner->caption(*img);
        } catch (const std::exception&) {
        }
      }
      inputs.captions.push_back(caption);
    }
  }

  ObservationSettings obs;
  obs.mode = config.agent.mode;
  obs.budget = config.budget;
  obs.som = env.som.get();
  if (uses_captions(config.agent.mode) && env.captioner) obs.captioner = make_captioner(*env.captioner, env.fetch_image);

  EpisodeHooks hooks;
  hooks.on_observation = [&](int step, const Observation& o) {
    if (o.record_screenshot) save_png(*o.record_screenshot, (out_dir / step_file(step)).string());
  };

  std::shared_ptr<ModelGateway> model = env.agent_model(task);
  Trajectory traj = run_episode(task, *session, *model, config.agent, env.prompts, obs, inputs, hooks);
  write_file((out_dir / "trajectory.jsonl").string(), trajectory_to_jsonl(traj));
  row.steps = static_cast<int>(traj.steps.size());
  row.termination = traj.termination;
  row.error = traj.error;

  EvaluationContext ctx;
  ctx.task_dir = task_dir_in.string();
  ctx.sites = config.sites;
  ctx.judge = env.judge.get();
  ctx.vqa = env.vqa.get();
  ctx.registry = &env.resolvers;
  ctx.fetch_image = env.fetch_image;
  RewardOutcome outcome = evaluate_task(task, traj, *session, ctx);
  row.score = outcome.score;
  row.unevaluated = outcome.unevaluated;
  row.details = outcome.details;
  if (outcome.unevaluated) row.error = (row.error.empty() ? "" : row.error + "; ") + "evaluation: " + outcome.error;
  for (const auto& d : traj.steps) row.wall_ms += d.wall_ms;
  return row;
}

void reset_environment(const RunConfig& config, RunEnvironment& env) {
  if (env.reset) {
    env.reset();
  } else if (!config.reset_hook.empty()) {
    int rc = std::system(config.reset_hook.c_str());
    if (rc != 0) throw std::runtime_error("reset hook exited with status " + std::to_string(rc));
  }
}

}  // namespace

RunReport run(const RunConfig& config, RunEnvironment& env) {
  if (config.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (config.output_dir.empty()) throw ConfigError("output directory is required");
  if (!env.open_session || !env.agent_model) throw ConfigError("browser and agent backends are required");
  if (uses_som(config.agent.mode) && !env.som) throw ConfigError("SoM mode requires a SoM provider");
  std::vector<TaskSpec> tasks;
  try {
    tasks = load_task_file(config.task_file);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  for (const auto& t : tasks) {
    for (const auto& e : t.evaluators) {
      std::vector<const EvaluatorSpec*> stack{&e};
      while (!stack.empty()) {
        const EvaluatorSpec* s = stack.back();
        stack.pop_back();
        if (const auto* ps = std::get_if<PageState>(&s->value)) {
          if (const auto* f = std::get_if<FuncUrl>(&ps->url); f && !env.resolvers.find(f->name)) {
            throw ConfigError("task " + t.task_id + ": unknown url resolver '" + f->name + "'");
          }
          for (const auto& inner : ps->inner) stack.push_back(&inner);
        }
      }
    }
  }

  const fs::path task_dir = fs::path(config.task_file).parent_path();
  const fs::path out(config.output_dir);
  fs::create_directories(out);

  RunReport report;
  report.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex reset_mu;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= tasks.size()) return;
      const TaskSpec& task = tasks[i];
      const fs::path task_out = out / task.task_id;
      const fs::path result_file = task_out / "result.json";
      if (config.resume && fs::exists(result_file)) {
        try {
          report.rows[i] = task_row_from_json(json::parse(read_file(result_file.string())));
          continue;
        } catch (const std::exception&) {
        }
      }
      auto started = std::chrono::steady_clock::now();
      TaskRow row;
      try {
        {
          std::lock_guard lock(reset_mu);
          reset_environment(config, env);
        }
        row = run_one(task, config, env, task_dir, task_out);
      } catch (const std::exception& e) {
        row = row_skeleton(task);
        row.unevaluated = true;
        row.termination = Termination::error;
        row.error = std::string("task aborted: ") + e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      fs::create_directories(task_out);
      write_file(result_file.string(), task_row_to_json(row).dump(2) + "\n");
      report.rows[i] = row;
    }
  };

  std::vector<std::thread> pool;
  int n = std::min<int>(config.parallelism, std::max<int>(1, static_cast<int>(tasks.size())));
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  report.aggregates = aggregate(report.rows);
  write_file((out / "report.txt").string(), render_report_text(report));
  write_file((out / "report.json").string(), render_report_json(report).dump(2) + "\n");
  json timing = json::object();
  for (const auto& r : report.rows) timing[r.task_id] = {{"wall_ms", r.wall_ms}};
  write_file((out / "timing.json").string(), timing.dump(2) + "\n");
  return report;
}

}  // namespace webagent
