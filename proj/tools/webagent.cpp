#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "webagent/fixtures/harness.hpp"
#include "webagent/runner.hpp"
#include "webagent/text_util.hpp"

using namespace webagent;
using namespace webagent::fixtures;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

volatile std::sig_atomic_t g_stop = 0;

struct RunOptions {
  std::string tasks;
  std::string out = "results";
  std::string mode = "acc_tree";
  std::string fixtures;
  std::string browser;
  std::string agent_script;
  std::string agent_endpoint;
  std::string agent_model;
  bool agent_images = false;
  std::string aux_backend;
  std::string aux_endpoint;
  std::string aux_model;
  std::string prompts = WEBAGENT_PROMPT_DIR;
  std::string som_dir;
  std::string som_script;
  std::vector<std::string> sites;
  std::string reset_hook;
  std::string call_log;
  std::string sampling = "general";
  int parallel = 1;
  int max_steps = 30;
  int k_examples = 3;
  std::string viewport = "1280x2048";
  bool resume = false;
};

ObservationMode parse_mode(const std::string& s) {
  auto m = observation_mode_from_string(s);
  if (!m) throw CLI::ValidationError("--mode", "unknown observation mode '" + s + "'");
  return *m;
}

SamplingConfig parse_sampling(const std::string& s) {
  if (s == "general") return SamplingConfig::general();
  if (s == "alternate") return SamplingConfig::alternate();
  if (s == "gemini") return SamplingConfig::gemini();
  throw CLI::ValidationError("--sampling", "expected general, alternate or gemini");
}

BackendProfile remote_profile(const std::string& endpoint, const std::string& model, bool images) {
  BackendProfile p;
  p.kind = BackendProfile::Kind::remote_chat;
  p.endpoint = endpoint;
  p.model = model;
  p.supports_images = images;
  return p;
}

BackendProfile fake_profile(const std::string& model) {
  BackendProfile p;
  p.model = model;
  p.supports_images = true;
  p.max_retries = 0;
  return p;
}

int run_command(RunOptions o) {
  ObservationMode mode = parse_mode(o.mode);
  std::unique_ptr<FixtureStack> stack;
  std::optional<FixtureLayout> layout;
  if (!o.fixtures.empty()) {
    layout = FixtureLayout{o.fixtures};
    stack = std::make_unique<FixtureStack>(layout->sites());
    if (o.tasks.empty()) o.tasks = layout->tasks();
    if (o.agent_script.empty() && o.agent_endpoint.empty()) o.agent_script = layout->agents("oracle");
    if (o.aux_backend.empty() && o.aux_endpoint.empty()) o.aux_backend = layout->backend();
    if (o.som_dir.empty() && o.som_script.empty()) o.som_dir = layout->som();
  }
  if (o.tasks.empty()) throw CLI::ValidationError("--tasks", "required without --fixtures");

  RunConfig config;
  config.task_file = o.tasks;
  config.sites = stack ? stack->site_urls() : SiteUrls::from_environment();
  for (const auto& kv : o.sites) {
    auto eq = kv.find('=');
    auto site = eq == std::string::npos ? std::nullopt : site_from_string(kv.substr(0, eq));
    if (!site) throw CLI::ValidationError("--site", "expected NAME=URL, got '" + kv + "'");
    config.sites.base[*site] = kv.substr(eq + 1);
  }
  config.agent.mode = mode;
  config.agent.max_steps = o.max_steps;
  config.agent.k_examples = o.k_examples;
  config.agent.sampling = parse_sampling(o.sampling);
  config.output_dir = o.out;
  config.parallelism = o.parallel;
  config.session = stack ? fixture_session_options() : SessionOptions{};
  if (std::sscanf(o.viewport.c_str(), "%dx%d", &config.session.viewport.width, &config.session.viewport.height) != 2 ||
      config.session.viewport.width <= 0 || config.session.viewport.height <= 0) {
    throw CLI::ValidationError("--viewport", "expected WxH, got '" + o.viewport + "'");
  }
  config.reset_hook = o.reset_hook;
  config.resume = o.resume;

  auto log = o.call_log.empty() ? nullptr : std::make_shared<CallLog>(o.call_log);

  RunEnvironment env;
  if (stack) {
    env.open_session = [s = stack.get()](const SessionOptions& so) { return s->open_session(so); };
    if (o.reset_hook.empty()) env.reset = [s = stack.get()] { s->reset(); };
  } else {
    if (o.browser.empty()) throw CLI::ValidationError("--browser", "required without --fixtures");
    env.open_session = [ep = o.browser](const SessionOptions& so) { return open_cdp_session(ep, so); };
  }

  if (!o.agent_script.empty()) {
    auto scripts = load_agent_scripts(o.agent_script);
    SiteUrls sites = config.sites;
    env.agent_model = [scripts, sites, mode, log](const TaskSpec& task) {
      std::vector<ScriptStep> steps;
      if (auto it = scripts.find(task.task_id); it != scripts.end()) steps = it->second.steps_for(mode);
      return std::make_shared<ModelGateway>(fake_profile("scripted-agent"),
                                            std::make_shared<ScriptedAgentTransport>(std::move(steps), sites), log);
    };
  } else if (!o.agent_endpoint.empty()) {
    auto gw = std::make_shared<ModelGateway>(remote_profile(o.agent_endpoint, o.agent_model, o.agent_images),
                                             std::make_shared<HttpChatTransport>(o.agent_endpoint, o.agent_model),
                                             log);
    env.agent_model = [gw](const TaskSpec&) { return gw; };
  } else {
    throw CLI::ValidationError("--agent-script", "an agent script or endpoint is required");
  }

  std::shared_ptr<ModelGateway> aux;
  if (!o.aux_backend.empty()) {
    aux = std::make_shared<ModelGateway>(fake_profile("aux"), load_fake_backend(o.aux_backend), log);
  } else if (!o.aux_endpoint.empty()) {
    aux = std::make_shared<ModelGateway>(remote_profile(o.aux_endpoint, o.aux_model, true),
                                         std::make_shared<HttpChatTransport>(o.aux_endpoint, o.aux_model), log);
  }
  env.captioner = env.vqa = env.judge = aux;

  std::shared_ptr<SomProvider> live;
  if (!o.som_script.empty()) {
    live = std::make_shared<ScriptSomProvider>(read_file(o.som_script));
  } else if (stack) {
    live = std::make_shared<ScriptSomProvider>(kSomBindingExpression, false);
  }
  std::shared_ptr<PrecomputedSomProvider> precomputed;
  if (!o.som_dir.empty()) {
    precomputed = std::make_shared<PrecomputedSomProvider>(o.som_dir, live);
    env.som = precomputed;
  } else {
    env.som = live;
  }

  register_fixture_resolvers(env.resolvers);
  env.prompts = PromptAssets::load(o.prompts);

  RunReport report = run(config, env);
  std::cout << render_report_text(report);
  if (precomputed && precomputed->misses() > 0) {
    std::cerr << "warning: " << precomputed->misses() << " SoM annotations were not precomputed\n";
  }
  return 0;
}

int serve_command(const std::string& fixtures, int site_port, int cdp_port) {
  FixtureLayout layout{fixtures};
  FixtureStack stack(layout.sites(), {site_port, cdp_port});
  for (const auto& [site, url] : stack.site_urls().base) {
    std::string name(to_string(site));
    for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::cout << "WEBAGENT_" << name << "_URL=" << url << "\n";
  }
  std::cout << "CDP endpoint: " << stack.cdp_endpoint() << std::endl;
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  return 0;
}

// Prompt examples -----------------------------------------------------------

struct ExampleSpec {
  std::string site;
  std::string url;  // relative to the site base
  std::string objective;
  std::string reasoning;
  std::string action;  // script template
};

const std::vector<ExampleSpec>& example_specs() {
  static const std::vector<ExampleSpec> specs = {
      {"shopping", "/search?q=mug", "What is the price of the blue ceramic mug?",
       "This page lists the Ceramic Mug - Blue and shows its price, $9.50. I have the answer, so I will stop with "
       "it.",
       "stop [$9.50]"},
      {"classifieds", "/", "Show me the listing for the brass desk lamp.",
       "The listings on this page include a link titled Brass desk lamp. Opening it shows the listing.",
       "click [{{id:=Brass desk lamp@link,A}}]"},
      {"reddit", "/users", "Open the profile page of the user potluck.",
       "This page lists the forum's users. The user potluck has a link here, and following it opens the profile.",
       "click [{{id:=potluck@link,A}}]"},
  };
  return specs;
}

json make_example(BrowserSession& session, SomProvider& som_provider, const SiteUrls& sites, const ExampleSpec& spec,
                  bool som, const fs::path& prompt_dir, std::size_t index) {
  Site site = *site_from_string(spec.site);
  session.goto_url(sites.resolve(site, spec.url));
  ObservationSettings settings;
  settings.mode = som ? ObservationMode::som_screenshot_caps : ObservationMode::acc_tree;
  settings.som = &som_provider;
  if (som) settings.captioner = [](const std::string&) { return std::string("a photo"); };
  Observation obs = build_observation(session, settings);
  std::string action = fill_script_template(spec.action, obs.text_payload, sites);
  json e = {{"site", spec.site},
            {"observation", render_observation_block(obs)},
            {"url", obs.url},
            {"objective", spec.objective},
            {"previous_action", "None"},
            {"response", "Let's think step-by-step. " + spec.reasoning + " " + std::string(kActionPhrase) + " ```" +
                             action + "```"}};
  if (som && obs.screenshot) {
    std::string name = "examples/som_" + std::to_string(index + 1) + ".png";
    fs::create_directories(prompt_dir / "examples");
    save_png(*obs.screenshot, (prompt_dir / name).string());
    e["screenshot"] = name;
  }
  return e;
}

void write_examples(FixtureStack& stack, const fs::path& prompt_dir) {
  auto session = stack.open_session(fixture_session_options());
  ScriptSomProvider som(kSomBindingExpression, false);
  SiteUrls sites = stack.site_urls();
  json out = {{"tree", json::array()}, {"som", json::array()}};
  const auto& specs = example_specs();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out["tree"].push_back(make_example(*session, som, sites, specs[i], false, prompt_dir, i));
    out["som"].push_back(make_example(*session, som, sites, specs[i], true, prompt_dir, i));
  }
  write_file((prompt_dir / "examples.json").string(), out.dump(2) + "\n");
}

void write_golden(FixtureStack& stack, const FixtureLayout& layout) {
  auto session = stack.open_session(fixture_session_options());
  ScriptSomProvider som(kSomBindingExpression, false);
  std::string root = stack.site_urls().base.at(Site::multi);
  if (!root.empty() && root.back() == '/') root.pop_back();
  for (const auto& page : load_golden_pages(layout)) {
    stack.reset();
    PageTexts t = render_page_texts(*session, som, root + page.url);
    write_file(layout.golden() + "/" + page.name + ".acc_tree.txt", t.acc_tree);
    write_file(layout.golden() + "/" + page.name + ".som.txt", t.som);
  }
}

void record_som(FixtureStack& stack, const FixtureLayout& layout, const std::string& prompt_dir) {
  auto live = std::make_shared<ScriptSomProvider>(kSomBindingExpression, false);
  auto recorder = std::make_shared<RecordingSomProvider>(live);
  fs::path tmp = fs::temp_directory_path() / "webagent-fixture-assets";
  for (const char* agent : {"oracle", "adversarial"}) {
    auto scripts = load_agent_scripts(layout.agents(agent));
    RunEnvironment env =
        make_fixture_environment(stack, layout, prompt_dir, scripts, ObservationMode::som_screenshot_caps, recorder);
    RunConfig config = fixture_run_config(stack, layout, ObservationMode::som_screenshot_caps, (tmp / agent).string());
    RunReport r = run(config, env);
    std::cout << agent << ": " << r.aggregates.overall.successes << "/" << r.aggregates.overall.total << "\n";
  }
  {
    auto session = stack.open_session(fixture_session_options());
    std::string root = stack.site_urls().base.at(Site::multi);
    if (!root.empty() && root.back() == '/') root.pop_back();
    for (const auto& page : load_golden_pages(layout)) {
      stack.reset();
      session->goto_url(root + page.url);
      recorder->annotate(*session);
    }
  }
  fs::remove_all(layout.som());
  recorder->save(layout.som());
  fs::remove_all(tmp);
  std::cout << "recorded " << recorder->size() << " SoM manifests\n";
}

int fixture_assets_command(const std::string& fixtures, const std::string& prompt_dir) {
  FixtureLayout layout{fixtures};
  FixtureStack stack(layout.sites());
  write_examples(stack, prompt_dir);
  write_golden(stack, layout);
  record_som(stack, layout, prompt_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal web agent runner"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Run an agent over a task file");
  run_cmd->add_option("--tasks", ro.tasks, "Task file (JSON)");
  run_cmd->add_option("--out", ro.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--mode", ro.mode, "acc_tree | acc_tree_caps | multimodal | som (or the long names)")
      ->capture_default_str();
  run_cmd->add_option("--fixtures", ro.fixtures, "Serve the fixture sites and browser in process");
  run_cmd->add_option("--browser", ro.browser, "DevTools endpoint, http://host:port or ws://...");
  run_cmd->add_option("--agent-script", ro.agent_script, "Scripted agent file");
  run_cmd->add_option("--endpoint,--agent-endpoint", ro.agent_endpoint, "Chat-completion URL of the agent model");
  run_cmd->add_option("--agent-model", ro.agent_model, "Model name sent to the agent endpoint");
  run_cmd->add_flag("--agent-images", ro.agent_images, "The agent model accepts images");
  run_cmd->add_option("--fake-backends,--aux-backend", ro.aux_backend, "Fake backend table for captions, VQA and the judge");
  run_cmd->add_option("--aux-endpoint", ro.aux_endpoint, "Chat-completion URL for captions, VQA and the judge");
  run_cmd->add_option("--aux-model", ro.aux_model, "Model name sent to the aux endpoint");
  run_cmd->add_option("--prompts", ro.prompts, "Prompt directory")->capture_default_str();
  run_cmd->add_option("--som-dir", ro.som_dir, "Precomputed SoM manifests");
  run_cmd->add_option("--som-script", ro.som_script, "Annotation script evaluated in the page");
  run_cmd->add_option("--site", ro.sites, "Override a site base URL, NAME=URL");
  run_cmd->add_option("--parallel", ro.parallel, "Concurrent episodes")->capture_default_str();
  run_cmd->add_flag("--resume", ro.resume, "Skip tasks with a result already on disk");
  run_cmd->add_option("--reset-hook", ro.reset_hook, "Shell command run before each task");
  run_cmd->add_option("--max-steps", ro.max_steps)->capture_default_str();
  run_cmd->add_option("--examples,--k-examples", ro.k_examples, "In-context examples, 0 to 3")->capture_default_str();
  run_cmd->add_option("--sampling", ro.sampling, "general | alternate | gemini")->capture_default_str();
  run_cmd->add_option("--viewport", ro.viewport, "Viewport size, WxH")->capture_default_str();
  run_cmd->add_option("--call-log", ro.call_log, "JSONL log of model calls");

  std::string fixtures = WEBAGENT_FIXTURE_DIR;
  int site_port = 0;
  int cdp_port = 0;
  auto* serve_cmd = app.add_subcommand("serve-fixtures", "Serve the fixture sites and browser until interrupted");
  serve_cmd->add_option("--fixtures", fixtures)->capture_default_str();
  serve_cmd->add_option("--site-port", site_port);
  serve_cmd->add_option("--cdp-port", cdp_port);

  std::string prompt_dir = WEBAGENT_PROMPT_DIR;
  auto* assets_cmd =
      app.add_subcommand("fixture-assets", "Regenerate prompt examples, golden texts and SoM manifests");
  assets_cmd->add_option("--fixtures", fixtures)->capture_default_str();
  assets_cmd->add_option("--prompts", prompt_dir)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_command(ro);
    if (*serve_cmd) return serve_command(fixtures, site_port, cdp_port);
    if (*assets_cmd) return fixture_assets_command(fixtures, prompt_dir);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
