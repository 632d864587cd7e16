#include "webagent/fixtures/harness.hpp"

#include "webagent/fixtures/fixture_browser.hpp"
#include "webagent/text_util.hpp"

namespace webagent::fixtures {

namespace {

BackendProfile fake_profile(std::string model) {
  BackendProfile p;
  p.kind = BackendProfile::Kind::fake;
  p.model = std::move(model);
  p.supports_images = true;
  p.max_retries = 0;
  return p;
}

}  // namespace

std::shared_ptr<PrecomputedSomProvider> fixture_som_provider(const FixtureLayout& layout) {
  auto live = std::make_shared<ScriptSomProvider>(kSomBindingExpression, /*paints_overlays=*/false);
  return std::make_shared<PrecomputedSomProvider>(layout.som(), live);
}

std::shared_ptr<ModelGateway> fixture_aux_gateway(const FixtureLayout& layout) {
  return std::make_shared<ModelGateway>(fake_profile("fixture-aux"), load_fake_backend(layout.backend()));
}

RunEnvironment make_fixture_environment(FixtureStack& stack, const FixtureLayout& layout,
                                        const std::string& prompt_dir, std::map<std::string, AgentScript> scripts,
                                        ObservationMode mode, std::shared_ptr<SomProvider> som) {
  RunEnvironment env;
  env.open_session = [&stack](const SessionOptions& o) { return stack.open_session(o); };
  SiteUrls sites = stack.site_urls();
  env.agent_model = [scripts = std::move(scripts), sites, mode](const TaskSpec& task) {
    std::vector<ScriptStep> steps;
    if (auto it = scripts.find(task.task_id); it != scripts.end()) steps = it->second.steps_for(mode);
    return std::make_shared<ModelGateway>(fake_profile("scripted-agent"),
                                          std::make_shared<ScriptedAgentTransport>(std::move(steps), sites));
  };
  auto aux = fixture_aux_gateway(layout);
  env.captioner = aux;
  env.vqa = aux;
  env.judge = aux;
  env.som = som ? std::move(som) : fixture_som_provider(layout);
  register_fixture_resolvers(env.resolvers);
  env.prompts = PromptAssets::load(prompt_dir);
  env.reset = [&stack] { stack.reset(); };
  return env;
}

std::vector<GoldenPage> load_golden_pages(const FixtureLayout& layout) {
  auto j = nlohmann::json::parse(read_file(layout.golden() + "/pages.json"));
  std::vector<GoldenPage> out;
  for (const auto& p : j) out.push_back({p.at("name"), p.at("url")});
  return out;
}

PageTexts render_page_texts(BrowserSession& session, SomProvider& som, const std::string& url) {
  session.goto_url(url);
  PageTexts t;
  t.acc_tree = flatten_accessibility_tree(session.capture_snapshot().accessibility_root);
  t.som = render_som_text(som.annotate(session));
  return t;
}

RunConfig fixture_run_config(const FixtureStack& stack, const FixtureLayout& layout, ObservationMode mode,
                             const std::string& output_dir) {
  RunConfig c;
  c.task_file = layout.tasks();
  c.sites = stack.site_urls();
  c.agent.mode = mode;
  c.output_dir = output_dir;
  c.session = fixture_session_options();
  return c;
}

}  // namespace webagent::fixtures
