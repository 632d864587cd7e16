#pragma once

#include <map>
#include <memory>
#include <string>

#include "webagent/fixtures/scripted_agent.hpp"
#include "webagent/fixtures/stack.hpp"
#include "webagent/runner.hpp"

namespace webagent::fixtures {

/// Layout of a fixture directory.
struct FixtureLayout {
  std::string root;

  std::string sites() const { return root + "/sites"; }
  std::string tasks() const { return root + "/tasks/tasks.json"; }
  std::string agents(const std::string& name) const { return root + "/agents/" + name + ".json"; }
  std::string backend() const { return root + "/backend/backend.json"; }
  std::string som() const { return root + "/som"; }
  std::string golden() const { return root + "/golden"; }
};

/// Precomputed manifests, falling back to the fixture browser's own
/// annotation for pages that have none.
std::shared_ptr<PrecomputedSomProvider> fixture_som_provider(const FixtureLayout& layout);

/// Gateway over the fixture backend tables (captions, VQA, judge).
std::shared_ptr<ModelGateway> fixture_aux_gateway(const FixtureLayout& layout);

/// Everything a run over the fixture stack needs. The agent replays
/// `scripts`, one fresh transport per task; tasks without a script end at
/// their first step.
RunEnvironment make_fixture_environment(FixtureStack& stack, const FixtureLayout& layout,
                                        const std::string& prompt_dir, std::map<std::string, AgentScript> scripts,
                                        ObservationMode mode, std::shared_ptr<SomProvider> som);

/// A fixture page with golden observation texts.
struct GoldenPage {
  std::string name;
  std::string url;  // relative to the site server root
};

/// Reads `<golden>/pages.json`.
std::vector<GoldenPage> load_golden_pages(const FixtureLayout& layout);

struct PageTexts {
  std::string acc_tree;  // flattened tree, no captions, untruncated
  std::string som;       // SoM text of the first viewport
};

/// Loads `url` in `session` and renders both observation texts.
PageTexts render_page_texts(BrowserSession& session, SomProvider& som, const std::string& url);

RunConfig fixture_run_config(const FixtureStack& stack, const FixtureLayout& layout, ObservationMode mode,
                             const std::string& output_dir);

}  // namespace webagent::fixtures
