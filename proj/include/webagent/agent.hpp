#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "webagent/browser.hpp"
#include "webagent/model_gateway.hpp"
#include "webagent/observation.hpp"
#include "webagent/task_model.hpp"
#include "webagent/trajectory.hpp"

namespace webagent {

struct PromptExample {
  Site site = Site::classifieds;
  std::string observation;  // tab header and payload
  std::string url;
  std::string objective;
  std::string previous_action = "None";
  std::string response;
  std::shared_ptr<const Raster> screenshot;  // SoM examples only
};

struct PromptAssets {
  std::string system_text;      // tree-based modes
  std::string system_text_som;  // SoM mode
  std::vector<PromptExample> tree_examples;
  std::vector<PromptExample> som_examples;

  /// Reads system.txt, system_som.txt and examples.json from `dir`.
  static PromptAssets load(const std::string& dir);
};

struct AgentConfig {
  ObservationMode mode = ObservationMode::acc_tree;
  int k_examples = 3;
  int max_steps = 30;
  SamplingConfig sampling = SamplingConfig::general();
  int retry_on_parse_failure = 1;
};

/// Task input images in their prompt forms.
struct TaskInputs {
  std::vector<std::shared_ptr<const Raster>> images;
  std::vector<std::string> captions;  // parallel to images; caption modes only
};

/// Tab header line followed by the text payload.
std::string render_observation_block(const Observation& obs);

/// System message, k example rounds, then the current user turn.
std::vector<ChatMessage> build_prompt(const AgentConfig& config, const PromptAssets& assets,
                                      const TaskSpec& task, const Observation& obs,
                                      const std::string& previous_action, const TaskInputs& inputs);

/// User message appended after an unparseable reply.
std::string corrective_message();

struct EpisodeHooks {
  /// Called once per step with the observation the model saw.
  std::function<void(int step, const Observation& obs)> on_observation;
};

/// Runs one episode from the session's current page. The session is left on
/// the final page for evaluation.
Trajectory run_episode(const TaskSpec& task, BrowserSession& session, ModelGateway& model,
                       const AgentConfig& config, const PromptAssets& assets,
                       const ObservationSettings& observation, const TaskInputs& inputs,
                       const EpisodeHooks& hooks = {});

}  // namespace webagent
