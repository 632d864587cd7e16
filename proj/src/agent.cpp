#include "webagent/agent.hpp"

#include <chrono>
#include <filesystem>

#include "webagent/text_util.hpp"

namespace webagent {

using nlohmann::json;

namespace {

std::vector<PromptExample> load_examples(const json& arr, const std::filesystem::path& dir) {
  std::vector<PromptExample> out;
  for (const auto& e : arr) {
    PromptExample ex;
    auto site = site_from_string(e.value("site", std::string()));
    if (!site) throw std::runtime_error("examples.json: unknown site '" + e.value("site", std::string()) + "'");
    ex.site = *site;
    ex.observation = e.value("observation", std::string());
    ex.url = e.value("url", std::string());
    ex.objective = e.value("objective", std::string());
    ex.previous_action = e.value("previous_action", std::string("None"));
    ex.response = e.value("response", std::string());
    if (e.contains("screenshot")) {
      ex.screenshot = std::make_shared<const Raster>(load_png((dir / e["screenshot"].get<std::string>()).string()));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::string user_turn_text(bool with_screenshot, std::size_t n_input_images, const std::string& observation,
                           const std::string& url, const std::string& objective, const std::string& previous_action,
                           const std::vector<std::string>& input_captions) {
  std::string t;
  if (with_screenshot || n_input_images > 0) {
    t += "IMAGES:";
    int n = 1;
    if (with_screenshot) t += " (" + std::to_string(n++) + ") current page screenshot";
    for (std::size_t i = 0; i < n_input_images; ++i) {
      t += std::string(n > 1 ? "," : "") + " (" + std::to_string(n) + ") input image " + std::to_string(i + 1);
      ++n;
    }
    t += "\n";
  }
  t += "OBSERVATION:\n" + observation + "\n";
  t += "URL: " + url + "\n";
  for (std::size_t i = 0; i < input_captions.size(); ++i) {
    t += "INPUT IMAGE " + std::to_string(i + 1) + ": " + input_captions[i] + "\n";
  }
  t += "OBJECTIVE: " + objective + "\n";
  t += "PREVIOUS ACTION: " + (previous_action.empty() ? std::string("None") : previous_action);
  return t;
}

std::vector<const PromptExample*> pick_examples(const std::vector<PromptExample>& pool, int k, Site site) {
  if (k < 0 || static_cast<std::size_t>(k) > pool.size()) {
    throw std::invalid_argument("k_examples = " + std::to_string(k) + " but " + std::to_string(pool.size()) +
                                " examples are available");
  }
  std::vector<const PromptExample*> out;
  if (k == 0) return out;
  // The task's own site comes first, the rest keep file order.
  for (const auto& e : pool) {
    if (e.site == site && static_cast<int>(out.size()) < k) out.push_back(&e);
  }
  for (const auto& e : pool) {
    if (static_cast<int>(out.size()) >= k) break;
    if (std::find(out.begin(), out.end(), &e) == out.end()) out.push_back(&e);
  }
  return out;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

PromptAssets PromptAssets::load(const std::string& dir) {
  std::filesystem::path d(dir);
  PromptAssets a;
  a.system_text = read_file((d / "system.txt").string());
  a.system_text_som = read_file((d / "system_som.txt").string());
  json ex = json::parse(read_file((d / "examples.json").string()));
  a.tree_examples = load_examples(ex.value("tree", json::array()), d);
  a.som_examples = load_examples(ex.value("som", json::array()), d);
  return a;
}

std::string render_observation_block(const Observation& obs) {
  std::string header;
  for (const auto& t : obs.tabs) {
    if (!header.empty()) header += " | ";
    header += "Tab " + std::to_string(t.index) + (t.focused ? " (current)" : "") + ": " + t.title;
  }
  return header + "\n\n" + obs.text_payload;
}

std::vector<ChatMessage> build_prompt(const AgentConfig& config, const PromptAssets& assets, const TaskSpec& task,
                                      const Observation& obs, const std::string& previous_action,
                                      const TaskInputs& inputs) {
  const bool som = uses_som(config.mode);
  const bool images = uses_screenshot(config.mode);
  std::vector<ChatMessage> msgs;
  msgs.push_back(ChatMessage::text(Role::system, som ? assets.system_text_som : assets.system_text));

  for (const PromptExample* ex :
       pick_examples(som ? assets.som_examples : assets.tree_examples, config.k_examples, task.site)) {
    bool shot = images && ex->screenshot != nullptr;
    ChatMessage user{Role::user,
                     {ContentPart::text(user_turn_text(shot, 0, ex->observation, ex->url, ex->objective,
                                                       ex->previous_action, {}))}};
    if (shot) user.parts.push_back(ContentPart::image(ex->screenshot));
    msgs.push_back(std::move(user));
    msgs.push_back(ChatMessage::text(Role::assistant, ex->response));
  }

  std::vector<std::string> captions;
  if (config.mode == ObservationMode::acc_tree_caps) captions = inputs.captions;
  std::size_t n_inputs = images ? inputs.images.size() : 0;
  bool shot = images && obs.screenshot != nullptr;
  ChatMessage user{Role::user,
                   {ContentPart::text(user_turn_text(shot, n_inputs, render_observation_block(obs), obs.url,
                                                     task.intent, previous_action, captions))}};
  if (shot) user.parts.push_back(ContentPart::image(obs.screenshot));
  for (std::size_t i = 0; i < n_inputs; ++i) user.parts.push_back(ContentPart::image(inputs.images[i]));
  msgs.push_back(std::move(user));
  return msgs;
}

std::string corrective_message() {
  return "The previous reply could not be parsed. End the reply with the sentence \"" +
         std::string(kActionPhrase) + "\" followed by exactly one action in a ``` fenced block, e.g. ```click [3]```.";
}

Trajectory run_episode(const TaskSpec& task, BrowserSession& session, ModelGateway& model, const AgentConfig& config,
                       const PromptAssets& assets, const ObservationSettings& observation, const TaskInputs& inputs,
                       const EpisodeHooks& hooks) {
  if (config.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  Trajectory traj;
  traj.task_id = task.task_id;
  traj.termination = Termination::max_steps;
  std::string previous_action = "None";
  const std::size_t context_chars = model.profile().context_budget.max_chars();

  auto finish = [&](Termination t, std::string error = {}) {
    traj.termination = t;
    traj.error = std::move(error);
  };

  for (int i = 0; i < config.max_steps; ++i) {
    auto started = std::chrono::steady_clock::now();
    TrajectoryStep step;
    step.index = i;

    Observation obs;
    try {
      obs = build_observation(session, observation);
    } catch (const BrowserError& e) {
      finish(Termination::error, "observation: " + std::string(e.what()));
      break;
    }
    step.url = obs.url;
    step.observation_digest = obs.digest();
    if (hooks.on_observation) hooks.on_observation(i, obs);

    std::vector<ChatMessage> messages = build_prompt(config, assets, task, obs, previous_action, inputs);
    std::size_t size = text_size(messages);
    if (size > context_chars) {
      std::size_t excess = size - context_chars;
      std::size_t payload = obs.text_payload.size();
      obs.text_payload =
          truncate_to_budget(obs.text_payload, TextBudget::chars(payload > excess ? payload - excess : 1));
      messages = build_prompt(config, assets, task, obs, previous_action, inputs);
      if (text_size(messages) > context_chars) {
        traj.steps.push_back(step);
        finish(Termination::error, "prompt exceeds the backend context budget");
        break;
      }
    }

    std::optional<ParsedAction> action;
    std::string error;
    try {
      for (int attempt = 0;; ++attempt) {
        std::string raw = model.complete(messages, config.sampling);
        step.raw_output += (attempt ? "\n" : "") + raw;
        try {
          action = parse_action(raw);
          step.parse_error.clear();
          break;
        } catch (const ActionParseError& e) {
          step.parse_error = e.what();
          if (attempt >= config.retry_on_parse_failure) break;
          messages.push_back(ChatMessage::text(Role::assistant, raw));
          messages.push_back(ChatMessage::text(Role::user, corrective_message()));
        }
      }
    } catch (const std::exception& e) {
      error = std::string("model: ") + e.what();
    }
    if (!error.empty() || !action) {
      step.wall_ms = elapsed_ms(started);
      step.execution = error.empty() ? "parse_failure" : error;
      traj.steps.push_back(step);
      finish(Termination::error, error.empty() ? "unparseable model output: " + step.parse_error : error);
      break;
    }

    step.action = action;
    bool lost = false;
    try {
      TransitionResult r = execute_action(session, *action, obs.resolver());
      if (r.terminal) {
        step.execution = "stop";
        traj.final_answer = r.answer;
      } else {
        step.execution = "ok";
      }
    } catch (const BrowserError& e) {
      step.execution = std::string(to_string(e.kind())) + ": " + e.what();
      lost = e.kind() == BrowserError::Kind::session_lost;
    }
    step.wall_ms = elapsed_ms(started);
    traj.steps.push_back(step);
    previous_action = render_action(*action);
    if (lost) {
      finish(Termination::error, step.execution);
      break;
    }
    if (std::holds_alternative<action::Stop>(*action)) {
      finish(Termination::stopped);
      break;
    }
  }

  try {
    traj.final_url = session.current_url();
  } catch (const BrowserError&) {
    if (!traj.steps.empty()) traj.final_url = traj.steps.back().url;
  }
  return traj;
}

}  // namespace webagent
