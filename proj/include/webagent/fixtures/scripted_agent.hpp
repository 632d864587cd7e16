#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "webagent/evaluation.hpp"
#include "webagent/model_gateway.hpp"
#include "webagent/observation.hpp"
#include "webagent/site_urls.hpp"

namespace webagent::fixtures {

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One scripted reply: an action wrapped in the usual reasoning text, or a
/// raw reply sent as is.
struct ScriptStep {
  std::string action;
  std::string raw;
};

struct AgentScript {
  std::vector<ScriptStep> steps;
  std::map<ObservationMode, std::vector<ScriptStep>> per_mode;

  const std::vector<ScriptStep>& steps_for(ObservationMode mode) const;
};

/// `{"agents": {"<task_id>": {"steps": [...], "modes": {"som": [...]}}}}`
std::map<std::string, AgentScript> parse_agent_scripts(const nlohmann::json& j);
std::map<std::string, AgentScript> load_agent_scripts(const std::string& path);

/// Fills the placeholders of a scripted action from the observation payload.
///   {{id:text}}      id of the first element whose entry contains `text`
///   {{id:=text}}     id of the first element whose name is exactly `text`
///   {{id:text@a,b}}  either form, restricted to roles / tags a or b
///   {{site:name}}    base URL of a site
/// Throws ScriptError when a placeholder cannot be filled.
std::string fill_script_template(const std::string& action, const std::string& observation_payload,
                                 const SiteUrls& sites);

/// Pulls the observation payload (without the tab header) out of a user turn.
std::string payload_of_user_turn(const std::string& user_text);

/// Agent backend that replays a script, one step per chat request.
class ScriptedAgentTransport : public Transport {
 public:
  ScriptedAgentTransport(std::vector<ScriptStep> steps, SiteUrls sites);
  std::string send(const ModelRequest& request) override;
  int steps_used() const;

 private:
  std::vector<ScriptStep> steps_;
  SiteUrls sites_;
  mutable std::mutex mu_;
  std::size_t next_ = 0;
};

/// Builds a FakeBackend from a JSON table:
/// `{"include": [...], "defaults": {...}, "captions": [{"image", "caption"}],
///   "vqa": [{"image", "question", "answer"}], "judge": [{"reference",
///   "prediction", "verdict"}], "completions": [{"digest", "text"}]}`.
/// Image paths are relative to the file; included files are merged first.
std::shared_ptr<FakeBackend> load_fake_backend(const std::string& path);

/// URL resolvers the fixture tasks refer to.
void register_fixture_resolvers(ResolverRegistry& registry);

}  // namespace webagent::fixtures
