#include "webagent/trajectory.hpp"

namespace webagent {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::stopped: return "stopped";
    case Termination::max_steps: return "max_steps";
    case Termination::error: return "error";
  }
  return "error";
}

std::string trajectory_to_jsonl(const Trajectory& t) {
  using nlohmann::json;
  std::string out = json{{"kind", "episode"}, {"task_id", t.task_id}}.dump() + "\n";
  for (const auto& s : t.steps) {
    json j = {{"kind", "step"},
              {"index", s.index},
              {"url", s.url},
              {"observation_digest", s.observation_digest},
              {"raw_output", s.raw_output},
              {"action", s.action ? json(render_action(*s.action)) : json()},
              {"execution", s.execution}};
    if (!s.parse_error.empty()) j["parse_error"] = s.parse_error;
    out += j.dump() + "\n";
  }
  json end = {{"kind", "end"},
              {"termination", to_string(t.termination)},
              {"final_answer", t.final_answer},
              {"final_url", t.final_url},
              {"steps", t.steps.size()}};
  if (!t.error.empty()) end["error"] = t.error;
  out += end.dump() + "\n";
  return out;
}

}  // namespace webagent
