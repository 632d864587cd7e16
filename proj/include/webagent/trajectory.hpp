#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "webagent/action.hpp"

namespace webagent {

enum class Termination { stopped, max_steps, error };
std::string_view to_string(Termination t);

struct TrajectoryStep {
  int index = 0;
  std::string observation_digest;
  std::string url;
  std::string raw_output;
  std::optional<ParsedAction> action;  // nullopt on parse failure
  std::string parse_error;
  std::string execution;  // "ok", "stop", or "<error kind>: <message>"
  double wall_ms = 0;
};

/// Ordered record of one episode.
struct Trajectory {
  std::string task_id;
  std::vector<TrajectoryStep> steps;
  std::string final_answer;
  std::string final_url;
  Termination termination = Termination::error;
  std::string error;
};

/// One JSON object per line: a header line, one line per step, a footer line.
/// Wall-clock fields are excluded so identical episodes serialize identically.
std::string trajectory_to_jsonl(const Trajectory& t);

}  // namespace webagent
