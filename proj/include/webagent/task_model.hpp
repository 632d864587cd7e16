#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "webagent/evaluator_spec.hpp"

namespace webagent {

enum class Site { classifieds, reddit, shopping, multi };
enum class Level { easy = 1, medium = 2, hard = 3 };
enum class SubsetTag { ocr_required, exact_image_match, image_input };

std::string_view to_string(Site s);
std::string_view to_string(Level l);
std::string_view to_string(SubsetTag t);
std::optional<Site> site_from_string(std::string_view s);
std::optional<Level> level_from_string(std::string_view s);
std::optional<SubsetTag> subset_tag_from_string(std::string_view s);

struct DifficultyRating {
  Level action_difficulty = Level::easy;
  Level visual_difficulty = Level::easy;
  Level overall = Level::easy;
  friend bool operator==(const DifficultyRating&, const DifficultyRating&) = default;
};

/// Mean of the two component levels on the 1..3 scale, ties rounded up.
Level derive_overall_difficulty(Level action, Level visual);

struct TaskSpec {
  std::string task_id;
  Site site = Site::classifieds;
  std::string start_url;
  std::string intent;
  std::string intent_template;
  std::vector<std::string> input_images;  // relative to the task file directory
  std::vector<EvaluatorSpec> evaluators;
  DifficultyRating difficulty;
  bool achievable = true;
  std::set<SubsetTag> subset_tags;

  bool has_tag(SubsetTag t) const { return subset_tags.count(t) != 0; }
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct IntentTemplate {
  std::string text;
  std::map<std::string, std::string> bindings;
};

class TemplateError : public std::runtime_error {
 public:
  TemplateError(std::string slot, const std::string& message)
      : std::runtime_error(message), slot_(std::move(slot)) {}
  const std::string& slot() const { return slot_; }

 private:
  std::string slot_;
};

/// Replaces every `{{name}}` slot. Throws TemplateError naming the first slot
/// without a binding.
std::string expand_template(const IntentTemplate& t);

/// Malformed task file; carries the 1-based line of a JSON syntax error (0 when
/// the error is structural) and the offending field when known.
class TaskParseError : public std::runtime_error {
 public:
  TaskParseError(const std::string& message, int line, std::string field)
      : std::runtime_error(message), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// A well-formed task that breaks an invariant.
class TaskValidationError : public std::runtime_error {
 public:
  TaskValidationError(std::string task_id, std::string field, const std::string& message)
      : std::runtime_error("task '" + task_id + "', field '" + field + "': " + message),
        task_id_(std::move(task_id)),
        field_(std::move(field)) {}
  const std::string& task_id() const { return task_id_; }
  const std::string& field() const { return field_; }

 private:
  std::string task_id_;
  std::string field_;
};

std::vector<TaskSpec> parse_task_file(std::string_view content);
std::string serialize_task_file(const std::vector<TaskSpec>& tasks);
void validate_task(const TaskSpec& task);

/// Reads and parses a task file from disk; image paths stay relative.
std::vector<TaskSpec> load_task_file(const std::string& path);

}  // namespace webagent
