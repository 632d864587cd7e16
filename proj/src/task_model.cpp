#include "webagent/task_model.hpp"

#include <algorithm>

#include "webagent/text_util.hpp"

namespace webagent {

using nlohmann::json;

std::string_view to_string(Site s) {
  switch (s) {
    case Site::classifieds: return "classifieds";
    case Site::reddit: return "reddit";
    case Site::shopping: return "shopping";
    case Site::multi: return "multi";
  }
  return "";
}

std::string_view to_string(Level l) {
  switch (l) {
    case Level::easy: return "easy";
    case Level::medium: return "medium";
    case Level::hard: return "hard";
  }
  return "";
}

std::string_view to_string(SubsetTag t) {
  switch (t) {
    case SubsetTag::ocr_required: return "ocr_required";
    case SubsetTag::exact_image_match: return "exact_image_match";
    case SubsetTag::image_input: return "image_input";
  }
  return "";
}

std::optional<Site> site_from_string(std::string_view s) {
  for (auto v : {Site::classifieds, Site::reddit, Site::shopping, Site::multi})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<Level> level_from_string(std::string_view s) {
  for (auto v : {Level::easy, Level::medium, Level::hard})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<SubsetTag> subset_tag_from_string(std::string_view s) {
  for (auto v : {SubsetTag::ocr_required, SubsetTag::exact_image_match, SubsetTag::image_input})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

Level derive_overall_difficulty(Level action, Level visual) {
  // ceil((a + v) / 2) on the 1..3 scale.
  int sum = static_cast<int>(action) + static_cast<int>(visual);
  return static_cast<Level>((sum + 1) / 2);
}

std::string expand_template(const IntentTemplate& t) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    auto open = t.text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(t.text, pos, std::string::npos);
      break;
    }
    auto close = t.text.find("}}", open + 2);
    if (close == std::string::npos)
      throw TemplateError("", "unterminated slot at offset " + std::to_string(open));
    auto name = t.text.substr(open + 2, close - open - 2);
    auto it = t.bindings.find(name);
    if (it == t.bindings.end()) throw TemplateError(name, "no binding for slot '" + name + "'");
    out.append(t.text, pos, open - pos);
    out += it->second;
    pos = close + 2;
  }
  return out;
}

namespace {

int line_of_offset(std::string_view content, std::size_t offset) {
  offset = std::min(offset, content.size());
  return 1 + static_cast<int>(std::count(content.begin(), content.begin() + static_cast<long>(offset), '\n'));
}

[[noreturn]] void field_error(const std::string& task_id, const std::string& field,
                              const std::string& what) {
  throw TaskParseError("task '" + task_id + "': field '" + field + "' " + what, 0, field);
}

std::string get_string(const json& j, const std::string& task_id, const char* field,
                       bool required = true) {
  if (!j.contains(field)) {
    if (required) field_error(task_id, field, "is missing");
    return {};
  }
  if (!j[field].is_string()) field_error(task_id, field, "must be a string");
  return j[field].get<std::string>();
}

Level get_level(const json& j, const std::string& task_id, const char* field) {
  auto text = get_string(j, task_id, field);
  auto level = level_from_string(text);
  if (!level) field_error(task_id, field, "must be easy, medium or hard");
  return *level;
}

TaskSpec task_from_json(const json& j, std::size_t index) {
  if (!j.is_object())
    throw TaskParseError("task #" + std::to_string(index) + " is not an object", 0, "");
  TaskSpec t;
  if (!j.contains("task_id") || !j["task_id"].is_string())
    throw TaskParseError("task #" + std::to_string(index) + ": field 'task_id' must be a string", 0,
                         "task_id");
  t.task_id = j["task_id"].get<std::string>();
  auto site = site_from_string(get_string(j, t.task_id, "site"));
  if (!site) field_error(t.task_id, "site", "must be one of classifieds, reddit, shopping, multi");
  t.site = *site;
  t.start_url = get_string(j, t.task_id, "start_url");
  t.intent = get_string(j, t.task_id, "intent");
  t.intent_template = get_string(j, t.task_id, "intent_template", false);

  if (j.contains("input_images")) {
    if (!j["input_images"].is_array()) field_error(t.task_id, "input_images", "must be a list");
    for (const auto& img : j["input_images"]) {
      if (!img.is_string()) field_error(t.task_id, "input_images", "must contain strings");
      t.input_images.push_back(img.get<std::string>());
    }
  }

  if (!j.contains("evaluators") || !j["evaluators"].is_array())
    field_error(t.task_id, "evaluators", "must be a list");
  for (const auto& e : j["evaluators"]) {
    try {
      t.evaluators.push_back(evaluator_from_json(e));
    } catch (const EvaluatorFormatError& err) {
      field_error(t.task_id, "evaluators", std::string("is invalid: ") + err.what());
    }
  }

  if (!j.contains("difficulty") || !j["difficulty"].is_object())
    field_error(t.task_id, "difficulty", "must be an object");
  const auto& d = j["difficulty"];
  t.difficulty.action_difficulty = get_level(d, t.task_id, "action_difficulty");
  t.difficulty.visual_difficulty = get_level(d, t.task_id, "visual_difficulty");
  t.difficulty.overall = d.contains("overall")
                             ? get_level(d, t.task_id, "overall")
                             : derive_overall_difficulty(t.difficulty.action_difficulty,
                                                         t.difficulty.visual_difficulty);

  if (j.contains("achievable")) {
    if (!j["achievable"].is_boolean()) field_error(t.task_id, "achievable", "must be a boolean");
    t.achievable = j["achievable"].get<bool>();
  }
  if (j.contains("subset_tags")) {
    if (!j["subset_tags"].is_array()) field_error(t.task_id, "subset_tags", "must be a list");
    for (const auto& tag : j["subset_tags"]) {
      auto parsed = tag.is_string() ? subset_tag_from_string(tag.get<std::string>()) : std::nullopt;
      if (!parsed) field_error(t.task_id, "subset_tags", "contains an unknown tag");
      t.subset_tags.insert(*parsed);
    }
  }
  return t;
}

json task_to_json(const TaskSpec& t) {
  json j;
  j["task_id"] = t.task_id;
  j["site"] = std::string(to_string(t.site));
  j["start_url"] = t.start_url;
  j["intent"] = t.intent;
  if (!t.intent_template.empty()) j["intent_template"] = t.intent_template;
  j["input_images"] = t.input_images;
  json evals = json::array();
  for (const auto& e : t.evaluators) evals.push_back(evaluator_to_json(e));
  j["evaluators"] = evals;
  j["difficulty"] = {{"action_difficulty", std::string(to_string(t.difficulty.action_difficulty))},
                     {"visual_difficulty", std::string(to_string(t.difficulty.visual_difficulty))},
                     {"overall", std::string(to_string(t.difficulty.overall))}};
  j["achievable"] = t.achievable;
  json tags = json::array();
  for (auto tag : t.subset_tags) tags.push_back(std::string(to_string(tag)));
  j["subset_tags"] = tags;
  return j;
}

}  // namespace

void validate_task(const TaskSpec& t) {
  if (t.task_id.empty()) throw TaskValidationError(t.task_id, "task_id", "must be nonempty");
  if (t.start_url.empty()) throw TaskValidationError(t.task_id, "start_url", "must be nonempty");
  if (t.input_images.empty() == t.has_tag(SubsetTag::image_input))
    throw TaskValidationError(t.task_id, "input_images",
                              "must be nonempty exactly when subset_tags has image_input");
  if (t.evaluators.empty()) throw TaskValidationError(t.task_id, "evaluators", "must be nonempty");
  if (!t.achievable &&
      (t.evaluators.size() != 1 || !std::holds_alternative<FuzzyMatch>(t.evaluators[0].value)))
    throw TaskValidationError(t.task_id, "evaluators",
                              "an unachievable task needs exactly one fuzzy_match evaluator");
  auto expected = derive_overall_difficulty(t.difficulty.action_difficulty,
                                            t.difficulty.visual_difficulty);
  if (t.difficulty.overall != expected)
    throw TaskValidationError(t.task_id, "difficulty.overall",
                              "must be " + std::string(to_string(expected)));
}

std::vector<TaskSpec> parse_task_file(std::string_view content) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    throw TaskParseError(std::string("malformed task file: ") + e.what(),
                         line_of_offset(content, e.byte > 0 ? e.byte - 1 : 0), "");
  }
  if (!doc.is_array()) throw TaskParseError("task file must hold a top-level array", 1, "");
  std::vector<TaskSpec> tasks;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    auto t = task_from_json(doc[i], i);
    validate_task(t);
    if (!seen.insert(t.task_id).second)
      throw TaskValidationError(t.task_id, "task_id", "duplicate task id");
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::string serialize_task_file(const std::vector<TaskSpec>& tasks) {
  json arr = json::array();
  for (const auto& t : tasks) arr.push_back(task_to_json(t));
  return arr.dump(2) + "\n";
}

std::vector<TaskSpec> load_task_file(const std::string& path) { return parse_task_file(read_file(path)); }

}  // namespace webagent
