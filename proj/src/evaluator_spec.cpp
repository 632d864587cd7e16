#include "webagent/evaluator_spec.hpp"

#include "webagent/text_util.hpp"

namespace webagent {

using nlohmann::json;

bool operator==(const PageState& a, const PageState& b) {
  return a.url == b.url && a.locator == b.locator && a.inner == b.inner;
}

StringRef StringRef::parse(std::string_view text) {
  StringRef ref;
  ref.alternatives = split(text, kOrToken);
  return ref;
}

std::string StringRef::to_string() const { return join(alternatives, kOrToken); }

UrlSpec parse_url_spec(std::string_view text) {
  if (text == "last_page") return LastPageUrl{};
  if (text.rfind("func:", 0) == 0) return FuncUrl{std::string(text.substr(5))};
  return LiteralUrl{std::string(text)};
}

std::string url_spec_to_string(const UrlSpec& spec) {
  if (auto* lit = std::get_if<LiteralUrl>(&spec)) return lit->url;
  if (auto* fn = std::get_if<FuncUrl>(&spec)) return "func:" + fn->name;
  return "last_page";
}

std::string_view evaluator_type_name(const EvaluatorSpec& spec) {
  static constexpr std::string_view kNames[] = {"exact_match", "must_include", "must_exclude",
                                                "fuzzy_match", "eval_vqa", "eval_fuzzy_image_match",
                                                "page_state"};
  return kNames[spec.value.index()];
}

bool is_visual(const EvaluatorSpec& spec) {
  return std::holds_alternative<EvalVqa>(spec.value) ||
         std::holds_alternative<FuzzyImageMatch>(spec.value);
}

bool is_string_primitive(const EvaluatorSpec& spec) {
  return spec.value.index() <= 3;
}

namespace {

std::string require_string(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string())
    throw EvaluatorFormatError(std::string("evaluator field '") + field + "' must be a string");
  return j[field].get<std::string>();
}

StringRef make_ref(const std::string& text, const char* field) {
  auto ref = StringRef::parse(text);
  for (const auto& alt : ref.alternatives)
    if (alt.empty())
      throw EvaluatorFormatError(std::string("evaluator field '") + field +
                                 "' has an empty alternative");
  return ref;
}

std::vector<StringRef> require_refs(const json& j, const char* field) {
  if (!j.contains(field)) throw EvaluatorFormatError(std::string("missing field '") + field + "'");
  const auto& arr = j[field];
  std::vector<StringRef> refs;
  if (arr.is_string()) {
    refs.push_back(make_ref(arr.get<std::string>(), field));
  } else if (arr.is_array()) {
    for (const auto& item : arr) {
      if (!item.is_string())
        throw EvaluatorFormatError(std::string("evaluator field '") + field +
                                   "' must contain strings");
      refs.push_back(make_ref(item.get<std::string>(), field));
    }
  } else {
    throw EvaluatorFormatError(std::string("evaluator field '") + field +
                               "' must be a string or list of strings");
  }
  if (refs.empty())
    throw EvaluatorFormatError(std::string("evaluator field '") + field + "' is empty");
  return refs;
}

json refs_to_json(const std::vector<StringRef>& refs) {
  json arr = json::array();
  for (const auto& r : refs) arr.push_back(r.to_string());
  return arr;
}

}  // namespace

EvaluatorSpec evaluator_from_json(const json& j) {
  if (!j.is_object()) throw EvaluatorFormatError("evaluator must be an object");
  auto type = require_string(j, "type");
  if (type == "exact_match") return {ExactMatch{require_string(j, "reference")}};
  if (type == "must_include") return {MustInclude{require_refs(j, "references")}};
  if (type == "must_exclude") return {MustExclude{require_refs(j, "references")}};
  if (type == "fuzzy_match") {
    FuzzyMatch f{require_string(j, "reference"), ""};
    if (j.contains("intent")) f.intent = require_string(j, "intent");
    return {f};
  }
  if (type == "eval_vqa") return {EvalVqa{require_string(j, "question"), require_string(j, "answer")}};
  if (type == "eval_fuzzy_image_match") {
    FuzzyImageMatch f{require_string(j, "reference_image"), 1.0};
    if (!j.contains("threshold") || !j["threshold"].is_number())
      throw EvaluatorFormatError("evaluator field 'threshold' must be a number");
    f.threshold = j["threshold"].get<double>();
    if (!(f.threshold >= 0.0 && f.threshold <= 1.0))
      throw EvaluatorFormatError("evaluator field 'threshold' must lie in [0, 1]");
    return {f};
  }
  if (type == "page_state") {
    PageState ps;
    ps.url = parse_url_spec(require_string(j, "url"));
    if (!j.contains("locator") || !j["locator"].is_object())
      throw EvaluatorFormatError("evaluator field 'locator' must be an object");
    ps.locator.selector = require_string(j["locator"], "selector");
    if (ps.locator.selector.empty()) throw EvaluatorFormatError("evaluator field 'selector' is empty");
    auto extract = j["locator"].value("extract", std::string("text"));
    if (extract == "text")
      ps.locator.extract = Extract::text;
    else if (extract == "image")
      ps.locator.extract = Extract::image;
    else
      throw EvaluatorFormatError("evaluator field 'extract' must be 'text' or 'image'");
    if (!j.contains("evaluators") || !j["evaluators"].is_array() || j["evaluators"].empty())
      throw EvaluatorFormatError("evaluator field 'evaluators' must be a nonempty list");
    for (const auto& inner : j["evaluators"]) {
      auto spec = evaluator_from_json(inner);
      if (std::holds_alternative<PageState>(spec.value))
        throw EvaluatorFormatError("page_state evaluators cannot be nested");
      if (ps.locator.extract == Extract::text && is_visual(spec))
        throw EvaluatorFormatError("visual evaluator inside a text locator");
      if (ps.locator.extract == Extract::image && !is_visual(spec))
        throw EvaluatorFormatError("string evaluator inside an image locator");
      ps.inner.push_back(std::move(spec));
    }
    return {std::move(ps)};
  }
  throw EvaluatorFormatError("unknown evaluator type '" + type + "'");
}

json evaluator_to_json(const EvaluatorSpec& spec) {
  json j;
  j["type"] = std::string(evaluator_type_name(spec));
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, ExactMatch>) {
          j["reference"] = e.reference;
        } else if constexpr (std::is_same_v<T, MustInclude> || std::is_same_v<T, MustExclude>) {
          j["references"] = refs_to_json(e.references);
        } else if constexpr (std::is_same_v<T, FuzzyMatch>) {
          j["reference"] = e.reference;
          if (!e.intent.empty()) j["intent"] = e.intent;
        } else if constexpr (std::is_same_v<T, EvalVqa>) {
          j["question"] = e.question;
          j["answer"] = e.answer;
        } else if constexpr (std::is_same_v<T, FuzzyImageMatch>) {
          j["reference_image"] = e.reference_image;
          j["threshold"] = e.threshold;
        } else {
          j["url"] = url_spec_to_string(e.url);
          j["locator"] = {{"selector", e.locator.selector},
                          {"extract", e.locator.extract == Extract::text ? "text" : "image"}};
          json inner = json::array();
          for (const auto& s : e.inner) inner.push_back(evaluator_to_json(s));
          j["evaluators"] = inner;
        }
      },
      spec.value);
  return j;
}

}  // namespace webagent
