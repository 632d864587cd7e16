#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace webagent {

/// A reference string with " |OR| " separated alternatives.
struct StringRef {
  std::vector<std::string> alternatives;

  static StringRef parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const StringRef&, const StringRef&) = default;
};

inline constexpr std::string_view kOrToken = " |OR| ";

struct ExactMatch {
  std::string reference;
  friend bool operator==(const ExactMatch&, const ExactMatch&) = default;
};
struct MustInclude {
  std::vector<StringRef> references;
  friend bool operator==(const MustInclude&, const MustInclude&) = default;
};
struct MustExclude {
  std::vector<StringRef> references;
  friend bool operator==(const MustExclude&, const MustExclude&) = default;
};
/// `intent` empty means "use the task intent".
struct FuzzyMatch {
  std::string reference;
  std::string intent;
  friend bool operator==(const FuzzyMatch&, const FuzzyMatch&) = default;
};
struct EvalVqa {
  std::string question;
  std::string answer;
  friend bool operator==(const EvalVqa&, const EvalVqa&) = default;
};
/// `reference_image` is a path relative to the task file directory.
struct FuzzyImageMatch {
  std::string reference_image;
  double threshold = 1.0;
  friend bool operator==(const FuzzyImageMatch&, const FuzzyImageMatch&) = default;
};

struct LiteralUrl {
  std::string url;
  friend bool operator==(const LiteralUrl&, const LiteralUrl&) = default;
};
struct FuncUrl {
  std::string name;
  friend bool operator==(const FuncUrl&, const FuncUrl&) = default;
};
struct LastPageUrl {
  friend bool operator==(const LastPageUrl&, const LastPageUrl&) = default;
};
using UrlSpec = std::variant<LiteralUrl, FuncUrl, LastPageUrl>;

UrlSpec parse_url_spec(std::string_view text);
std::string url_spec_to_string(const UrlSpec& spec);

enum class Extract { text, image };

struct LocatorQuery {
  std::string selector;
  Extract extract = Extract::text;
  friend bool operator==(const LocatorQuery&, const LocatorQuery&) = default;
};

struct EvaluatorSpec;

struct PageState {
  UrlSpec url;
  LocatorQuery locator;
  std::vector<EvaluatorSpec> inner;
  friend bool operator==(const PageState&, const PageState&);
};

struct EvaluatorSpec {
  std::variant<ExactMatch, MustInclude, MustExclude, FuzzyMatch, EvalVqa, FuzzyImageMatch, PageState>
      value;
  friend bool operator==(const EvaluatorSpec&, const EvaluatorSpec&) = default;
};

/// Wire tag ("exact_match", "page_state", ...) of an evaluator.
std::string_view evaluator_type_name(const EvaluatorSpec& spec);
bool is_visual(const EvaluatorSpec& spec);
bool is_string_primitive(const EvaluatorSpec& spec);

class EvaluatorFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tagged-union JSON (de)serialization. Errors name the offending field.
EvaluatorSpec evaluator_from_json(const nlohmann::json& j);
nlohmann::json evaluator_to_json(const EvaluatorSpec& spec);

}  // namespace webagent
