#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace webagent {

namespace action {

struct Click {
  std::int64_t element = 0;
  friend bool operator==(const Click&, const Click&) = default;
};
struct Hover {
  std::int64_t element = 0;
  friend bool operator==(const Hover&, const Hover&) = default;
};
struct Type {
  std::int64_t element = 0;
  std::string text;
  bool press_enter = true;
  friend bool operator==(const Type&, const Type&) = default;
};
struct Press {
  std::string key_comb;
  friend bool operator==(const Press&, const Press&) = default;
};
enum class Direction { up, down };
struct Scroll {
  Direction direction = Direction::down;
  friend bool operator==(const Scroll&, const Scroll&) = default;
};
struct NewTab {
  friend bool operator==(const NewTab&, const NewTab&) = default;
};
struct TabFocus {
  std::int64_t index = 0;
  friend bool operator==(const TabFocus&, const TabFocus&) = default;
};
struct TabClose {
  friend bool operator==(const TabClose&, const TabClose&) = default;
};
struct Goto {
  std::string url;
  friend bool operator==(const Goto&, const Goto&) = default;
};
struct GoBack {
  friend bool operator==(const GoBack&, const GoBack&) = default;
};
struct GoForward {
  friend bool operator==(const GoForward&, const GoForward&) = default;
};
struct Stop {
  std::string answer;
  friend bool operator==(const Stop&, const Stop&) = default;
};

}  // namespace action

/// One element of the agent's action set.
using ParsedAction =
    std::variant<action::Click, action::Hover, action::Type, action::Press, action::Scroll,
                 action::NewTab, action::TabFocus, action::TabClose, action::Goto, action::GoBack,
                 action::GoForward, action::Stop>;

inline constexpr std::string_view kActionPhrase = "In summary, the next action I will perform is";

/// Verb used in the action grammar ("click", "tab_close", ...).
std::string_view action_verb(const ParsedAction& a);

/// Body form, e.g. `type [5] [guitar] [1]`.
std::string render_action(const ParsedAction& a);

/// Full model-output form: the summary phrase followed by the fenced body.
std::string render_action_output(const ParsedAction& a);

class ActionParseError : public std::runtime_error {
 public:
  ActionParseError(const std::string& reason, std::string raw)
      : std::runtime_error(reason), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

/// Extracts the action after the last summary phrase and parses its fenced
/// body. Throws ActionParseError carrying the raw text on any failure.
ParsedAction parse_action(std::string_view raw);

/// Parses a bare action body such as `click [11]`.
ParsedAction parse_action_body(std::string_view body);

bool element_bearing(const ParsedAction& a);
std::int64_t element_of(const ParsedAction& a);

}  // namespace webagent
