#include "webagent/action.hpp"

#include <cctype>
#include <charconv>

#include "webagent/text_util.hpp"

namespace webagent {

using namespace action;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view skip_ws(std::string_view s) {
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  return s;
}

std::string_view rstrip(std::string_view s) {
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const std::string& reason, std::string_view body) {
  throw ActionParseError(reason, std::string(body));
}

// Reads one bracketed argument with depth matching, returning its inner text
// and advancing `s` past the closing bracket.
std::string_view take_bracket(std::string_view& s, std::string_view body) {
  s = skip_ws(s);
  if (s.empty() || s.front() != '[') fail("expected '['", body);
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']' && --depth == 0) {
      auto inner = s.substr(1, i - 1);
      s.remove_prefix(i + 1);
      return inner;
    }
  }
  fail("unbalanced brackets", body);
}

std::int64_t parse_index(std::string_view text, std::string_view body) {
  auto t = trim(text);
  std::int64_t v = -1;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || v < 0)
    fail("expected a nonnegative integer, got '" + t + "'", body);
  return v;
}

void expect_end(std::string_view rest, std::string_view body) {
  if (!skip_ws(rest).empty()) fail("unexpected trailing text", body);
}

// Content between the first '[' and the last ']' of `rest`; empty when `rest`
// holds no brackets at all.
std::string greedy_bracket(std::string_view rest, std::string_view body, bool allow_missing) {
  rest = rstrip(skip_ws(rest));
  if (rest.empty()) {
    if (allow_missing) return {};
    fail("missing argument", body);
  }
  if (rest.front() != '[' || rest.back() != ']') fail("argument must be bracketed", body);
  return std::string(rest.substr(1, rest.size() - 2));
}

}  // namespace

std::string_view action_verb(const ParsedAction& a) {
  static constexpr std::string_view kVerbs[] = {"click",  "hover",     "type",    "press",
                                                "scroll", "new_tab",   "tab_focus", "tab_close",
                                                "goto",   "go_back",   "go_forward", "stop"};
  return kVerbs[a.index()];
}

std::string render_action(const ParsedAction& a) {
  return std::visit(
      overloaded{
          [](const Click& c) { return "click [" + std::to_string(c.element) + "]"; },
          [](const Hover& h) { return "hover [" + std::to_string(h.element) + "]"; },
          [](const Type& t) {
            return "type [" + std::to_string(t.element) + "] [" + t.text + "] [" +
                   (t.press_enter ? "1" : "0") + "]";
          },
          [](const Press& p) { return "press [" + p.key_comb + "]"; },
          [](const Scroll& s) {
            return std::string("scroll [") + (s.direction == Direction::up ? "up" : "down") + "]";
          },
          [](const NewTab&) { return std::string("new_tab"); },
          [](const TabFocus& t) { return "tab_focus [" + std::to_string(t.index) + "]"; },
          [](const TabClose&) { return std::string("tab_close"); },
          [](const Goto& g) { return "goto [" + g.url + "]"; },
          [](const GoBack&) { return std::string("go_back"); },
          [](const GoForward&) { return std::string("go_forward"); },
          [](const Stop& s) { return "stop [" + s.answer + "]"; },
      },
      a);
}

std::string render_action_output(const ParsedAction& a) {
  return std::string(kActionPhrase) + " ```" + render_action(a) + "```";
}

ParsedAction parse_action_body(std::string_view body) {
  auto s = skip_ws(body);
  std::size_t n = 0;
  while (n < s.size() && (std::isalpha(static_cast<unsigned char>(s[n])) || s[n] == '_')) ++n;
  if (n == 0) fail("missing action verb", body);
  auto verb = to_lower(s.substr(0, n));
  auto rest = s.substr(n);

  if (verb == "click" || verb == "hover" || verb == "tab_focus") {
    auto id = parse_index(take_bracket(rest, body), body);
    expect_end(rest, body);
    if (verb == "click") return Click{id};
    if (verb == "hover") return Hover{id};
    return TabFocus{id};
  }
  if (verb == "type") {
    auto id = parse_index(take_bracket(rest, body), body);
    auto tail = rstrip(skip_ws(rest));
    if (tail.empty() || tail.front() != '[' || tail.back() != ']') fail("type needs [text]", body);
    bool press_enter = true;
    // A trailing "] [0]" / "] [1]" is the press-enter flag; everything between
    // the first '[' and that suffix is the text, brackets included.
    auto close_flag = tail.size() - 1;
    auto p = close_flag;
    while (p > 0 && is_ws(tail[p - 1])) --p;
    if (p > 0 && (tail[p - 1] == '0' || tail[p - 1] == '1')) {
      char flag = tail[p - 1];
      auto q = p - 1;
      while (q > 0 && is_ws(tail[q - 1])) --q;
      if (q > 0 && tail[q - 1] == '[') {
        auto r = q - 1;
        while (r > 0 && is_ws(tail[r - 1])) --r;
        if (r > 1 && tail[r - 1] == ']') {
          press_enter = flag == '1';
          return Type{id, std::string(tail.substr(1, r - 2)), press_enter};
        }
      }
    }
    return Type{id, std::string(tail.substr(1, tail.size() - 2)), press_enter};
  }
  if (verb == "press") {
    auto key = trim(greedy_bracket(rest, body, false));
    if (key.empty()) fail("press needs a key combination", body);
    return Press{key};
  }
  if (verb == "scroll") {
    auto dir = to_lower(trim(take_bracket(rest, body)));
    expect_end(rest, body);
    if (dir == "up") return Scroll{Direction::up};
    if (dir == "down") return Scroll{Direction::down};
    fail("scroll direction must be up or down", body);
  }
  if (verb == "new_tab") {
    expect_end(rest, body);
    return NewTab{};
  }
  if (verb == "tab_close" || verb == "close_tab") {
    expect_end(rest, body);
    return TabClose{};
  }
  if (verb == "go_back") {
    expect_end(rest, body);
    return GoBack{};
  }
  if (verb == "go_forward") {
    expect_end(rest, body);
    return GoForward{};
  }
  if (verb == "goto") {
    auto url = trim(greedy_bracket(rest, body, false));
    if (url.empty()) fail("goto needs a URL", body);
    return Goto{url};
  }
  if (verb == "stop") return Stop{greedy_bracket(rest, body, true)};
  fail("unknown action '" + verb + "'", body);
}

ParsedAction parse_action(std::string_view raw) {
  auto lowered = to_lower(raw);
  auto phrase = to_lower(kActionPhrase);
  auto at = lowered.rfind(phrase);
  if (at == std::string::npos) throw ActionParseError("missing action phrase", std::string(raw));
  auto open = raw.find("```", at + phrase.size());
  if (open == std::string_view::npos) throw ActionParseError("missing action fence", std::string(raw));
  auto close = raw.find("```", open + 3);
  if (close == std::string_view::npos)
    throw ActionParseError("unterminated action fence", std::string(raw));
  try {
    return parse_action_body(raw.substr(open + 3, close - open - 3));
  } catch (const ActionParseError& e) {
    throw ActionParseError(e.what(), std::string(raw));
  }
}

bool element_bearing(const ParsedAction& a) {
  return std::holds_alternative<Click>(a) || std::holds_alternative<Hover>(a) ||
         std::holds_alternative<Type>(a);
}

std::int64_t element_of(const ParsedAction& a) {
  if (auto* c = std::get_if<Click>(&a)) return c->element;
  if (auto* h = std::get_if<Hover>(&a)) return h->element;
  if (auto* t = std::get_if<Type>(&a)) return t->element;
  return -1;
}

}  // namespace webagent
