#include "webagent/browser.hpp"

#include <cctype>
#include <map>
#include <set>

#include "webagent/text_util.hpp"

namespace webagent {

std::optional<std::string> AxNode::property(std::string_view key) const {
  for (const auto& [k, v] : properties) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string_view to_string(BrowserError::Kind k) {
  switch (k) {
    case BrowserError::Kind::element_not_found: return "element_not_found";
    case BrowserError::Kind::timeout: return "timeout";
    case BrowserError::Kind::session_lost: return "session_lost";
    case BrowserError::Kind::script_error: return "script_error";
    case BrowserError::Kind::navigation: return "navigation";
    case BrowserError::Kind::invalid_argument: return "invalid_argument";
    case BrowserError::Kind::protocol: return "protocol";
  }
  return "unknown";
}

namespace {

ElementLocator resolve(const ElementResolver& resolver, std::int64_t id) {
  std::optional<ElementRef> ref = resolver ? resolver(id) : std::nullopt;
  if (!ref) {
    throw BrowserError(BrowserError::Kind::element_not_found,
                       "no element with id " + std::to_string(id) + " in the current observation");
  }
  return ref->locator;
}

const std::map<std::string, std::string>& named_keys() {
  static const std::map<std::string, std::string> keys = {
      {"enter", "Enter"},         {"return", "Enter"},       {"tab", "Tab"},
      {"escape", "Escape"},       {"esc", "Escape"},         {"backspace", "Backspace"},
      {"delete", "Delete"},       {"del", "Delete"},         {"space", " "},
      {"arrowup", "ArrowUp"},     {"up", "ArrowUp"},         {"arrowdown", "ArrowDown"},
      {"down", "ArrowDown"},      {"arrowleft", "ArrowLeft"}, {"left", "ArrowLeft"},
      {"arrowright", "ArrowRight"}, {"right", "ArrowRight"}, {"home", "Home"},
      {"end", "End"},             {"pageup", "PageUp"},      {"pagedown", "PageDown"},
  };
  return keys;
}

}  // namespace

std::string KeyCombination::to_string() const {
  std::string out;
  if (alt) out += "Alt+";
  if (control) out += "Control+";
  if (meta) out += "Meta+";
  if (shift) out += "Shift+";
  return out + key;
}

KeyCombination parse_key_combination(const std::string& text) {
  std::string t = trim(text);
  if (t.empty()) throw BrowserError(BrowserError::Kind::invalid_argument, "empty key combination");
  std::vector<std::string> parts;
  // A literal '+' key is written as "+" or as the tail of "Control++".
  if (t == "+") {
    parts = {"+"};
  } else if (t.ends_with("++")) {
    parts = split(t.substr(0, t.size() - 2), "+");
    parts.push_back("+");
  } else {
    parts = split(t, "+");
  }
  KeyCombination kc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    std::string m = to_lower(trim(parts[i]));
    if (m == "ctrl" || m == "control") kc.control = true;
    else if (m == "alt" || m == "option") kc.alt = true;
    else if (m == "meta" || m == "cmd" || m == "command") kc.meta = true;
    else if (m == "shift") kc.shift = true;
    else throw BrowserError(BrowserError::Kind::invalid_argument, "unknown modifier '" + parts[i] + "'");
  }
  std::string key = parts.back() == "+" ? "+" : trim(parts.back());
  std::string lower = to_lower(key);
  if (key.empty()) {
    throw BrowserError(BrowserError::Kind::invalid_argument, "empty key in '" + text + "'");
  }
  static const std::map<std::string, std::string> modifier_keys = {
      {"ctrl", "Control"}, {"control", "Control"}, {"alt", "Alt"}, {"option", "Alt"},
      {"meta", "Meta"},    {"cmd", "Meta"},        {"command", "Meta"}, {"shift", "Shift"}};
  if (auto it = named_keys().find(lower); it != named_keys().end()) {
    kc.key = it->second;
  } else if (auto mk = modifier_keys.find(lower); mk != modifier_keys.end()) {
    kc.key = mk->second;
  } else if (key.size() == 1) {
    kc.key = key;
  } else if (lower[0] == 'f' && lower.find_first_not_of("0123456789", 1) == std::string::npos) {
    kc.key = "F" + key.substr(1);
  } else {
    throw BrowserError(BrowserError::Kind::invalid_argument, "unknown key '" + key + "'");
  }
  return kc;
}

namespace {

std::string decode_entity(std::string_view name) {
  if (name == "amp") return "&";
  if (name == "lt") return "<";
  if (name == "gt") return ">";
  if (name == "quot") return "\"";
  if (name == "apos") return "'";
  if (name == "nbsp") return " ";
  if (name.size() > 1 && name[0] == '#') {
    long cp = name[1] == 'x' || name[1] == 'X' ? std::strtol(std::string(name.substr(2)).c_str(), nullptr, 16)
                                               : std::strtol(std::string(name.substr(1)).c_str(), nullptr, 10);
    std::string out;
    if (cp <= 0) return out;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return out;
  }
  return "&" + std::string(name) + ";";
}

}  // namespace

std::string html_to_text(std::string_view html) {
  static const std::set<std::string> block = {
      "address", "article", "aside", "blockquote", "br", "dd", "div", "dl", "dt", "fieldset",
      "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6", "header",
      "hr", "li", "main", "nav", "ol", "p", "pre", "section", "table", "tr", "ul"};
  std::string raw;
  std::size_t i = 0;
  while (i < html.size()) {
    char c = html[i];
    if (c == '<') {
      if (html.compare(i, 4, "<!--") == 0) {
        std::size_t end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      std::size_t end = html.find('>', i);
      if (end == std::string_view::npos) break;
      std::size_t j = i + 1;
      bool closing = j < end && html[j] == '/';
      if (closing) ++j;
      std::size_t name_start = j;
      while (j < end && (std::isalnum(static_cast<unsigned char>(html[j])) || html[j] == '-')) ++j;
      std::string name = to_lower(html.substr(name_start, j - name_start));
      i = end + 1;
      if (!closing && (name == "script" || name == "style")) {
        std::size_t close = to_lower(html.substr(i)).find("</" + name);
        if (close == std::string::npos) break;
        std::size_t gt = html.find('>', i + close);
        i = gt == std::string_view::npos ? html.size() : gt + 1;
        continue;
      }
      if (block.count(name)) raw += '\n';
      else if (name == "td" || name == "th") raw += ' ';
      continue;
    }
    if (c == '&') {
      std::size_t semi = html.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 10) {
        raw += decode_entity(html.substr(i + 1, semi - i - 1));
        i = semi + 1;
        continue;
      }
    }
    raw += c;
    ++i;
  }
  std::vector<std::string> lines;
  for (const auto& line : split(raw, "\n")) {
    std::string collapsed;
    bool space = false;
    for (char ch : line) {
      if (std::isspace(static_cast<unsigned char>(ch))) {
        space = true;
      } else {
        if (space && !collapsed.empty()) collapsed += ' ';
        space = false;
        collapsed += ch;
      }
    }
    if (!collapsed.empty()) lines.push_back(collapsed);
  }
  return join(lines, "\n");
}

TransitionResult execute_action(BrowserSession& session, const ParsedAction& a,
                                const ElementResolver& resolver) {
  TransitionResult result;
  std::visit(
      [&](const auto& act) {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, action::Click>) {
          session.click(resolve(resolver, act.element));
        } else if constexpr (std::is_same_v<T, action::Hover>) {
          session.hover(resolve(resolver, act.element));
        } else if constexpr (std::is_same_v<T, action::Type>) {
          session.type_text(resolve(resolver, act.element), act.text, act.press_enter);
        } else if constexpr (std::is_same_v<T, action::Press>) {
          session.press(act.key_comb);
        } else if constexpr (std::is_same_v<T, action::Scroll>) {
          session.scroll(act.direction);
        } else if constexpr (std::is_same_v<T, action::NewTab>) {
          session.new_tab();
        } else if constexpr (std::is_same_v<T, action::TabFocus>) {
          session.tab_focus(static_cast<int>(act.index));
        } else if constexpr (std::is_same_v<T, action::TabClose>) {
          session.tab_close();
        } else if constexpr (std::is_same_v<T, action::Goto>) {
          session.goto_url(act.url);
        } else if constexpr (std::is_same_v<T, action::GoBack>) {
          session.go_back();
        } else if constexpr (std::is_same_v<T, action::GoForward>) {
          session.go_forward();
        } else if constexpr (std::is_same_v<T, action::Stop>) {
          result.terminal = true;
          result.answer = act.answer;
        }
      },
      a);
  return result;
}

}  // namespace webagent
