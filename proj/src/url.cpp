#include "webagent/url.hpp"

#include <cctype>

#include "webagent/text_util.hpp"

namespace webagent {

std::string Url::origin() const {
  if (scheme == "about") return "null";
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(port);
  return out;
}

std::string Url::path_and_query() const { return query.empty() ? path : path + "?" + query; }

std::string Url::to_string() const {
  if (scheme == "about") return "about:" + path;
  std::string out = origin() + path;
  if (!query.empty()) out += "?" + query;
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

bool is_absolute_url(std::string_view text) { return parse_url(text).has_value(); }

std::optional<Url> parse_url(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  for (std::size_t i = 0; i < colon; ++i) {
    char c = text[i];
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'))
      return std::nullopt;
  }
  Url url;
  url.scheme = to_lower(text.substr(0, colon));
  std::string_view rest = text.substr(colon + 1);
  if (url.scheme == "about") {
    url.path = std::string(rest);
    return url;
  }
  if (rest.substr(0, 2) != "//") return std::nullopt;
  rest.remove_prefix(2);

  if (auto hash = rest.find('#'); hash != std::string_view::npos) {
    url.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (auto q = rest.find('?'); q != std::string_view::npos) {
    url.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  url.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (auto pc = authority.rfind(':'); pc != std::string_view::npos) {
    auto port_text = authority.substr(pc + 1);
    int port = 0;
    for (char c : port_text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      port = port * 10 + (c - '0');
    }
    url.port = port;
    authority = authority.substr(0, pc);
  }
  if (authority.empty()) return std::nullopt;
  url.host = to_lower(authority);
  return url;
}

namespace {

std::string remove_dot_segments(const std::string& path) {
  std::vector<std::string> out;
  auto segments = split(path, "/");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    if (seg == ".") {
      if (i + 1 == segments.size()) out.emplace_back();
      continue;
    }
    if (seg == "..") {
      if (out.size() > 1) out.pop_back();
      if (i + 1 == segments.size()) out.emplace_back();
      continue;
    }
    out.push_back(seg);
  }
  auto joined = join(out, "/");
  if (joined.empty() || joined[0] != '/') joined.insert(joined.begin(), '/');
  return joined;
}

}  // namespace

std::string resolve_url(std::string_view base, std::string_view ref) {
  if (parse_url(ref)) return std::string(ref);
  auto b = parse_url(base);
  if (!b || b->scheme == "about") return std::string(ref);
  Url out = *b;
  out.fragment.clear();
  std::string r(ref);
  if (auto hash = r.find('#'); hash != std::string::npos) {
    out.fragment = r.substr(hash + 1);
    r = r.substr(0, hash);
    if (r.empty()) return out.to_string();
  }
  if (r.rfind("//", 0) == 0) return resolve_url(b->scheme + ":" + r, "");
  std::string query;
  bool has_query = false;
  if (auto q = r.find('?'); q != std::string::npos) {
    query = r.substr(q + 1);
    has_query = true;
    r = r.substr(0, q);
  }
  if (r.empty()) {
    if (has_query) out.query = query;
    return out.to_string();
  }
  out.query = query;
  if (r[0] == '/') {
    out.path = remove_dot_segments(r);
  } else {
    auto dir = b->path.substr(0, b->path.rfind('/') + 1);
    out.path = remove_dot_segments(dir + r);
  }
  return out.to_string();
}

std::string normalize_url_for_compare(std::string_view text) {
  auto url = parse_url(text);
  if (!url) {
    std::string s(text);
    if (auto hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    while (s.size() > 1 && s.back() == '/') s.pop_back();
    return s;
  }
  if (url->scheme == "about") return "about:" + url->path;
  std::string path = url->path;
  while (path.size() > 1 && path.back() == '/') path.pop_back();
  if (path == "/") path.clear();
  std::string out = url->origin() + path;
  if (!url->query.empty()) out += "?" + url->query;
  return out;
}

std::string url_basename(std::string_view text) {
  std::string path;
  if (auto url = parse_url(text)) {
    path = url->path;
  } else {
    path = std::string(text);
    if (auto q = path.find_first_of("?#"); q != std::string::npos) path.resize(q);
  }
  auto slash = path.rfind('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::string percent_decode(std::string_view s, bool plus_as_space) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '+' && plus_as_space) {
      out.push_back(' ');
    } else if (c == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
               std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else if (c == ' ') {
      out.push_back('+');
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

FormFields parse_form_urlencoded(std::string_view body) {
  FormFields fields;
  if (body.empty()) return fields;
  for (const auto& pair : split(body, "&")) {
    if (pair.empty()) continue;
    auto eq = pair.find('=');
    if (eq == std::string::npos)
      fields.emplace_back(percent_decode(pair), "");
    else
      fields.emplace_back(percent_decode(pair.substr(0, eq)), percent_decode(pair.substr(eq + 1)));
  }
  return fields;
}

std::string encode_form_urlencoded(const FormFields& fields) {
  std::string out;
  for (const auto& [k, v] : fields) {
    if (!out.empty()) out += '&';
    out += percent_encode(k) + "=" + percent_encode(v);
  }
  return out;
}

}  // namespace webagent
