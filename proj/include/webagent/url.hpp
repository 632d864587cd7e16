#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace webagent {

struct Url {
  std::string scheme;  // lowercase, without ':'
  std::string host;    // lowercase
  int port = 0;        // 0 when absent
  std::string path;    // starts with '/' for hierarchical URLs
  std::string query;   // without '?'
  std::string fragment;

  std::string origin() const;
  std::string to_string() const;
  /// Path plus "?query" when a query is present.
  std::string path_and_query() const;
};

/// Parses an absolute URL. Returns nullopt for relative references and for
/// opaque URLs other than about:.
std::optional<Url> parse_url(std::string_view text);

bool is_absolute_url(std::string_view text);

/// Resolves `ref` against `base` (RFC 3986 subset: absolute, scheme-relative,
/// host-relative and path-relative references).
std::string resolve_url(std::string_view base, std::string_view ref);

/// Canonical form for URL equality: scheme+host+port+path+query, trailing slash
/// of the path stripped, fragment dropped.
std::string normalize_url_for_compare(std::string_view url);

/// Last path segment, e.g. "http://h/img/car.png?x=1" -> "car.png".
std::string url_basename(std::string_view url);

std::string percent_decode(std::string_view s, bool plus_as_space = true);
std::string percent_encode(std::string_view s);

using FormFields = std::vector<std::pair<std::string, std::string>>;
FormFields parse_form_urlencoded(std::string_view body);
std::string encode_form_urlencoded(const FormFields& fields);

}  // namespace webagent
