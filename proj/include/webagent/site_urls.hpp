#pragma once

#include <map>
#include <string>

#include "webagent/task_model.hpp"

namespace webagent {

/// Per-site base URLs from the run configuration. Site-relative URLs ("/x")
/// are appended to the site's base, which may itself carry a path prefix.
struct SiteUrls {
  std::map<Site, std::string> base;

  std::string resolve(Site site, const std::string& url) const;
  /// Replaces "{{site:<name>}}" placeholders with the matching base URL.
  std::string expand(std::string text) const;

  /// Reads WEBAGENT_<SITE>_URL variables (CLASSIFIEDS, REDDIT, SHOPPING, MULTI).
  static SiteUrls from_environment();
};

}  // namespace webagent
