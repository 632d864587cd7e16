#include "webagent/site_urls.hpp"

#include <cstdlib>

#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent {

std::string SiteUrls::resolve(Site site, const std::string& url) const {
  if (is_absolute_url(url) || url.rfind("about:", 0) == 0) return url;
  auto it = base.find(site);
  if (it == base.end() && site == Site::multi && !base.empty()) it = base.begin();
  if (it == base.end()) return url;
  std::string b = it->second;
  while (!b.empty() && b.back() == '/') b.pop_back();
  if (url.empty()) return b + "/";
  return url.front() == '/' ? b + url : b + "/" + url;
}

std::string SiteUrls::expand(std::string text) const {
  for (const auto& [site, url] : base) {
    std::string b = url;
    while (!b.empty() && b.back() == '/') b.pop_back();
    text = replace_all(std::move(text), "{{site:" + std::string(to_string(site)) + "}}", b);
  }
  return text;
}

SiteUrls SiteUrls::from_environment() {
  SiteUrls out;
  for (Site s : {Site::classifieds, Site::reddit, Site::shopping, Site::multi}) {
    std::string var = "WEBAGENT_" + to_lower(to_string(s)) + "_URL";
    for (auto& c : var) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(var.c_str()); v && *v) out.base[s] = v;
  }
  return out;
}

}  // namespace webagent
