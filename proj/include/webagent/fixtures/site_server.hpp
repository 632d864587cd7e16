#pragma once

#include <memory>
#include <string>

#include "webagent/site_urls.hpp"

namespace webagent::fixtures {

/// HTTP server for the three fixture sites: a shop under /shop, classifieds
/// under /classifieds and a forum under /forum. Content comes from
/// `<data_dir>/sites.json` and images from `<data_dir>/media`. POST /__reset
/// restores the initial state.
class SiteServer {
 public:
  /// `port` 0 picks a free port. Listens on 127.0.0.1.
  explicit SiteServer(const std::string& data_dir, int port = 0);
  ~SiteServer();

  SiteServer(const SiteServer&) = delete;
  SiteServer& operator=(const SiteServer&) = delete;

  int port() const;
  /// http://127.0.0.1:port
  std::string base_url() const;
  /// Base URLs for every site; multi-site tasks start at the server root.
  SiteUrls site_urls() const;

  void reset();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace webagent::fixtures
