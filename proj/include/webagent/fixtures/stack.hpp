#pragma once

#include <memory>
#include <string>

#include "webagent/browser.hpp"
#include "webagent/fixtures/cdp_server.hpp"
#include "webagent/fixtures/fixture_browser.hpp"
#include "webagent/fixtures/site_server.hpp"

namespace webagent::fixtures {

/// 0 picks a free port.
struct FixturePorts {
  int sites = 0;
  int cdp = 0;
};

/// Site server, fixture browser and its protocol endpoint, all on loopback.
class FixtureStack {
 public:
  explicit FixtureStack(const std::string& sites_dir, FixturePorts ports = {});
  ~FixtureStack();

  SiteUrls site_urls() const { return sites_.site_urls(); }
  /// http://127.0.0.1:port discovery address of the browser.
  std::string cdp_endpoint() const { return cdp_->http_endpoint(); }
  void reset() { sites_.reset(); }
  std::unique_ptr<BrowserSession> open_session(const SessionOptions& options) const;

 private:
  SiteServer sites_;
  std::shared_ptr<FixtureBrowser> browser_;
  std::unique_ptr<CdpServer> cdp_;
};

/// Settle window for the fixture browser, which reports every event before
/// the command that caused it returns.
SessionOptions fixture_session_options();

}  // namespace webagent::fixtures
