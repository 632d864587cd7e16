#include "webagent/fixtures/stack.hpp"

namespace webagent::fixtures {

FixtureStack::FixtureStack(const std::string& sites_dir, FixturePorts ports)
    : sites_(sites_dir, ports.sites),
      browser_(std::make_shared<FixtureBrowser>()),
      cdp_(std::make_unique<CdpServer>(browser_, ports.cdp)) {}

FixtureStack::~FixtureStack() {
  cdp_->stop();
  sites_.stop();
}

std::unique_ptr<BrowserSession> FixtureStack::open_session(const SessionOptions& options) const {
  return open_cdp_session(cdp_->http_endpoint(), options);
}

SessionOptions fixture_session_options() {
  SessionOptions o;
  o.settle.network_idle = std::chrono::milliseconds(20);
  o.settle.cap = std::chrono::milliseconds(5000);
  return o;
}

}  // namespace webagent::fixtures
