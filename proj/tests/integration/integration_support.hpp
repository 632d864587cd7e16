#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "test_support.hpp"
#include "webagent/fixtures/harness.hpp"
#include "webagent/fixtures/stack.hpp"

namespace webagent::testing {

inline fixtures::FixtureLayout layout() { return {fixture_dir()}; }

inline fixtures::FixtureStack& stack() {
  static fixtures::FixtureStack s(layout().sites());
  return s;
}

inline std::unique_ptr<BrowserSession> open_session() {
  return stack().open_session(fixtures::fixture_session_options());
}

inline std::string site_url(Site site, const std::string& path) { return stack().site_urls().resolve(site, path); }

inline const AxNode* find_ax(const AxNode& n, const std::string& role, const std::string& name) {
  if (n.role == role && n.name == name) return &n;
  for (const auto& c : n.children)
    if (auto* hit = find_ax(c, role, name)) return hit;
  return nullptr;
}

inline BackendNodeId node_of(BrowserSession& s, const std::string& role, const std::string& name) {
  auto snap = s.capture_snapshot();
  const AxNode* n = find_ax(snap.accessibility_root, role, name);
  if (!n) throw std::runtime_error("no " + role + " '" + name + "' on " + snap.url);
  return BackendNodeId{n->backend_node_id};
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("webagent_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string str(const std::string& leaf = {}) const { return leaf.empty() ? path.string() : (path / leaf).string(); }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace webagent::testing
