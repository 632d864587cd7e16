#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "webagent/browser.hpp"
#include "webagent/budget.hpp"
#include "webagent/image.hpp"
#include "webagent/model_gateway.hpp"
#include "webagent/som.hpp"

namespace webagent {

enum class ObservationMode { acc_tree, acc_tree_caps, screenshot_acc_tree_caps, som_screenshot_caps };

std::string_view to_string(ObservationMode m);
/// Accepts the canonical names plus the short forms "som" and "multimodal".
std::optional<ObservationMode> observation_mode_from_string(std::string_view s);
bool uses_screenshot(ObservationMode m);
bool uses_captions(ObservationMode m);
bool uses_som(ObservationMode m);

struct Observation {
  std::string url;
  std::vector<TabInfo> tabs;
  ObservationMode mode = ObservationMode::acc_tree;
  std::string text_payload;
  /// Current screenshot (SoM overlays included) in screenshot modes.
  std::shared_ptr<const Raster> screenshot;
  /// Page screenshot in every mode, for trajectory records only.
  std::shared_ptr<const Raster> record_screenshot;
  std::optional<SomManifest> som_manifest;
  /// Element ids shown in text_payload and how to reach them.
  std::map<std::int64_t, ElementRef> elements;

  /// Digest over the URL, tabs, text and screenshot pixels.
  std::string digest() const;
  ElementResolver resolver() const;
};

/// Returns a caption for the image at `url`; throws on failure.
using Captioner = std::function<std::string(const std::string& url)>;

Captioner make_captioner(ModelGateway& gateway, std::function<Raster(const std::string&)> fetch_image);

/// Depth-first, tab-indented `[id] role 'name'` lines. Ignored nodes, unnamed
/// generic containers and empty or redundant text nodes are dropped and their
/// children promoted; the root is always kept.
std::string flatten_accessibility_tree(const AxNode& root);

/// Rewrites image nodes' names as `Image, description: <caption>, url: <file>`.
AxNode augment_with_captions(const AxNode& root, const Captioner& captioner);

/// Same for IMG marks; `image_urls` maps mark id to the image source.
SomManifest augment_with_captions(const SomManifest& manifest,
                                  const std::map<std::int64_t, std::string>& image_urls,
                                  const Captioner& captioner);

/// Keeps the head of `text`, cut at a line boundary, so that the result with
/// the `[...truncated]` marker line fits the budget.
std::string truncate_to_budget(std::string_view text, const TextBudget& budget);
inline constexpr std::string_view kTruncationMarker = "[...truncated]";

/// Image-node caption text: `Image, description: <caption>, url: <basename>`.
std::string image_description(const std::string& caption, const std::string& url);

struct ObservationSettings {
  ObservationMode mode = ObservationMode::acc_tree;
  TextBudget budget = default_observation_budget();
  Captioner captioner;         // required by caption modes
  SomProvider* som = nullptr;  // required by the SoM mode
};

Observation build_observation(BrowserSession& session, const ObservationSettings& settings);

}  // namespace webagent
