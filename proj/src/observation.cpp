#include "webagent/observation.hpp"

#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent {

std::string_view to_string(ObservationMode m) {
  switch (m) {
    case ObservationMode::acc_tree: return "acc_tree";
    case ObservationMode::acc_tree_caps: return "acc_tree_caps";
    case ObservationMode::screenshot_acc_tree_caps: return "screenshot_acc_tree_caps";
    case ObservationMode::som_screenshot_caps: return "som_screenshot_caps";
  }
  return "";
}

std::optional<ObservationMode> observation_mode_from_string(std::string_view s) {
  if (s == "acc_tree") return ObservationMode::acc_tree;
  if (s == "acc_tree_caps" || s == "caption") return ObservationMode::acc_tree_caps;
  if (s == "screenshot_acc_tree_caps" || s == "multimodal") return ObservationMode::screenshot_acc_tree_caps;
  if (s == "som_screenshot_caps" || s == "som") return ObservationMode::som_screenshot_caps;
  return std::nullopt;
}

bool uses_screenshot(ObservationMode m) {
  return m == ObservationMode::screenshot_acc_tree_caps || m == ObservationMode::som_screenshot_caps;
}
bool uses_captions(ObservationMode m) { return m != ObservationMode::acc_tree; }
bool uses_som(ObservationMode m) { return m == ObservationMode::som_screenshot_caps; }

std::string Observation::digest() const {
  std::string buf = url + "\n";
  for (const auto& t : tabs) {
    buf += std::to_string(t.index) + (t.focused ? "*" : "") + t.title + "\n";
  }
  buf += text_payload + "\n";
  if (screenshot) buf += screenshot->digest();
  return sha256_hex(buf);
}

ElementResolver Observation::resolver() const {
  auto elems = std::make_shared<std::map<std::int64_t, ElementRef>>(elements);
  return [elems](std::int64_t id) -> std::optional<ElementRef> {
    auto it = elems->find(id);
    if (it == elems->end()) return std::nullopt;
    return it->second;
  };
}

Captioner make_captioner(ModelGateway& gateway, std::function<Raster(const std::string&)> fetch_image) {
  return [&gateway, fetch_image](const std::string& url) { return gateway.caption(fetch_image(url)); };
}

std::string image_description(const std::string& caption, const std::string& url) {
  std::string out = "Image, description: " + caption;
  if (!url.empty()) out += ", url: " + url_basename(url);
  return out;
}

namespace {

bool is_image_role(const std::string& role) { return role == "img" || role == "image"; }

void flatten(const AxNode& node, int depth, const std::string& parent_name, bool is_root, std::string& out) {
  bool skip = false;
  if (!is_root) {
    if (node.ignored) skip = true;
    if ((node.role == "generic" || node.role == "none" || node.role == "presentation") && node.name.empty()) {
      skip = true;
    }
    if ((node.role == "StaticText" || node.role == "InlineTextBox") &&
        (trim(node.name).empty() || node.name == parent_name)) {
      skip = true;
    }
    if (node.role == "InlineTextBox") skip = true;
  }
  int child_depth = depth;
  const std::string* name_for_children = &parent_name;
  if (!skip) {
    out.append(static_cast<std::size_t>(depth), '\t');
    out += "[" + std::to_string(node.node_id) + "] " + node.role + " '" + node.name + "'";
    for (const auto& [k, v] : node.properties) {
      if (k == "url") continue;
      out += " " + k + ": " + v;
    }
    out += "\n";
    child_depth = depth + 1;
    name_for_children = &node.name;
  }
  for (const auto& c : node.children) flatten(c, child_depth, *name_for_children, false, out);
}

std::string caption_or_unavailable(const Captioner& captioner, const std::string& url) {
  if (!captioner || url.empty()) return "unavailable";
  try {
    std::string c = trim(captioner(url));
    return c.empty() ? "unavailable" : c;
  } catch (const std::exception&) {
    return "unavailable";
  }
}

void collect_elements(const AxNode& node, std::map<std::int64_t, ElementRef>& out) {
  if (node.backend_node_id != 0) {
    out[node.node_id] = ElementRef{std::nullopt, node.node_id, BackendNodeId{node.backend_node_id}};
  }
  for (const auto& c : node.children) collect_elements(c, out);
}

}  // namespace

std::string flatten_accessibility_tree(const AxNode& root) {
  if (root.role.empty() && root.children.empty()) return {};
  std::string out;
  flatten(root, 0, std::string(), true, out);
  if (!out.empty()) out.pop_back();
  return out;
}

AxNode augment_with_captions(const AxNode& root, const Captioner& captioner) {
  AxNode out = root;
  if (is_image_role(out.role)) {
    std::string url = out.property("url").value_or("");
    out.name = image_description(caption_or_unavailable(captioner, url), url);
  }
  for (auto& c : out.children) c = augment_with_captions(c, captioner);
  return out;
}

SomManifest augment_with_captions(const SomManifest& manifest, const std::map<std::int64_t, std::string>& image_urls,
                                  const Captioner& captioner) {
  SomManifest out = manifest;
  for (auto& k : out.marks) {
    if (k.tag_type != "IMG") continue;
    auto it = image_urls.find(k.id);
    std::string url = it == image_urls.end() ? "" : it->second;
    k.text_content = image_description(caption_or_unavailable(captioner, url), url);
  }
  return out;
}

std::string truncate_to_budget(std::string_view text, const TextBudget& budget) {
  const std::size_t limit = budget.max_chars();
  if (text.size() <= limit) return std::string(text);
  if (limit <= kTruncationMarker.size()) return std::string(kTruncationMarker.substr(0, limit));
  // Largest prefix of whole lines leaving room for "\n" + marker.
  const std::size_t room = limit - kTruncationMarker.size() - 1;
  std::size_t cut = std::string_view::npos;
  std::size_t pos = text.find('\n');
  while (pos != std::string_view::npos && pos <= room) {
    cut = pos;
    pos = text.find('\n', pos + 1);
  }
  if (cut == std::string_view::npos) return std::string(kTruncationMarker);
  return std::string(text.substr(0, cut)) + "\n" + std::string(kTruncationMarker);
}

Observation build_observation(BrowserSession& session, const ObservationSettings& settings) {
  Observation obs;
  obs.mode = settings.mode;
  const bool captions = uses_captions(settings.mode);
  std::string text;
  PageSnapshot snap;

  if (uses_som(settings.mode)) {
    if (!settings.som) throw std::invalid_argument("SoM mode requires a SomProvider");
    SomManifest manifest = settings.som->annotate(session);
    snap = session.capture_snapshot();
    if (!settings.som->paints_overlays()) draw_som_overlay(snap.screenshot, manifest, snap.scroll_y);
    if (captions) {
      std::map<std::int64_t, std::string> urls;
      for (const auto& k : manifest.marks) {
        if (k.tag_type != "IMG") continue;
        auto srcs = session.query_attribute(k.selector, "src");
        if (!srcs.empty()) urls[k.id] = srcs.front();
      }
      manifest = augment_with_captions(manifest, urls, settings.captioner);
    }
    for (const auto& k : manifest.marks) {
      obs.elements[k.id] = ElementRef{k.id, std::nullopt, CssSelector{k.selector}};
    }
    text = render_som_text(manifest);
    obs.som_manifest = std::move(manifest);
  } else {
    snap = session.capture_snapshot();
    AxNode tree = captions ? augment_with_captions(snap.accessibility_root, settings.captioner)
                           : snap.accessibility_root;
    collect_elements(tree, obs.elements);
    text = flatten_accessibility_tree(tree);
  }

  obs.url = snap.url;
  obs.tabs = session.tabs();
  obs.text_payload = truncate_to_budget(text, settings.budget);
  auto shot = std::make_shared<const Raster>(std::move(snap.screenshot));
  obs.record_screenshot = shot;
  if (uses_screenshot(settings.mode)) obs.screenshot = shot;
  return obs;
}

}  // namespace webagent
