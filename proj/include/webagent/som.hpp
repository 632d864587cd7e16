#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "webagent/browser.hpp"
#include "webagent/image.hpp"

namespace webagent {

struct SomMark {
  std::int64_t id = 0;
  Rect bbox;  // page CSS pixels
  std::string tag_type;
  std::string text_content;
  std::string selector;
  friend bool operator==(const SomMark&, const SomMark&) = default;
};

/// Non-interactable text run; `after` is the id of the mark preceding it in
/// document order (0 when it precedes every mark).
struct SomStaticText {
  std::string text;
  std::int64_t after = 0;
  friend bool operator==(const SomStaticText&, const SomStaticText&) = default;
};

struct SomManifest {
  std::vector<SomMark> marks;
  std::vector<SomStaticText> static_texts;
  std::string page_url;
  friend bool operator==(const SomManifest&, const SomManifest&) = default;
};

class SomFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Wire form: {"marks":[{"id","bbox":[x,y,w,h],"tagType","textContent","selector"}],
/// "staticTexts":[text | {"text","after"}], "pageUrl"}. Validates dense ids,
/// unique selectors and positive box sizes.
SomManifest som_manifest_from_json(const nlohmann::json& j);
nlohmann::json som_manifest_to_json(const SomManifest& m);

/// One line per mark, `[id] [TAG] [text]`, with static texts as
/// `[] [StaticText] [text]`, in document order.
std::string render_som_text(const SomManifest& m);

struct SomTextLine {
  std::optional<std::int64_t> id;  // nullopt for static text
  std::string tag_type;
  std::string text;
  friend bool operator==(const SomTextLine&, const SomTextLine&) = default;
};

/// Inverse of render_som_text. Lines that are not SoM entries (such as the
/// truncation marker) are skipped.
std::vector<SomTextLine> parse_som_text(std::string_view text);

/// Box and badge colour of a mark; a fixed palette indexed by id.
Rgb som_color(std::int64_t id);
inline constexpr int kSomPaletteSize = 12;

/// Draws each mark's box and id badge onto a viewport screenshot.
void draw_som_overlay(Raster& screenshot, const SomManifest& m, double scroll_y);

class SomProvider {
 public:
  virtual ~SomProvider() = default;
  /// Annotates the current page of `session`.
  virtual SomManifest annotate(BrowserSession& session) = 0;
  /// True when annotate() already painted the marks into the page.
  virtual bool paints_overlays() const = 0;
};

/// Runs an annotation script in the page and parses the manifest it returns.
class ScriptSomProvider : public SomProvider {
 public:
  explicit ScriptSomProvider(std::string script, bool paints_overlays = true)
      : script_(std::move(script)), paints_(paints_overlays) {}
  SomManifest annotate(BrowserSession& session) override;
  bool paints_overlays() const override { return paints_; }

 private:
  std::string script_;
  bool paints_;
};

/// Serves manifests computed ahead of time from a directory holding
/// index.json (key -> file). Pages without an entry go to `fallback`, which
/// must not paint overlays itself; with no fallback they are an error.
class PrecomputedSomProvider : public SomProvider {
 public:
  explicit PrecomputedSomProvider(std::string dir, std::shared_ptr<SomProvider> fallback = nullptr);
  SomManifest annotate(BrowserSession& session) override;
  bool paints_overlays() const override { return false; }

  /// "<path?query>@<scroll_y>#<first 12 hex of sha256(page text)>", e.g.
  /// "/shop/search?q=tee@0#3fa2c81d09be".
  static std::string key_for(const std::string& url, double scroll_y, std::string_view page_text);
  /// Key of the session's current page; page text is the body's text.
  static std::string page_key(BrowserSession& session);

  std::optional<SomManifest> lookup(const std::string& key) const;
  std::size_t size() const { return index_.size(); }
  /// Annotations answered by the fallback so far.
  std::size_t misses() const { return misses_.load(); }

 private:
  std::string dir_;
  std::map<std::string, std::string> index_;
  std::shared_ptr<SomProvider> fallback_;
  std::atomic<std::size_t> misses_{0};
};

/// Wraps a provider and remembers every manifest it returns by page key;
/// save() writes them in the layout PrecomputedSomProvider reads, merging
/// with an existing index.
class RecordingSomProvider : public SomProvider {
 public:
  explicit RecordingSomProvider(std::shared_ptr<SomProvider> inner) : inner_(std::move(inner)) {}
  SomManifest annotate(BrowserSession& session) override;
  bool paints_overlays() const override { return inner_->paints_overlays(); }
  void save(const std::string& dir) const;
  std::size_t size() const;

 private:
  std::shared_ptr<SomProvider> inner_;
  mutable std::mutex mu_;
  std::map<std::string, SomManifest> recorded_;
};

}  // namespace webagent
