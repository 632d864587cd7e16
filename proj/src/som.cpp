#include "webagent/som.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "webagent/text_util.hpp"
#include "webagent/url.hpp"

namespace webagent {

using nlohmann::json;

namespace {

std::string require_string(const json& j, const char* field, const std::string& where) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw SomFormatError(where + ": field '" + field + "' must be a string");
  }
  return j[field].get<std::string>();
}

}  // namespace

SomManifest som_manifest_from_json(const json& j) {
  if (!j.is_object()) throw SomFormatError("manifest must be an object");
  SomManifest m;
  m.page_url = j.value("pageUrl", std::string());
  std::set<std::string> selectors;
  const json marks = j.value("marks", json::array());
  if (!marks.is_array()) throw SomFormatError("field 'marks' must be an array");
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const json& e = marks[i];
    std::string where = "marks[" + std::to_string(i) + "]";
    SomMark mark;
    if (!e.contains("id") || !e["id"].is_number_integer()) {
      throw SomFormatError(where + ": field 'id' must be an integer");
    }
    mark.id = e["id"].get<std::int64_t>();
    if (mark.id != static_cast<std::int64_t>(i) + 1) {
      throw SomFormatError(where + ": ids must be 1..N in order, got " + std::to_string(mark.id));
    }
    const json& b = e.value("bbox", json());
    if (!b.is_array() || b.size() != 4) throw SomFormatError(where + ": field 'bbox' must be [x,y,w,h]");
    mark.bbox = {static_cast<int>(std::lround(b[0].get<double>())), static_cast<int>(std::lround(b[1].get<double>())),
                 static_cast<int>(std::lround(b[2].get<double>())), static_cast<int>(std::lround(b[3].get<double>()))};
    if (mark.bbox.empty()) throw SomFormatError(where + ": bbox must have positive size");
    mark.tag_type = require_string(e, "tagType", where);
    mark.text_content = e.value("textContent", std::string());
    mark.selector = require_string(e, "selector", where);
    if (!selectors.insert(mark.selector).second) {
      throw SomFormatError(where + ": duplicate selector '" + mark.selector + "'");
    }
    m.marks.push_back(std::move(mark));
  }
  for (const auto& s : j.value("staticTexts", json::array())) {
    if (s.is_string()) {
      m.static_texts.push_back({s.get<std::string>(), static_cast<std::int64_t>(m.marks.size())});
    } else if (s.is_object()) {
      std::int64_t after = s.value("after", std::int64_t{0});
      if (after < 0 || after > static_cast<std::int64_t>(m.marks.size())) {
        throw SomFormatError("staticTexts: 'after' out of range");
      }
      m.static_texts.push_back({require_string(s, "text", "staticTexts"), after});
    } else {
      throw SomFormatError("staticTexts entries must be strings or objects");
    }
  }
  return m;
}

json som_manifest_to_json(const SomManifest& m) {
  json marks = json::array();
  for (const auto& k : m.marks) {
    marks.push_back({{"id", k.id},
                     {"bbox", {k.bbox.x, k.bbox.y, k.bbox.width, k.bbox.height}},
                     {"tagType", k.tag_type},
                     {"textContent", k.text_content},
                     {"selector", k.selector}});
  }
  json statics = json::array();
  for (const auto& s : m.static_texts) statics.push_back({{"text", s.text}, {"after", s.after}});
  return {{"marks", marks}, {"staticTexts", statics}, {"pageUrl", m.page_url}};
}

std::string render_som_text(const SomManifest& m) {
  std::vector<const SomStaticText*> statics;
  for (const auto& s : m.static_texts) statics.push_back(&s);
  std::stable_sort(statics.begin(), statics.end(),
                   [](const SomStaticText* a, const SomStaticText* b) { return a->after < b->after; });
  std::string out;
  std::size_t si = 0;
  auto flush_statics = [&](std::int64_t upto) {
    while (si < statics.size() && statics[si]->after <= upto) {
      out += "[] [StaticText] [" + statics[si]->text + "]\n";
      ++si;
    }
  };
  flush_statics(0);
  for (const auto& k : m.marks) {
    out += "[" + std::to_string(k.id) + "] [" + k.tag_type + "] [" + k.text_content + "]\n";
    flush_statics(k.id);
  }
  flush_statics(INT64_MAX);
  if (!out.empty()) out.pop_back();
  return out;
}

std::vector<SomTextLine> parse_som_text(std::string_view text) {
  std::vector<SomTextLine> out;
  for (const auto& line : split(text, "\n")) {
    if (line.size() < 8 || line.front() != '[' || line.back() != ']') continue;
    std::size_t id_end = line.find(']');
    std::string id = line.substr(1, id_end - 1);
    if (id.find_first_not_of("0123456789") != std::string::npos) continue;
    if (line.compare(id_end + 1, 2, " [") != 0) continue;
    std::size_t tag_start = id_end + 3;
    std::size_t tag_end = line.find(']', tag_start);
    if (tag_end == std::string::npos || line.compare(tag_end + 1, 2, " [") != 0) continue;
    SomTextLine l;
    if (!id.empty()) l.id = std::stoll(id);
    l.tag_type = line.substr(tag_start, tag_end - tag_start);
    l.text = line.substr(tag_end + 3, line.size() - tag_end - 4);
    if (!l.id && l.tag_type != "StaticText") continue;
    out.push_back(std::move(l));
  }
  return out;
}

Rgb som_color(std::int64_t id) {
  static const Rgb palette[kSomPaletteSize] = {
      {230, 25, 75},  {60, 180, 75},  {0, 130, 200},  {245, 130, 48}, {145, 30, 180}, {70, 170, 170},
      {240, 50, 230}, {128, 128, 0},  {0, 0, 128},    {170, 110, 40}, {128, 0, 0},    {0, 128, 128}};
  std::int64_t i = id % kSomPaletteSize;
  if (i < 0) i += kSomPaletteSize;
  return palette[i];
}

void draw_som_overlay(Raster& screenshot, const SomManifest& m, double scroll_y) {
  const int dy = static_cast<int>(std::lround(scroll_y));
  const int scale = 2;
  for (const auto& k : m.marks) {
    Rect box{k.bbox.x, k.bbox.y - dy, k.bbox.width, k.bbox.height};
    Rect view{0, 0, screenshot.width(), screenshot.height()};
    if (!box.intersects(view)) continue;
    Rgb c = som_color(k.id);
    screenshot.stroke_rect(box, c, 2);
    std::string label = std::to_string(k.id);
    int w = Raster::text_width(label, scale) + 4;
    int h = 7 * scale + 4;
    int bx = std::clamp(box.x, 0, std::max(0, screenshot.width() - w));
    int by = std::clamp(box.y, 0, std::max(0, screenshot.height() - h));
    screenshot.fill_rect({bx, by, w, h}, c);
    screenshot.draw_text(bx + 2, by + 2, label, {255, 255, 255}, scale);
  }
}

SomManifest ScriptSomProvider::annotate(BrowserSession& session) {
  json result = session.execute_script(script_);
  try {
    SomManifest m = som_manifest_from_json(result);
    if (m.page_url.empty()) m.page_url = session.current_url();
    return m;
  } catch (const SomFormatError& e) {
    throw BrowserError(BrowserError::Kind::script_error, std::string("bad annotation manifest: ") + e.what(),
                       result.dump());
  }
}

PrecomputedSomProvider::PrecomputedSomProvider(std::string dir, std::shared_ptr<SomProvider> fallback)
    : dir_(std::move(dir)), fallback_(std::move(fallback)) {
  if (fallback_ && fallback_->paints_overlays()) {
    throw std::invalid_argument("precomputed SoM fallback must not paint overlays");
  }
  std::filesystem::path index = std::filesystem::path(dir_) / "index.json";
  if (std::filesystem::exists(index)) {
    json j = json::parse(read_file(index.string()));
    for (const auto& [k, v] : j.items()) index_[k] = v.get<std::string>();
  }
}

std::string PrecomputedSomProvider::key_for(const std::string& url, double scroll_y, std::string_view page_text) {
  auto u = parse_url(url);
  std::string pq = u ? u->path_and_query() : url;
  if (pq.empty()) pq = "/";
  return pq + "@" + std::to_string(static_cast<long long>(std::lround(scroll_y))) + "#" +
         sha256_hex(page_text).substr(0, 12);
}

std::string PrecomputedSomProvider::page_key(BrowserSession& session) {
  return key_for(session.current_url(), session.scroll_offset(), join(session.query_text("body"), "\n"));
}

std::optional<SomManifest> PrecomputedSomProvider::lookup(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return som_manifest_from_json(json::parse(read_file((std::filesystem::path(dir_) / it->second).string())));
}

SomManifest PrecomputedSomProvider::annotate(BrowserSession& session) {
  std::string key = page_key(session);
  if (auto m = lookup(key)) {
    m->page_url = session.current_url();
    return *m;
  }
  if (!fallback_) {
    throw BrowserError(BrowserError::Kind::script_error, "no precomputed SoM manifest for " + key);
  }
  ++misses_;
  return fallback_->annotate(session);
}

SomManifest RecordingSomProvider::annotate(BrowserSession& session) {
  std::string key = PrecomputedSomProvider::page_key(session);
  SomManifest m = inner_->annotate(session);
  std::lock_guard lock(mu_);
  recorded_.emplace(key, m);
  return m;
}

std::size_t RecordingSomProvider::size() const {
  std::lock_guard lock(mu_);
  return recorded_.size();
}

void RecordingSomProvider::save(const std::string& dir) const {
  std::filesystem::path d(dir);
  std::filesystem::create_directories(d);
  json index = json::object();
  if (std::filesystem::exists(d / "index.json")) index = json::parse(read_file((d / "index.json").string()));
  std::lock_guard lock(mu_);
  for (const auto& [key, m] : recorded_) {
    std::string file = sha256_hex(key).substr(0, 16) + ".json";
    json j = som_manifest_to_json(m);
    j.erase("pageUrl");
    write_file((d / file).string(), j.dump(1) + "\n");
    index[key] = file;
  }
  write_file((d / "index.json").string(), index.dump(1) + "\n");
}

}  // namespace webagent
