#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "webagent/action.hpp"
#include "webagent/image.hpp"
#include "webagent/runner.hpp"

namespace webagent::testing {

inline std::string fixture_dir() { return WEBAGENT_FIXTURE_DIR; }
inline std::string prompt_dir() { return WEBAGENT_PROMPT_DIR; }

// Brute-force SSIM over same-size RGB rasters. Written from the textbook
// definition: every 11x11 (or smaller odd) window fully inside the image,
// weighted by a normalized 2-D Gaussian, two-pass moments.
inline double reference_ssim(const Raster& x, const Raster& y, int window = 11, double sigma = 1.5) {
  const int w = x.width(), h = x.height();
  auto gray = [](const Raster& r, int px, int py) {
    Rgb c = r.at(px, py);
    return (299.0 * c.r + 587.0 * c.g + 114.0 * c.b) / 1000.0;
  };
  int n = window;
  if (n > w) n = w;
  if (n > h) n = h;
  if (n % 2 == 0) n -= 1;
  std::vector<double> weight(static_cast<std::size_t>(n) * n);
  double half = (n - 1) / 2.0, total = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double d2 = (i - half) * (i - half) + (j - half) * (j - half);
      weight[j * n + i] = std::exp(-d2 / (2 * sigma * sigma));
      total += weight[j * n + i];
    }
  for (double& v : weight) v /= total;
  const double c1 = (0.01 * 255) * (0.01 * 255);
  const double c2 = (0.03 * 255) * (0.03 * 255);
  double sum = 0;
  long count = 0;
  for (int oy = 0; oy + n <= h; ++oy)
    for (int ox = 0; ox + n <= w; ++ox) {
      double mx = 0, my = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          mx += weight[j * n + i] * gray(x, ox + i, oy + j);
          my += weight[j * n + i] * gray(y, ox + i, oy + j);
        }
      double vx = 0, vy = 0, cxy = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double dx = gray(x, ox + i, oy + j) - mx;
          double dy = gray(y, ox + i, oy + j) - my;
          vx += weight[j * n + i] * dx * dx;
          vy += weight[j * n + i] * dy * dy;
          cxy += weight[j * n + i] * dx * dy;
        }
      sum += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return sum / static_cast<double>(count);
}

// Smooth-ish random raster: random blocks plus per-pixel noise, so windows
// see both structure and texture.
inline Raster random_raster(std::mt19937& rng, int w, int h) {
  Raster r(w, h);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> noise(-20, 20);
  int blocks = 3 + byte(rng) % 6;
  for (int b = 0; b < blocks; ++b) {
    Rect rect{byte(rng) % w, byte(rng) % h, 1 + byte(rng) % w, 1 + byte(rng) % h};
    r.fill_rect(rect, Rgb{static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                          static_cast<std::uint8_t>(byte(rng))});
  }
  auto clamp = [](int v) { return static_cast<std::uint8_t>(v < 0 ? 0 : v > 255 ? 255 : v); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Rgb c = r.at(x, y);
      r.set(x, y, {clamp(c.r + noise(rng)), clamp(c.g + noise(rng)), clamp(c.b + noise(rng))});
    }
  return r;
}

// Text that stresses the bracket grammar. Fences are excluded: the action
// body itself is fenced.
inline std::string random_payload(std::mt19937& rng, bool allow_empty) {
  static const std::vector<std::string> atoms = {
      "guitar", "$279.49", "[", "]", "[x]", "a b", "  ", "\n", "`", "N/A", "é", "|OR|", "\\", "\"", "'",
      "In summary", "click [3]", "]]", "[[", "0", "tab", "\t", "https://example.test/a?b=c", "-", "Ctrl+v"};
  std::uniform_int_distribution<int> len(allow_empty ? 0 : 1, 6);
  std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
  std::string s;
  int n = len(rng);
  for (int i = 0; i < n; ++i) s += atoms[pick(rng)];
  return s;
}

// press and goto arguments are trimmed by the parser.
inline std::string trimmed_payload(std::mt19937& rng) {
  for (;;) {
    std::string s = random_payload(rng, false);
    auto b = s.find_first_not_of(" \t\n");
    if (b == std::string::npos) continue;
    auto e = s.find_last_not_of(" \t\n");
    return s.substr(b, e - b + 1);
  }
}

inline ParsedAction random_action(std::mt19937& rng) {
  std::uniform_int_distribution<int> kind(0, 11);
  std::uniform_int_distribution<std::int64_t> id(0, 100000);
  std::bernoulli_distribution coin(0.5);
  switch (kind(rng)) {
    case 0: return action::Click{id(rng)};
    case 1: return action::Hover{id(rng)};
    case 2: return action::Type{id(rng), random_payload(rng, true), coin(rng)};
    case 3: return action::Press{trimmed_payload(rng)};
    case 4: return action::Scroll{coin(rng) ? action::Direction::up : action::Direction::down};
    case 5: return action::NewTab{};
    case 6: return action::TabFocus{id(rng) % 16};
    case 7: return action::TabClose{};
    case 8: return action::Goto{trimmed_payload(rng)};
    case 9: return action::GoBack{};
    case 10: return action::GoForward{};
    default: return action::Stop{random_payload(rng, true)};
  }
}

// Per-site task counts and successes for the aggregation check; the overall
// rate these produce is 149/910.
struct SiteCounts {
  Site site;
  int tasks;
  int successes;
};
inline const std::vector<SiteCounts>& aggregation_site_counts() {
  static const std::vector<SiteCounts> counts = {
      {Site::classifieds, 234, 23}, {Site::reddit, 210, 36}, {Site::shopping, 466, 90}};
  return counts;
}

// Synthetic rows with the counts above. Difficulty and tags cycle
// deterministically so every breakdown cell is populated.
inline std::vector<TaskRow> synthetic_rows() {
  std::vector<TaskRow> rows;
  int serial = 0;
  for (const auto& c : aggregation_site_counts()) {
    for (int i = 0; i < c.tasks; ++i, ++serial) {
      TaskRow r;
      r.task_id = std::string(to_string(c.site)) + "_" + std::to_string(i);
      r.site = c.site;
      auto a = static_cast<Level>(1 + serial % 3);
      auto v = static_cast<Level>(1 + (serial / 3) % 3);
      r.difficulty = {a, v, derive_overall_difficulty(a, v)};
      if (serial % 4 == 0) r.subset_tags.insert(SubsetTag::image_input);
      if (serial % 7 == 0) r.subset_tags.insert(SubsetTag::ocr_required);
      if (serial % 11 == 0) r.subset_tags.insert(SubsetTag::exact_image_match);
      r.achievable = serial % 19 != 0;
      r.score = i < c.successes ? 1 : 0;
      r.steps = 1 + serial % 30;
      r.termination = Termination::stopped;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

}  // namespace webagent::testing
