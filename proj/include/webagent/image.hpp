#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace webagent {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Rect {
  int x = 0, y = 0, width = 0, height = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
  bool empty() const { return width <= 0 || height <= 0; }
  bool intersects(const Rect& o) const {
    return x < o.x + o.width && o.x < x + width && y < o.y + o.height && o.y < y + height;
  }
  bool contains(int px, int py) const {
    return px >= x && px < x + width && py >= y && py < y + height;
  }
};

class ImageDecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 8-bit RGB raster, row-major, no padding.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Rgb fill = {255, 255, 255});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }
  std::span<const std::uint8_t> bytes() const { return pixels_; }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);

  void fill_rect(const Rect& r, Rgb c);
  void stroke_rect(const Rect& r, Rgb c, int thickness = 1);
  /// Nearest-neighbour scaled copy of `src` into `dst`, clipped to this raster.
  void blit_scaled(const Raster& src, const Rect& dst);
  /// Draws text with the built-in 5x7 bitmap font; returns the advance in px.
  int draw_text(int x, int y, std::string_view text, Rgb c, int scale = 1);
  static int text_width(std::string_view text, int scale = 1);

  /// Stable content digest over dimensions and pixels.
  std::string digest() const;

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

std::vector<std::uint8_t> encode_png(const Raster& image);
Raster decode_png(std::span<const std::uint8_t> data);
Raster load_png(const std::string& path);
void save_png(const Raster& image, const std::string& path);

/// Single-channel double plane used by the similarity metrics.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// ITU-R BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
Plane to_luma(const Raster& image);

/// Bilinear resampling with pixel-center alignment and edge clamping.
Plane resize_bilinear(const Plane& src, int width, int height);

}  // namespace webagent
