#include "webagent/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>

#include "webagent/text_util.hpp"

namespace webagent {

Raster::Raster(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative raster size");
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
  }
}

Rgb Raster::at(int x, int y) const {
  auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Raster::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

void Raster::fill_rect(const Rect& r, Rgb c) {
  int x0 = std::max(r.x, 0), y0 = std::max(r.y, 0);
  int x1 = std::min(r.x + r.width, width_), y1 = std::min(r.y + r.height, height_);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) set(x, y, c);
}

void Raster::stroke_rect(const Rect& r, Rgb c, int t) {
  fill_rect({r.x, r.y, r.width, t}, c);
  fill_rect({r.x, r.y + r.height - t, r.width, t}, c);
  fill_rect({r.x, r.y, t, r.height}, c);
  fill_rect({r.x + r.width - t, r.y, t, r.height}, c);
}

void Raster::blit_scaled(const Raster& src, const Rect& dst) {
  if (src.empty() || dst.empty()) return;
  for (int dy = 0; dy < dst.height; ++dy) {
    int ty = dst.y + dy;
    if (ty < 0 || ty >= height_) continue;
    int sy = static_cast<int>(static_cast<long long>(dy) * src.height() / dst.height);
    for (int dx = 0; dx < dst.width; ++dx) {
      int tx = dst.x + dx;
      if (tx < 0 || tx >= width_) continue;
      int sx = static_cast<int>(static_cast<long long>(dx) * src.width() / dst.width);
      set(tx, ty, src.at(sx, sy));
    }
  }
}

namespace {

// 5x7 glyphs for digits; each row is 5 bits, MSB on the left.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kDigitGlyphs = {{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

std::array<std::uint8_t, 7> glyph_for(unsigned char c) {
  if (c >= '0' && c <= '9') return kDigitGlyphs[c - '0'];
  std::array<std::uint8_t, 7> g{};
  if (c == ' ') return g;
  // Placeholder pattern hashed from the character.
  std::uint32_t h = 2166136261u ^ c;
  for (int row = 0; row < 7; ++row) {
    h = (h ^ static_cast<std::uint32_t>(row + 1)) * 16777619u;
    g[row] = static_cast<std::uint8_t>((h >> 7) & 0x1F);
  }
  g[0] |= 0x04;
  g[6] |= 0x0A;
  return g;
}

}  // namespace

int Raster::text_width(std::string_view text, int scale) {
  return static_cast<int>(text.size()) * 6 * scale;
}

int Raster::draw_text(int x, int y, std::string_view text, Rgb c, int scale) {
  int pen = x;
  for (unsigned char ch : text) {
    auto g = glyph_for(ch);
    for (int row = 0; row < 7; ++row)
      for (int col = 0; col < 5; ++col)
        if (g[row] & (0x10 >> col)) fill_rect({pen + col * scale, y + row * scale, scale, scale}, c);
    pen += 6 * scale;
  }
  return pen - x;
}

std::string Raster::digest() const {
  std::string header = std::to_string(width_) + "x" + std::to_string(height_) + ":";
  std::string buf = header;
  buf.append(reinterpret_cast<const char*>(pixels_.data()), pixels_.size());
  return sha256_hex(buf);
}

namespace {

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

struct ReadCursor {
  std::span<const std::uint8_t> data;
  std::size_t offset = 0;
};

void png_read_from_span(png_structp png, png_bytep out, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->offset + length > cur->data.size()) png_error(png, "truncated PNG");
  std::memcpy(out, cur->data.data() + cur->offset, length);
  cur->offset += length;
}

void png_error_throw(png_structp, png_const_charp msg) { throw ImageDecodeError(msg); }
void png_warning_ignore(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const Raster& image) {
  std::vector<std::uint8_t> out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, png_write_to_vector, nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
                 static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 3);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_write_info(png, info);
    auto bytes = image.bytes();
    for (int y = 0; y < image.height(); ++y) {
      auto row = const_cast<std::uint8_t*>(bytes.data() + static_cast<std::size_t>(y) * image.width() * 3);
      png_write_row(png, row);
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

Raster decode_png(std::span<const std::uint8_t> data) {
  if (data.size() < 8 || png_sig_cmp(data.data(), 0, 8) != 0)
    throw ImageDecodeError("not a PNG image");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{data, 0};
  Raster result;
  try {
    png_set_read_fn(png, &cursor, png_read_from_span);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    int w = static_cast<int>(png_get_image_width(png, info));
    int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3) throw ImageDecodeError("unsupported PNG layout");
    Raster img(w, h);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 3);
    for (int y = 0; y < h; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (int x = 0; x < w; ++x) img.set(x, y, {row[x * 3], row[x * 3 + 1], row[x * 3 + 2]});
    }
    result = std::move(img);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return result;
}

Raster load_png(const std::string& path) {
  auto bytes = read_binary_file(path);
  return decode_png(bytes);
}

void save_png(const Raster& image, const std::string& path) {
  auto bytes = encode_png(image);
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Plane to_luma(const Raster& image) {
  Plane p{image.width(), image.height(), {}};
  p.values.resize(static_cast<std::size_t>(p.width) * p.height);
  auto bytes = image.bytes();
  for (std::size_t i = 0; i < p.values.size(); ++i)
    p.values[i] = 0.299 * bytes[3 * i] + 0.587 * bytes[3 * i + 1] + 0.114 * bytes[3 * i + 2];
  return p;
}

Plane resize_bilinear(const Plane& src, int width, int height) {
  if (src.width == width && src.height == height) return src;
  Plane dst{width, height, std::vector<double>(static_cast<std::size_t>(width) * height)};
  double sx = static_cast<double>(src.width) / width;
  double sy = static_cast<double>(src.height) / height;
  for (int y = 0; y < height; ++y) {
    double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height - 1));
    int y0 = static_cast<int>(std::floor(fy));
    int y1 = std::min(y0 + 1, src.height - 1);
    double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width - 1));
      int x0 = static_cast<int>(std::floor(fx));
      int x1 = std::min(x0 + 1, src.width - 1);
      double wx = fx - x0;
      double top = src.at(x0, y0) * (1 - wx) + src.at(x1, y0) * wx;
      double bottom = src.at(x0, y1) * (1 - wx) + src.at(x1, y1) * wx;
      dst.values[static_cast<std::size_t>(y) * width + x] = top * (1 - wy) + bottom * wy;
    }
  }
  return dst;
}

}  // namespace webagent
