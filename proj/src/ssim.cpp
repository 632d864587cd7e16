#include "webagent/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace webagent {

namespace {

std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  double center = (size - 1) / 2.0;
  double sum = 0;
  for (int i = 0; i < size; ++i) {
    double d = i - center;
    k[i] = std::exp(-(d * d) / (2 * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable weighted window sums over the "valid" region.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& k) {
  int n = static_cast<int>(k.size());
  int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      const double* p = &src[static_cast<std::size_t>(y) * w + x];
      for (int i = 0; i < n; ++i) acc += k[i] * p[i];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  return out;
}

}  // namespace

double ssim_planes(const Plane& a, const Plane& b, const SsimParams& params) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("ssim_planes: size mismatch");
  if (a.width == 0 || a.height == 0) throw std::invalid_argument("ssim_planes: empty image");
  int window = std::min({params.window, a.width, a.height});
  if (window % 2 == 0) --window;
  auto kernel = gaussian_kernel(window, params.sigma);

  const int w = a.width, h = a.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a.values[i] * a.values[i];
    bb[i] = b.values[i] * b.values[i];
    ab[i] = a.values[i] * b.values[i];
  }
  auto mu_a = filter_valid(a.values, w, h, kernel);
  auto mu_b = filter_valid(b.values, w, h, kernel);
  auto e_aa = filter_valid(aa, w, h, kernel);
  auto e_bb = filter_valid(bb, w, h, kernel);
  auto e_ab = filter_valid(ab, w, h, kernel);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    double ma = mu_a[i], mb = mu_b[i];
    double var_a = e_aa[i] - ma * ma;
    double var_b = e_bb[i] - mb * mb;
    double cov = e_ab[i] - ma * mb;
    total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

double ssim(const Raster& query, const Raster& reference, const SsimParams& params) {
  if (query.empty() || reference.empty()) throw std::invalid_argument("ssim: empty image");
  auto ref = to_luma(reference);
  auto q = resize_bilinear(to_luma(query), ref.width, ref.height);
  return ssim_planes(q, ref, params);
}

}  // namespace webagent
