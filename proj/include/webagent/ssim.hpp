#pragma once

#include "webagent/image.hpp"

namespace webagent {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;
};

/// Mean structural similarity between `query` and `reference`.
///
/// Both images are reduced to BT.601 luma and `query` is bilinearly resampled
/// to the reference size. A normalized Gaussian window slides over every
/// position where it fits entirely inside the image; the result is the mean
/// of the per-window index. Images smaller than the window use the largest odd
/// window that fits.
double ssim(const Raster& query, const Raster& reference, const SsimParams& params = {});

/// Same measure on already-converted luma planes of identical size.
double ssim_planes(const Plane& a, const Plane& b, const SsimParams& params = {});

}  // namespace webagent
