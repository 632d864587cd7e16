#include <gtest/gtest.h>

#include "test_support.hpp"
#include "webagent/evaluation.hpp"
#include "webagent/ssim.hpp"

namespace webagent {
namespace {

using testing::fixture_dir;

TEST(Ssim, IdentityIsOne) {
  std::mt19937 rng(1);
  for (int i = 0; i < 5; ++i) {
    Raster r = testing::random_raster(rng, 40 + i * 7, 30 + i * 5);
    EXPECT_NEAR(ssim(r, r), 1.0, 1e-9);
  }
  Raster flat(20, 20, {90, 90, 90});
  EXPECT_NEAR(ssim(flat, flat), 1.0, 1e-9);
}

TEST(Ssim, AgreesWithBruteForce) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> dim(12, 48);
  for (int i = 0; i < 20; ++i) {
    int w = dim(rng), h = dim(rng);
    Raster a = testing::random_raster(rng, w, h);
    Raster b = testing::random_raster(rng, w, h);
    EXPECT_NEAR(ssim(a, b), testing::reference_ssim(a, b), 1e-6) << w << "x" << h;
  }
}

TEST(Ssim, SmallImagesShrinkTheWindow) {
  std::mt19937 rng(5);
  Raster a = testing::random_raster(rng, 8, 9);
  Raster b = testing::random_raster(rng, 8, 9);
  EXPECT_NEAR(ssim(a, b), testing::reference_ssim(a, b), 1e-6);
}

TEST(Ssim, Symmetric) {
  std::mt19937 rng(3);
  for (int i = 0; i < 10; ++i) {
    Raster a = testing::random_raster(rng, 33, 27);
    Raster b = testing::random_raster(rng, 33, 27);
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-9);
  }
}

TEST(Ssim, RangeBounded) {
  std::mt19937 rng(11);
  for (int i = 0; i < 10; ++i) {
    Raster a = testing::random_raster(rng, 25, 25);
    Raster b = testing::random_raster(rng, 25, 25);
    double s = ssim(a, b);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

// Values computed with scikit-image's structural_similarity (gaussian
// weights, sigma 1.5, population covariance, data range 255) on BT.601 luma.
TEST(Ssim, MatchesFrozenFixtureValues) {
  const std::string media = fixture_dir() + "/sites/media/";
  Raster mountain = load_png(media + "classifieds/bike_mountain.png");
  Raster road = load_png(media + "classifieds/bike_road.png");
  EXPECT_NEAR(ssim(road, mountain), 0.5557796685233646, 1e-9);
  Raster cat = load_png(media + "forum/cat.png");
  Raster chain = load_png(media + "forum/chain.png");
  EXPECT_NEAR(ssim(cat, chain), 0.5291494156163865, 1e-9);
}

TEST(Ssim, QueryIsResizedToReference) {
  Raster big(64, 64, {200, 10, 10});
  big.fill_rect({0, 0, 32, 64}, {10, 10, 200});
  Raster small(32, 32, {200, 10, 10});
  small.fill_rect({0, 0, 16, 32}, {10, 10, 200});
  EXPECT_GT(ssim(big, small), 0.95);
}

TEST(Ssim, FuzzyImageMatchThreshold) {
  std::mt19937 rng(8);
  Raster a = testing::random_raster(rng, 30, 30);
  Raster b = testing::random_raster(rng, 30, 30);
  double s = ssim(a, b);
  EXPECT_EQ(eval_fuzzy_image_match(a, b, s), 1);
  EXPECT_EQ(eval_fuzzy_image_match(a, b, std::nextafter(s, 2.0)), 0);
  EXPECT_EQ(eval_fuzzy_image_match(a, a, 1.0), 1);
  EXPECT_THROW(eval_fuzzy_image_match(Raster(), a, 0.5), EvaluationError);
}

}  // namespace
}  // namespace webagent
