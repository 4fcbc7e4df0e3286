#include "lidarvt/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lidarvt/rng.hpp"

namespace lidarvt {

namespace {

// Mirror a continuous coordinate into [0, n-1] without repeating the edge sample.
double reflect(double x, int n) {
  if (n == 1) return 0.0;
  const double period = 2.0 * (n - 1);
  x = std::fmod(std::abs(x), period);
  return x > n - 1 ? period - x : x;
}

// Source coordinates for output pixel (row, col) under the 45-degree rotation.
struct SourcePoint {
  double x, y;
};

SourcePoint rot45_source(int row, int col, int width, int height) {
  static const double kCos = std::cos(std::numbers::pi / 4.0);
  static const double kSin = std::sin(std::numbers::pi / 4.0);
  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  // Rows grow downward, so a visually counter-clockwise turn samples from
  // (x cos - y sin, x sin + y cos) in row-down coordinates.
  const double x = col - cx, y = row - cy;
  return {reflect(cx + kCos * x - kSin * y, width), reflect(cy + kSin * x + kCos * y, height)};
}

}  // namespace

AugmentDraw draw_augmentation(const AugmentationSpec& spec, const std::string& tile_id,
                              std::uint64_t draw_index) {
  if (!(spec.probability >= 0.0 && spec.probability <= 1.0))
    throw std::invalid_argument("augmentation probability must be in [0,1]");
  SplitMix64 rng(derive_seed(spec.seed, tile_id, draw_index));
  AugmentDraw d;
  const double uv = rng.uniform(), uh = rng.uniform(), ur = rng.uniform();
  d.vflip = spec.ops.count(AugmentOp::vflip) && uv < spec.probability;
  d.hflip = spec.ops.count(AugmentOp::hflip) && uh < spec.probability;
  d.rot45 = spec.ops.count(AugmentOp::rot45) && ur < spec.probability;
  return d;
}

void flip_vertical(std::vector<float>& plane, int width, int height) {
  for (int r = 0; r < height / 2; ++r)
    std::swap_ranges(plane.begin() + static_cast<std::ptrdiff_t>(r) * width,
                     plane.begin() + static_cast<std::ptrdiff_t>(r + 1) * width,
                     plane.begin() + static_cast<std::ptrdiff_t>(height - 1 - r) * width);
}

void flip_horizontal(std::vector<float>& plane, int width, int height) {
  for (int r = 0; r < height; ++r) {
    auto row = plane.begin() + static_cast<std::ptrdiff_t>(r) * width;
    std::reverse(row, row + width);
  }
}

void flip_vertical(LabelGrid& mask) {
  auto l = mask.labels();
  const int w = mask.width(), h = mask.height();
  for (int r = 0; r < h / 2; ++r)
    std::swap_ranges(l.begin() + static_cast<std::ptrdiff_t>(r) * w,
                     l.begin() + static_cast<std::ptrdiff_t>(r + 1) * w,
                     l.begin() + static_cast<std::ptrdiff_t>(h - 1 - r) * w);
}

void flip_horizontal(LabelGrid& mask) {
  auto l = mask.labels();
  const int w = mask.width();
  for (int r = 0; r < mask.height(); ++r) {
    auto row = l.begin() + static_cast<std::ptrdiff_t>(r) * w;
    std::reverse(row, row + w);
  }
}

std::vector<float> rotate45(const std::vector<float>& plane, int width, int height) {
  std::vector<float> out(plane.size());
  auto at = [&](int r, int c) { return static_cast<double>(plane[static_cast<std::size_t>(r) * width + c]); };
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const auto [x, y] = rot45_source(r, c, width, height);
      const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
      const int x1 = std::min(x0 + 1, width - 1), y1 = std::min(y0 + 1, height - 1);
      const double fx = x - x0, fy = y - y0;
      const double top = at(y0, x0) + fx * (at(y0, x1) - at(y0, x0));
      const double bottom = at(y1, x0) + fx * (at(y1, x1) - at(y1, x0));
      out[static_cast<std::size_t>(r) * width + c] = static_cast<float>(top + fy * (bottom - top));
    }
  }
  return out;
}

LabelGrid rotate45(const LabelGrid& mask) {
  LabelGrid out(mask.width(), mask.height(), 0);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      const auto [x, y] = rot45_source(r, c, mask.width(), mask.height());
      out(r, c) = mask(static_cast<int>(std::lround(y)), static_cast<int>(std::lround(x)));
    }
  }
  return out;
}

namespace {

AugmentedPair apply(AugmentedPair pair, const AugmentDraw& d) {
  if (d.vflip) {
    for (auto& p : pair.planes) flip_vertical(p, pair.width, pair.height);
    flip_vertical(pair.mask);
  }
  if (d.hflip) {
    for (auto& p : pair.planes) flip_horizontal(p, pair.width, pair.height);
    flip_horizontal(pair.mask);
  }
  if (d.rot45) {
    for (auto& p : pair.planes) p = rotate45(p, pair.width, pair.height);
    pair.mask = rotate45(pair.mask);
  }
  return pair;
}

}  // namespace

AugmentedPair augment(const TilePair& tile, const AugmentationSpec& spec, std::uint64_t draw_index) {
  AugmentedPair pair;
  pair.width = tile.dem.width();
  pair.height = tile.dem.height();
  pair.planes.emplace_back(tile.dem.values().begin(), tile.dem.values().end());
  pair.mask = tile.mask;
  return apply(std::move(pair), draw_augmentation(spec, tile.tile_id, draw_index));
}

AugmentedPair augment(const MultiBandImage& image, const LabelGrid& mask, const std::string& tile_id,
                      const AugmentationSpec& spec, std::uint64_t draw_index) {
  if (image.width() != mask.width() || image.height() != mask.height())
    throw std::invalid_argument("image and mask dimensions differ");
  AugmentedPair pair;
  pair.width = image.width();
  pair.height = image.height();
  for (std::size_t b = 0; b < image.band_count(); ++b)
    pair.planes.emplace_back(image.band(b).begin(), image.band(b).end());
  pair.mask = mask;
  return apply(std::move(pair), draw_augmentation(spec, tile_id, draw_index));
}

}  // namespace lidarvt
