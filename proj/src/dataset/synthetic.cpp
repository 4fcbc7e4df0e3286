#include "lidarvt/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lidarvt/rng.hpp"

namespace lidarvt {

namespace {

struct Feature {
  double cx, cy;
  double radius;  // outer radius in pixels
  double height;  // positive for mounds, depth for ditches
  bool ditch;
};

}  // namespace

SyntheticScene synthetic_terrain(int size, std::uint64_t seed, double gsd) {
  if (size < 64) throw std::invalid_argument("synthetic terrain needs size >= 64");
  if (!(gsd > 0.0)) throw std::invalid_argument("gsd must be > 0");

  SplitMix64 rng(derive_seed(seed, "synthetic-terrain", 0));
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

  // Background: a gentle tilt plus two long-wavelength undulations.
  const double tilt_x = in(-0.02, 0.02), tilt_y = in(-0.02, 0.02);
  const double a1 = in(1.0, 3.0), a2 = in(0.5, 1.5);
  const double w1 = 2.0 * std::numbers::pi / in(150.0, 300.0);
  const double w2 = 2.0 * std::numbers::pi / in(80.0, 160.0);
  const double p1 = in(0.0, 6.0), p2 = in(0.0, 6.0);

  std::vector<Feature> features;
  const int target = size * size / 4096;  // about 64 on a 512 grid
  for (int attempt = 0; attempt < target * 50 && static_cast<int>(features.size()) < target;
       ++attempt) {
    Feature f;
    f.ditch = rng.uniform() < 0.4;
    f.radius = f.ditch ? in(8.0, 16.0) : in(4.0, 10.0);
    f.height = f.ditch ? in(0.3, 0.8) : in(0.4, 1.2);
    f.cx = in(f.radius + 2.0, size - f.radius - 3.0);
    f.cy = in(f.radius + 2.0, size - f.radius - 3.0);
    bool clear = true;
    for (const auto& g : features)
      if (std::hypot(f.cx - g.cx, f.cy - g.cy) < f.radius + g.radius + 4.0) {
        clear = false;
        break;
      }
    if (clear) features.push_back(f);
  }

  SyntheticScene scene{DemGrid(size, size, gsd), LabelGrid(size, size, 0),
                       ClassCatalog({{1, "mound"}, {2, "ditch"}})};
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      double z = 100.0 + tilt_x * c + tilt_y * r + a1 * std::sin(w1 * c + p1) * std::cos(w1 * r) +
                 a2 * std::sin(w2 * (c + r) + p2);
      for (const auto& f : features) {
        const double d = std::hypot(c - f.cx, r - f.cy);
        if (d >= f.radius) continue;
        if (!f.ditch) {
          z += f.height * 0.5 * (1.0 + std::cos(std::numbers::pi * d / f.radius));
          scene.mask(r, c) = 1;
        } else {
          // Annulus between 0.6 and 1.0 of the radius, cosine profile across.
          const double inner = 0.6 * f.radius;
          if (d > inner) {
            const double t = (d - inner) / (f.radius - inner);
            z -= f.height * std::sin(std::numbers::pi * t);
            scene.mask(r, c) = 2;
          }
        }
      }
      scene.dem(r, c) = static_cast<float>(z);
    }
  }
  return scene;
}

}  // namespace lidarvt
