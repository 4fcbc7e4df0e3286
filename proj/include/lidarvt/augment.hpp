#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "lidarvt/dataset.hpp"
#include "lidarvt/raster.hpp"

namespace lidarvt {

enum class AugmentOp { vflip, hflip, rot45 };

struct AugmentationSpec {
  std::set<AugmentOp> ops{AugmentOp::vflip, AugmentOp::hflip, AugmentOp::rot45};
  double probability = 0.5;
  std::uint64_t seed = 0;
};

/// Which ops fire for one draw. One uniform is drawn per op in the fixed order
/// vflip, hflip, rot45 (disabled ops still consume their draw) from a
/// SplitMix64 stream seeded by derive_seed(seed, tile_id, draw_index); an op
/// fires when its uniform is < probability.
struct AugmentDraw {
  bool vflip = false;
  bool hflip = false;
  bool rot45 = false;
};

AugmentDraw draw_augmentation(const AugmentationSpec& spec, const std::string& tile_id,
                              std::uint64_t draw_index);

/// Plain float planes (one per band) sharing a mask; fired ops are applied in
/// the order vflip, hflip, rot45.
struct AugmentedPair {
  int width = 0;
  int height = 0;
  std::vector<std::vector<float>> planes;
  LabelGrid mask;
};

void flip_vertical(std::vector<float>& plane, int width, int height);
void flip_horizontal(std::vector<float>& plane, int width, int height);
void flip_vertical(LabelGrid& mask);
void flip_horizontal(LabelGrid& mask);

/// 45-degree counter-clockwise rotation about the tile centre. Images use
/// bilinear sampling with reflect padding, masks nearest-neighbour.
std::vector<float> rotate45(const std::vector<float>& plane, int width, int height);
LabelGrid rotate45(const LabelGrid& mask);

AugmentedPair augment(const TilePair& tile, const AugmentationSpec& spec, std::uint64_t draw_index);
AugmentedPair augment(const MultiBandImage& image, const LabelGrid& mask,
                      const std::string& tile_id, const AugmentationSpec& spec,
                      std::uint64_t draw_index);

}  // namespace lidarvt
