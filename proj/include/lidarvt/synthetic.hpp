#pragma once

#include <cstdint>

#include "lidarvt/dataset.hpp"
#include "lidarvt/raster.hpp"

namespace lidarvt {

/// A generated DEM with labelled features.
struct SyntheticScene {
  DemGrid dem;
  LabelGrid mask;
  ClassCatalog catalog;  ///< mound=1, ditch=2
};

/**
 * Rolling terrain with implanted round mounds (class 1) and ring ditches
 * (class 2). Mounds are 0.4-1.2 m cosine domes of radius 4-10 px, ditches
 * 0.3-0.8 m deep annuli of radius 8-16 px. Placement is seeded and features
 * never overlap.
 */
SyntheticScene synthetic_terrain(int size = 512, std::uint64_t seed = 0, double gsd = 0.5);

}  // namespace lidarvt
