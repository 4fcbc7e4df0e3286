#pragma once

#include "lidarvt/raster.hpp"
#include "lidarvt/vt_params.hpp"

namespace lidarvt {

/// Standard deviations below this count as zero variance (deviation 0).
inline constexpr double kDeviationEpsilon = 1e-6;
/// Deviations are mapped to [0,1] over [-kDeviationClip, +kDeviationClip].
inline constexpr double kDeviationClip = 3.0;

/// (z - mean) / std, or 0 when std < kDeviationEpsilon.
double deviation_from_mean(double z, double mean, double std);

/// clamp((dev + L) / 2L, 0, 1) with L = kDeviationClip.
double deviation_to_unit(double dev);

/**
 * Multiscale topographic position composite. For each scale range, every cell
 * takes the deviation from mean elevation (square windows) with the largest
 * magnitude over the range's radii; ties keep the smaller radius.
 * Bands are (broad, meso, local).
 */
MultiBandImage mstp(const DemGrid& grid, const VtParams& params);

/// mstp bands modulated by the stretched local relief L:
/// out = clamp(band * (1 + L), 0, 1), L = percentile_cut_stretch(slrm(grid)).
MultiBandImage e2mstp(const DemGrid& grid, const VtParams& params);

/// The fusion rule used by e2mstp for one sample.
inline float e2_fuse(float mstp_value, float luminance) {
  const double v = static_cast<double>(mstp_value) * (0.5 + 0.5 * static_cast<double>(luminance)) * 2.0;
  return static_cast<float>(v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v));
}

}  // namespace lidarvt
