#pragma once

#include <vector>

#include "lidarvt/raster.hpp"
#include "lidarvt/vt_params.hpp"

namespace lidarvt {

/**
 * Slope angle in degrees from the 3x3 Horn gradient, distances scaled by gsd.
 *
 * Each of the three kernel rows (weights 1,2,1) contributes a central
 * difference, or a one-sided difference where a neighbour falls outside the
 * raster or is nodata; rows with no usable pair are dropped and the weights
 * renormalised. Interior cells reduce to the plain Horn stencil.
 */
DemGrid slope(const DemGrid& grid);

/// One sample of a horizon ray: pixel offset from the origin cell and its
/// distance in pixels.
struct RaySample {
  int drow = 0;
  int dcol = 0;
  double distance_px = 0.0;
};

/**
 * Sampling pattern for `directions` rays. Azimuth d points at 2*pi*d/n,
 * counter-clockwise from east (north-up, so rows grow southward). Step k
 * (1..radius) samples the nearest cell to k pixels along the ray; samples
 * whose cell lies farther than `radius_px` are dropped, as are repeats.
 */
std::vector<std::vector<RaySample>> horizon_rays(int directions, int radius_px);

/// Horizon elevation angles (radians) at one cell, one per direction.
/// Nodata samples are skipped; a ray without samples has angle 0.
std::vector<double> horizon_angles(const DemGrid& grid, int row, int col, const VtParams& params);

/// 1 - sum_d sin(max(gamma_d, 0)) / n, in [0,1].
DemGrid sky_view_factor(const DemGrid& grid, const VtParams& params);

/// Mean over directions of (90 deg - gamma_d), degrees.
DemGrid positive_openness(const DemGrid& grid, const VtParams& params);

/// Simple local relief model: grid minus its circular focal mean (metres).
DemGrid slrm(const DemGrid& grid, const VtParams& params);

namespace detail {

// Double-precision values behind the DemGrid results above; nodata cells
// hold 0. The public functions round these to float.
std::vector<double> slope_degrees(const DemGrid& grid);
std::vector<double> sky_view_factor_values(const DemGrid& grid, const VtParams& params);
std::vector<double> openness_degrees(const DemGrid& grid, const VtParams& params);
std::vector<double> slrm_values(const DemGrid& grid, const VtParams& params);

}  // namespace detail

}  // namespace lidarvt
