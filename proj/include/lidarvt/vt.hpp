#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lidarvt/raster.hpp"
#include "lidarvt/vt_params.hpp"

namespace lidarvt {

/// A failure inside one visualisation; the message starts with the VT name
/// and the constituent that failed, e.g. "DSS: slrm: ...".
class VtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed display ranges used by VAT and DSS.
inline constexpr double kSlopeDisplayMaxDeg = 51.0;
inline constexpr double kOpennessDisplayMinDeg = 60.0;
inline constexpr double kOpennessDisplayMaxDeg = 120.0;
inline constexpr double kSvfDisplayMin = 0.64;

/// Band maps onto [0,1] (clamped).
double normalise_slope(double degrees);
double normalise_openness(double degrees);
double normalise_svf(double svf);

/**
 * Computes one visualisation of a DEM tile.
 *
 *  - DEM_C: percentile stretch of the tile.
 *  - DEM_S: DEM_C repeated in three bands.
 *  - SLRM: percentile stretch of the local relief model.
 *  - DSS: (DEM_C, normalised slope, stretched SLRM).
 *  - E2MSTP: e2mstp composite.
 *  - E2MSTP_1B: per-cell mean of the three E2MSTP bands.
 *  - VAT: (normalised slope, normalised openness, normalised sky-view factor).
 */
MultiBandImage compute_vt(VtName name, const DemGrid& tile, const VtParams& params = {});

/// Sidecar record stored next to every VT export.
nlohmann::json vt_sidecar(VtName name, const VtParams& params, const MultiBandImage& image);

}  // namespace lidarvt
