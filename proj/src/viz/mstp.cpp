#include "lidarvt/mstp.hpp"

#include <algorithm>
#include <cmath>

#include "lidarvt/focal.hpp"
#include "lidarvt/terrain.hpp"

namespace lidarvt {

double deviation_from_mean(double z, double mean, double std) {
  return std < kDeviationEpsilon ? 0.0 : (z - mean) / std;
}

double deviation_to_unit(double dev) {
  return std::clamp((dev + kDeviationClip) / (2.0 * kDeviationClip), 0.0, 1.0);
}

MultiBandImage mstp(const DemGrid& grid, const VtParams& params) {
  params.validate();
  detail::check_window_fits(grid, params.largest_mstp_radius(), "mstp");

  const detail::MomentTables tables(grid);
  const auto values = grid.values();
  const std::size_t n = grid.size();

  std::vector<MultiBandImage::Band> bands;
  for (const auto* range : {&params.mstp_broad, &params.mstp_meso, &params.mstp_local}) {
    std::vector<double> best(n, 0.0);
    bool first = true;
    for (int radius : range->radii()) {
      const auto m = tables.square(radius, true);
      for (std::size_t i = 0; i < n; ++i) {
        if (m.count[i] == 0) continue;
        const double dev = deviation_from_mean(values[i], m.mean[i], m.std[i]);
        if (first || std::abs(dev) > std::abs(best[i])) best[i] = dev;
      }
      first = false;
    }
    MultiBandImage::Band band(n, 0.0f);
    for (std::size_t i = 0; i < n; ++i)
      if (!grid.is_nodata(i)) band[i] = static_cast<float>(deviation_to_unit(best[i]));
    bands.push_back(std::move(band));
  }

  std::vector<std::uint8_t> valid;
  if (grid.nodata()) {
    valid.assign(n, 1);
    for (std::size_t i = 0; i < n; ++i)
      if (grid.is_nodata(i)) valid[i] = 0;
  }
  return MultiBandImage(grid.width(), grid.height(), std::move(bands), std::move(valid));
}

MultiBandImage e2mstp(const DemGrid& grid, const VtParams& params) {
  MultiBandImage composite = mstp(grid, params);
  const MultiBandImage luminance =
      percentile_cut_stretch(slrm(grid, params), params.cut_low_pct, params.cut_high_pct);
  const auto lum = luminance.band(0);
  for (std::size_t b = 0; b < composite.band_count(); ++b) {
    auto band = composite.band(b);
    for (std::size_t i = 0; i < band.size(); ++i)
      if (composite.is_valid(i)) band[i] = e2_fuse(band[i], lum[i]);
  }
  return composite;
}

}  // namespace lidarvt
