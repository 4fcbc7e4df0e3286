#pragma once

#include <vector>

#include "lidarvt/raster.hpp"

namespace lidarvt {

/// Mean of the non-nodata cells inside `window` (centre included). Windows are
/// truncated at the raster edge; an all-nodata window yields nodata.
/// Throws std::invalid_argument if the radius is not smaller than both extents.
DemGrid focal_mean(const DemGrid& grid, FocalWindow window);

/// Population standard deviation over the same windows as focal_mean.
DemGrid focal_std(const DemGrid& grid, FocalWindow window);

/// Type-7 quantile (linear interpolation between order statistics) of an
/// ascending-sorted sample; `pct` in [0,100].
double quantile_sorted(const std::vector<double>& sorted, double pct);

/**
 * Linear stretch between the low_pct and high_pct quantiles of the valid
 * cells, clamped to [0,1]. A degenerate range (hi == lo) maps cells equal to
 * it to 0.5, lower cells to 0 and higher cells to 1.
 */
MultiBandImage percentile_cut_stretch(const DemGrid& grid, double low_pct, double high_pct);

namespace detail {

/// Focal moments in double precision, row-major. `count` is the number of
/// valid cells in each window (0 for nodata centres and all-nodata windows).
struct FocalMoments {
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<int> count;
};

/// Summed-area tables over valid cells, shifted by the grid mean, so that any
/// square window's moments come out in O(1).
class MomentTables {
 public:
  explicit MomentTables(const DemGrid& grid);

  /// Moments of the square window of `radius` around every cell.
  FocalMoments square(int radius, bool want_std) const;

 private:
  const DemGrid& grid_;
  int w_, h_;
  double shift_ = 0.0;
  std::vector<double> sum_, sumsq_;
  std::vector<int> count_;
};

FocalMoments focal_moments(const DemGrid& grid, FocalWindow window, bool want_std);

void check_window_fits(const DemGrid& grid, int radius, const char* what);

}  // namespace detail

}  // namespace lidarvt
