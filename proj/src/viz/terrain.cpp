#include "lidarvt/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "lidarvt/focal.hpp"

namespace lidarvt {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Weighted average of per-row central/one-sided differences along one axis.
// `at(offset_across, offset_along)` yields (valid, z).
template <typename Sample>
double truncated_horn_derivative(Sample at, double gsd) {
  double num = 0.0, den = 0.0;
  for (int across = -1; across <= 1; ++across) {
    const double weight = across == 0 ? 2.0 : 1.0;
    const auto [lo_ok, lo] = at(across, -1);
    const auto [mid_ok, mid] = at(across, 0);
    const auto [hi_ok, hi] = at(across, 1);
    double d;
    if (lo_ok && hi_ok) d = (hi - lo) / (2.0 * gsd);
    else if (hi_ok && mid_ok) d = (hi - mid) / gsd;
    else if (lo_ok && mid_ok) d = (mid - lo) / gsd;
    else continue;
    num += weight * d;
    den += weight;
  }
  return den > 0.0 ? num / den : 0.0;
}

// Sum over directions of f(tan of the horizon angle) for every cell. The
// tangent is -inf for rays without valid samples.
template <typename Contribution>
std::vector<double> sum_over_directions(const DemGrid& grid, const VtParams& params,
                                        Contribution f) {
  const int w = grid.width(), h = grid.height();
  const auto rays = horizon_rays(params.svf_directions, params.svf_radius_px);
  const double gsd = grid.gsd();

  std::vector<double> z(grid.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = grid.is_nodata(i) ? kNegInf : static_cast<double>(grid.values()[i]);

  std::vector<double> total(grid.size(), 0.0);
  constexpr int kBlockRows = 16;
  const int blocks = (h + kBlockRows - 1) / kBlockRows;

#pragma omp parallel
  {
    std::vector<double> tmax(static_cast<std::size_t>(kBlockRows) * w);
#pragma omp for schedule(static)
    for (int b = 0; b < blocks; ++b) {
      const int r0 = b * kBlockRows;
      const int r1 = std::min(h, r0 + kBlockRows);
      for (const auto& ray : rays) {
        std::fill(tmax.begin(), tmax.end(), kNegInf);
        for (const auto& s : ray) {
          const double dist = s.distance_px * gsd;
          const int j0 = std::max(0, -s.dcol);
          const int j1 = std::min(w, w - s.dcol);
          for (int r = r0; r < r1; ++r) {
            const int rs = r + s.drow;
            if (rs < 0 || rs >= h) continue;
            const double* src = z.data() + static_cast<std::size_t>(rs) * w + s.dcol;
            const double* ctr = z.data() + static_cast<std::size_t>(r) * w;
            double* tm = tmax.data() + static_cast<std::size_t>(r - r0) * w;
            for (int j = j0; j < j1; ++j) {
              const double t = (src[j] - ctr[j]) / dist;
              tm[j] = t > tm[j] ? t : tm[j];
            }
          }
        }
        for (int r = r0; r < r1; ++r) {
          double* out = total.data() + static_cast<std::size_t>(r) * w;
          const double* tm = tmax.data() + static_cast<std::size_t>(r - r0) * w;
          for (int j = 0; j < w; ++j) out[j] += f(tm[j]);
        }
      }
    }
  }
  return total;
}

void check_horizon_params(const VtParams& params) {
  if (params.svf_directions < 4 || params.svf_directions % 2 != 0)
    throw std::invalid_argument("svf_directions must be even and >= 4");
  if (params.svf_radius_px < 1) throw std::invalid_argument("svf_radius_px must be >= 1");
}

DemGrid finish_grid(const DemGrid& grid, const std::vector<double>& values) {
  DemGrid out = grid.like();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    if (!grid.is_nodata(i)) dst[i] = static_cast<float>(values[i]);
  return out;
}

}  // namespace

namespace detail {

std::vector<double> slope_degrees(const DemGrid& grid) {
  if (grid.width() < 3 || grid.height() < 3)
    throw std::invalid_argument("slope needs a raster of at least 3x3 cells");
  const int w = grid.width(), h = grid.height();
  const double gsd = grid.gsd();
  std::vector<double> deg(grid.size(), 0.0);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (grid.is_nodata(r, c)) continue;
      auto cell = [&](int rr, int cc) -> std::pair<bool, double> {
        if (!grid.in_bounds(rr, cc) || grid.is_nodata(rr, cc)) return {false, 0.0};
        return {true, grid(rr, cc)};
      };
      // x grows eastward (columns), y grows northward (decreasing rows).
      const double p = truncated_horn_derivative(
          [&](int across, int along) { return cell(r + across, c + along); }, gsd);
      const double q = truncated_horn_derivative(
          [&](int across, int along) { return cell(r - along, c + across); }, gsd);
      deg[grid.index(r, c)] = std::atan(std::sqrt(p * p + q * q)) * kRadToDeg;
    }
  }
  return deg;
}

}  // namespace detail

DemGrid slope(const DemGrid& grid) { return finish_grid(grid, detail::slope_degrees(grid)); }

std::vector<std::vector<RaySample>> horizon_rays(int directions, int radius_px) {
  if (directions < 1 || radius_px < 1)
    throw std::invalid_argument("horizon rays need directions >= 1 and radius >= 1");
  std::vector<std::vector<RaySample>> rays(directions);
  for (int d = 0; d < directions; ++d) {
    const double az = 2.0 * std::numbers::pi * d / directions;
    const double dx = std::cos(az), dy = std::sin(az);
    std::set<std::pair<int, int>> seen;
    for (int k = 1; k <= radius_px; ++k) {
      const int dcol = static_cast<int>(std::lround(k * dx));
      const int drow = -static_cast<int>(std::lround(k * dy));
      const double dist = std::sqrt(static_cast<double>(dcol * dcol + drow * drow));
      if (dist > radius_px) continue;
      if (!seen.emplace(drow, dcol).second) continue;
      rays[d].push_back({drow, dcol, dist});
    }
  }
  return rays;
}

std::vector<double> horizon_angles(const DemGrid& grid, int row, int col, const VtParams& params) {
  check_horizon_params(params);
  if (!grid.in_bounds(row, col))
    throw std::out_of_range("cell (" + std::to_string(row) + "," + std::to_string(col) +
                            ") is outside the raster");
  const auto rays = horizon_rays(params.svf_directions, params.svf_radius_px);
  const double z0 = grid(row, col);
  std::vector<double> gamma(rays.size(), 0.0);
  for (std::size_t d = 0; d < rays.size(); ++d) {
    double best = kNegInf;
    for (const auto& s : rays[d]) {
      const int r = row + s.drow, c = col + s.dcol;
      if (!grid.in_bounds(r, c)) break;
      if (grid.is_nodata(r, c)) continue;
      const double t = (static_cast<double>(grid(r, c)) - z0) / (s.distance_px * grid.gsd());
      best = std::max(best, std::atan(t));
    }
    gamma[d] = best == kNegInf ? 0.0 : best;
  }
  return gamma;
}

namespace detail {

std::vector<double> sky_view_factor_values(const DemGrid& grid, const VtParams& params) {
  check_horizon_params(params);
  // sin(atan(t)) = t / sqrt(1 + t^2) for the positive horizons.
  const auto sum = sum_over_directions(grid, params, [](double t) {
    return t > 0.0 ? t / std::sqrt(1.0 + t * t) : 0.0;
  });
  const double n = params.svf_directions;
  std::vector<double> svf(sum.size(), 0.0);
  for (std::size_t i = 0; i < sum.size(); ++i)
    if (!grid.is_nodata(i)) svf[i] = std::clamp(1.0 - sum[i] / n, 0.0, 1.0);
  return svf;
}

std::vector<double> openness_degrees(const DemGrid& grid, const VtParams& params) {
  check_horizon_params(params);
  const auto sum = sum_over_directions(grid, params, [](double t) {
    return t == kNegInf ? 90.0 : 90.0 - std::atan(t) * kRadToDeg;
  });
  const double n = params.svf_directions;
  std::vector<double> open(sum.size(), 0.0);
  for (std::size_t i = 0; i < sum.size(); ++i)
    if (!grid.is_nodata(i)) open[i] = sum[i] / n;
  return open;
}

std::vector<double> slrm_values(const DemGrid& grid, const VtParams& params) {
  check_window_fits(grid, params.slrm_radius_px, "slrm");
  const auto m = focal_moments(grid, FocalWindow(params.slrm_radius_px, WindowShape::circle), false);
  std::vector<double> relief(grid.size(), 0.0);
  const auto v = grid.values();
  for (std::size_t i = 0; i < relief.size(); ++i)
    if (m.count[i] > 0 && !grid.is_nodata(i)) relief[i] = static_cast<double>(v[i]) - m.mean[i];
  return relief;
}

}  // namespace detail

DemGrid sky_view_factor(const DemGrid& grid, const VtParams& params) {
  return finish_grid(grid, detail::sky_view_factor_values(grid, params));
}

DemGrid positive_openness(const DemGrid& grid, const VtParams& params) {
  return finish_grid(grid, detail::openness_degrees(grid, params));
}

DemGrid slrm(const DemGrid& grid, const VtParams& params) {
  return finish_grid(grid, detail::slrm_values(grid, params));
}

}  // namespace lidarvt
