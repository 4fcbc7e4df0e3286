#include "lidarvt/focal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lidarvt {
namespace detail {

namespace {

double valid_mean(const DemGrid& grid) {
  double sum = 0.0;
  std::size_t n = 0;
  const auto v = grid.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (grid.is_nodata(i)) continue;
    sum += v[i];
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

void finish(FocalMoments& m, std::size_t i, double s, double sq, int n, double shift,
            bool want_std) {
  m.count[i] = n;
  if (n == 0) return;
  const double mean = s / n;
  m.mean[i] = mean + shift;
  if (want_std) {
    const double var = n > 1 ? std::max(0.0, sq / n - mean * mean) : 0.0;
    m.std[i] = std::sqrt(var);
  }
}

FocalMoments circle_moments(const DemGrid& grid, FocalWindow window, bool want_std) {
  const int w = grid.width(), h = grid.height();
  const std::size_t stride = static_cast<std::size_t>(w) + 1;
  const double shift = valid_mean(grid);

  std::vector<double> ps(stride * h, 0.0), pq(want_std ? stride * h : 0, 0.0);
  std::vector<int> pc(stride * h, 0);
  for (int r = 0; r < h; ++r) {
    const std::size_t base = static_cast<std::size_t>(r) * stride;
    for (int c = 0; c < w; ++c) {
      double v = 0.0;
      int valid = 0;
      if (!grid.is_nodata(r, c)) {
        v = grid(r, c) - shift;
        valid = 1;
      }
      ps[base + c + 1] = ps[base + c] + v;
      if (want_std) pq[base + c + 1] = pq[base + c] + v * v;
      pc[base + c + 1] = pc[base + c] + valid;
    }
  }

  const int rad = window.radius;
  std::vector<int> half(2 * rad + 1);
  for (int d = -rad; d <= rad; ++d) half[d + rad] = window.half_width(d);

  FocalMoments m;
  const std::size_t n = grid.size();
  m.mean.assign(n, 0.0);
  m.std.assign(want_std ? n : 0, 0.0);
  m.count.assign(n, 0);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = grid.index(r, c);
      if (grid.is_nodata(i)) continue;
      double s = 0.0, sq = 0.0;
      int cnt = 0;
      for (int d = -rad; d <= rad; ++d) {
        const int rr = r + d;
        if (rr < 0 || rr >= h) continue;
        const int hw = half[d + rad];
        const int c0 = std::max(0, c - hw);
        const int c1 = std::min(w - 1, c + hw);
        const std::size_t base = static_cast<std::size_t>(rr) * stride;
        s += ps[base + c1 + 1] - ps[base + c0];
        if (want_std) sq += pq[base + c1 + 1] - pq[base + c0];
        cnt += pc[base + c1 + 1] - pc[base + c0];
      }
      finish(m, i, s, sq, cnt, shift, want_std);
    }
  }
  return m;
}

}  // namespace

void check_window_fits(const DemGrid& grid, int radius, const char* what) {
  if (radius < 1) throw std::invalid_argument(std::string(what) + " radius must be >= 1");
  if (radius >= std::min(grid.width(), grid.height()))
    throw std::invalid_argument(std::string(what) + " radius " + std::to_string(radius) +
                                " must be smaller than the raster extent " +
                                std::to_string(std::min(grid.width(), grid.height())));
}

MomentTables::MomentTables(const DemGrid& grid)
    : grid_(grid), w_(grid.width()), h_(grid.height()), shift_(valid_mean(grid)) {
  const std::size_t stride = static_cast<std::size_t>(w_) + 1;
  const std::size_t cells = stride * (static_cast<std::size_t>(h_) + 1);
  sum_.assign(cells, 0.0);
  sumsq_.assign(cells, 0.0);
  count_.assign(cells, 0);
  for (int r = 0; r < h_; ++r) {
    double rs = 0.0, rq = 0.0;
    int rc = 0;
    for (int c = 0; c < w_; ++c) {
      if (!grid.is_nodata(r, c)) {
        const double v = grid(r, c) - shift_;
        rs += v;
        rq += v * v;
        ++rc;
      }
      const std::size_t at = (static_cast<std::size_t>(r) + 1) * stride + c + 1;
      const std::size_t up = static_cast<std::size_t>(r) * stride + c + 1;
      sum_[at] = sum_[up] + rs;
      sumsq_[at] = sumsq_[up] + rq;
      count_[at] = count_[up] + rc;
    }
  }
}

FocalMoments MomentTables::square(int radius, bool want_std) const {
  const std::size_t stride = static_cast<std::size_t>(w_) + 1;
  FocalMoments m;
  const std::size_t n = grid_.size();
  m.mean.assign(n, 0.0);
  m.std.assign(want_std ? n : 0, 0.0);
  m.count.assign(n, 0);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < h_; ++r) {
    const std::size_t r0 = static_cast<std::size_t>(std::max(0, r - radius));
    const std::size_t r1 = static_cast<std::size_t>(std::min(h_ - 1, r + radius)) + 1;
    for (int c = 0; c < w_; ++c) {
      const std::size_t i = grid_.index(r, c);
      if (grid_.is_nodata(i)) continue;
      const std::size_t c0 = static_cast<std::size_t>(std::max(0, c - radius));
      const std::size_t c1 = static_cast<std::size_t>(std::min(w_ - 1, c + radius)) + 1;
      auto box = [&](const auto& t) {
        return t[r1 * stride + c1] - t[r0 * stride + c1] - t[r1 * stride + c0] + t[r0 * stride + c0];
      };
      finish(m, i, box(sum_), want_std ? box(sumsq_) : 0.0, box(count_), shift_, want_std);
    }
  }
  return m;
}

FocalMoments focal_moments(const DemGrid& grid, FocalWindow window, bool want_std) {
  check_window_fits(grid, window.radius, "focal window");
  if (window.shape == WindowShape::square) return MomentTables(grid).square(window.radius, want_std);
  return circle_moments(grid, window, want_std);
}

}  // namespace detail

namespace {

DemGrid to_grid(const DemGrid& like, const std::vector<double>& values,
                const std::vector<int>& count) {
  // The centre is part of its own window, so empty windows only occur at
  // nodata centres, which like() has already filled.
  DemGrid out = like.like();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i)
    if (count[i] > 0) dst[i] = static_cast<float>(values[i]);
  return out;
}

}  // namespace

DemGrid focal_mean(const DemGrid& grid, FocalWindow window) {
  const auto m = detail::focal_moments(grid, window, false);
  return to_grid(grid, m.mean, m.count);
}

DemGrid focal_std(const DemGrid& grid, FocalWindow window) {
  const auto m = detail::focal_moments(grid, window, true);
  return to_grid(grid, m.std, m.count);
}

double quantile_sorted(const std::vector<double>& sorted, double pct) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(pct >= 0.0 && pct <= 100.0)) throw std::invalid_argument("percentile must be in [0,100]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * pct / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

MultiBandImage percentile_cut_stretch(const DemGrid& grid, double low_pct, double high_pct) {
  if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 100.0))
    throw std::invalid_argument("percentile cuts must satisfy 0 <= low < high <= 100");
  std::vector<double> sample;
  sample.reserve(grid.size());
  const auto v = grid.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!grid.is_nodata(i)) sample.push_back(v[i]);
  if (sample.empty()) throw std::invalid_argument("cannot stretch an all-nodata raster");
  std::sort(sample.begin(), sample.end());
  const double lo = quantile_sorted(sample, low_pct);
  const double hi = quantile_sorted(sample, high_pct);

  std::vector<float> band(grid.size(), 0.0f);
  std::vector<std::uint8_t> valid;
  if (grid.nodata()) valid.assign(grid.size(), 1);
  const double span = hi - lo;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (grid.is_nodata(i)) {
      valid[i] = 0;
      continue;
    }
    const double x = v[i];
    double out;
    if (span > 0.0) out = std::clamp((x - lo) / span, 0.0, 1.0);
    else out = x < lo ? 0.0 : (x > hi ? 1.0 : 0.5);
    band[i] = static_cast<float>(out);
  }
  std::vector<MultiBandImage::Band> bands;
  bands.push_back(std::move(band));
  return MultiBandImage(grid.width(), grid.height(), std::move(bands), std::move(valid));
}

}  // namespace lidarvt
