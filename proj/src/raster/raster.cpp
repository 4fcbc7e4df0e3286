#include "lidarvt/raster.hpp"

#include <algorithm>
#include <string>

namespace lidarvt {

DemGrid::DemGrid(int width, int height, double gsd, float fill, std::optional<float> nodata)
    : DemGrid(width, height,
              std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                     static_cast<std::size_t>(std::max(height, 0)),
                                 fill),
              gsd, nodata) {}

DemGrid::DemGrid(int width, int height, std::vector<float> values, double gsd,
                 std::optional<float> nodata)
    : width_(width), height_(height), nodata_(nodata), values_(std::move(values)) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("raster dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("raster value count does not match width*height");
  set_gsd(gsd);
}

void DemGrid::set_gsd(double gsd) {
  if (!(gsd > 0.0) || !std::isfinite(gsd))
    throw std::invalid_argument("ground sample distance must be > 0");
  gsd_ = gsd;
}

bool DemGrid::has_nodata_cells() const {
  if (!nodata_) return false;
  return std::any_of(values_.begin(), values_.end(),
                     [this](float v) { return is_nodata_value(v); });
}

DemGrid DemGrid::like(float fill) const {
  DemGrid out(width_, height_, gsd_, fill, nodata_);
  out.origin_ = origin_;
  if (nodata_) {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (is_nodata_value(values_[i])) out.values_[i] = *nodata_;
  }
  return out;
}

MultiBandImage::MultiBandImage(int width, int height, std::vector<Band> bands,
                               std::vector<std::uint8_t> valid)
    : width_(width), height_(height), bands_(std::move(bands)), valid_(std::move(valid)) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("image dimensions must be positive");
  if (bands_.size() != 1 && bands_.size() != 3)
    throw std::invalid_argument("image must have 1 or 3 bands, got " +
                                std::to_string(bands_.size()));
  for (const auto& b : bands_)
    if (b.size() != pixel_count()) throw std::invalid_argument("band size mismatch");
  if (!valid_.empty() && valid_.size() != pixel_count())
    throw std::invalid_argument("validity mask size mismatch");
}

bool MultiBandImage::has_invalid_cells() const {
  return std::any_of(valid_.begin(), valid_.end(), [](std::uint8_t v) { return v == 0; });
}

void MultiBandImage::check_invariants() const {
  if (bands_.size() != 1 && bands_.size() != 3)
    throw std::logic_error("band count must be 1 or 3");
  for (const auto& b : bands_) {
    if (b.size() != pixel_count()) throw std::logic_error("band size mismatch");
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!is_valid(i)) continue;
      if (!(b[i] >= 0.0f && b[i] <= 1.0f))
        throw std::logic_error("band value outside [0,1]: " + std::to_string(b[i]));
    }
  }
}

MultiBandImage MultiBandImage::stack(const std::vector<const MultiBandImage*>& singles) {
  if (singles.empty()) throw std::invalid_argument("nothing to stack");
  const int w = singles.front()->width();
  const int h = singles.front()->height();
  std::vector<Band> bands;
  std::vector<std::uint8_t> valid;
  for (const auto* img : singles) {
    if (img->width() != w || img->height() != h)
      throw std::invalid_argument("cannot stack images of different shapes");
    for (std::size_t b = 0; b < img->band_count(); ++b)
      bands.emplace_back(img->band(b).begin(), img->band(b).end());
    if (!img->valid_.empty()) {
      if (valid.empty()) valid.assign(img->pixel_count(), 1);
      for (std::size_t i = 0; i < valid.size(); ++i) valid[i] &= img->valid_[i];
    }
  }
  return MultiBandImage(w, h, std::move(bands), std::move(valid));
}

LabelGrid::LabelGrid(int width, int height, std::uint8_t fill)
    : LabelGrid(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              static_cast<std::size_t>(std::max(height, 0)),
                                          fill)) {}

LabelGrid::LabelGrid(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("label raster dimensions must be positive");
  if (labels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("label count does not match width*height");
}

int FocalWindow::half_width(int drow) const {
  const int a = std::abs(drow);
  if (a > radius) return -1;
  if (shape == WindowShape::square) return radius;
  const int r2 = radius * radius - a * a;
  int w = static_cast<int>(std::sqrt(static_cast<double>(r2)));
  while (w * w > r2) --w;
  while ((w + 1) * (w + 1) <= r2) ++w;
  return w;
}

}  // namespace lidarvt
