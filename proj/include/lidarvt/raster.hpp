#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lidarvt {

/// Map-space position of the lower-left corner of a raster.
struct GeoOrigin {
  double x = 0.0;
  double y = 0.0;
};

/**
 * Single-band elevation raster (metres), row-major with row 0 at the north edge.
 *
 * Cells equal to the nodata sentinel are excluded from every statistic and
 * stay nodata in derived outputs.
 */
class DemGrid {
 public:
  DemGrid() = default;
  DemGrid(int width, int height, double gsd = 1.0, float fill = 0.0f,
          std::optional<float> nodata = std::nullopt);
  DemGrid(int width, int height, std::vector<float> values, double gsd = 1.0,
          std::optional<float> nodata = std::nullopt);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  double gsd() const { return gsd_; }
  const std::optional<float>& nodata() const { return nodata_; }
  const std::optional<GeoOrigin>& origin() const { return origin_; }

  void set_gsd(double gsd);
  void set_nodata(std::optional<float> nodata) { nodata_ = nodata; }
  void set_origin(std::optional<GeoOrigin> origin) { origin_ = origin; }

  float operator()(int row, int col) const { return values_[index(row, col)]; }
  float& operator()(int row, int col) { return values_[index(row, col)]; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }

  bool in_bounds(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }

  bool is_nodata_value(float v) const {
    if (!nodata_) return false;
    if (std::isnan(*nodata_)) return std::isnan(v);
    return v == *nodata_;
  }
  bool is_nodata(int row, int col) const { return is_nodata_value((*this)(row, col)); }
  bool is_nodata(std::size_t i) const { return is_nodata_value(values_[i]); }
  bool has_nodata_cells() const;

  /// Empty grid of the same geometry and nodata sentinel; nodata cells are copied over.
  DemGrid like(float fill = 0.0f) const;

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double gsd_ = 1.0;
  std::optional<float> nodata_;
  std::optional<GeoOrigin> origin_;
  std::vector<float> values_;
};

/**
 * One- or three-band raster normalised to [0,1].
 *
 * Invalid (nodata) cells are tracked by a shared validity mask; an empty mask
 * means every cell is valid.
 */
class MultiBandImage {
 public:
  using Band = std::vector<float>;

  MultiBandImage() = default;
  MultiBandImage(int width, int height, std::vector<Band> bands,
                 std::vector<std::uint8_t> valid = {});

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t band_count() const { return bands_.size(); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const float> band(std::size_t b) const { return bands_.at(b); }
  std::span<float> band(std::size_t b) { return bands_.at(b); }
  float at(std::size_t b, int row, int col) const {
    return bands_[b][static_cast<std::size_t>(row) * width_ + col];
  }

  bool is_valid(std::size_t i) const { return valid_.empty() || valid_[i] != 0; }
  const std::vector<std::uint8_t>& validity() const { return valid_; }
  bool has_invalid_cells() const;

  /// Checks the band-count, shape and [0,1] invariants; throws std::logic_error.
  void check_invariants() const;

  static MultiBandImage stack(const std::vector<const MultiBandImage*>& singles);

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Band> bands_;
  std::vector<std::uint8_t> valid_;
};

/// Integer class-id raster (0 = background).
class LabelGrid {
 public:
  LabelGrid() = default;
  LabelGrid(int width, int height, std::uint8_t fill = 0);
  LabelGrid(int width, int height, std::vector<std::uint8_t> labels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }

  std::uint8_t operator()(int row, int col) const {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::uint8_t& operator()(int row, int col) {
    return labels_[static_cast<std::size_t>(row) * width_ + col];
  }
  std::span<const std::uint8_t> labels() const { return labels_; }
  std::span<std::uint8_t> labels() { return labels_; }

  bool operator==(const LabelGrid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> labels_;
};

enum class WindowShape { square, circle };

struct FocalWindow {
  int radius = 1;
  WindowShape shape = WindowShape::square;

  FocalWindow() = default;
  FocalWindow(int r, WindowShape s) : radius(r), shape(s) {
    if (r < 1) throw std::invalid_argument("focal window radius must be >= 1");
  }

  /// Half-width of the window row at vertical offset `drow`; -1 if the row is outside.
  int half_width(int drow) const;
  bool contains(int drow, int dcol) const {
    if (shape == WindowShape::square) return std::abs(drow) <= radius && std::abs(dcol) <= radius;
    return drow * drow + dcol * dcol <= radius * radius;
  }
};

}  // namespace lidarvt
