#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lidarvt/raster.hpp"

namespace lidarvt {

class RasterIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RasterFormat { ascii_grid, geotiff, png };

/// Chooses the format from the file extension (.asc/.txt, .tif/.tiff, .png).
RasterFormat format_from_path(const std::filesystem::path& path);

struct ReadReport {
  bool gsd_defaulted = false;  ///< no cell size in the file; 1.0 was assumed
};

struct GeoRef {
  double gsd = 1.0;
  std::optional<GeoOrigin> origin;
};

inline GeoRef georef_of(const DemGrid& g) { return GeoRef{g.gsd(), g.origin()}; }

/// Single-band numeric raster. Multi-band files are rejected.
DemGrid read_raster(const std::filesystem::path& path, ReadReport* report = nullptr);

/// One- or three-band float raster (as written by write_raster for images).
/// Cells equal to the file's nodata sentinel become invalid.
MultiBandImage read_image(const std::filesystem::path& path, GeoRef* georef = nullptr);

/// Integer class-id raster; values must be whole numbers in [0,255].
LabelGrid read_labels(const std::filesystem::path& path);

/// A single-band prediction map in [0,1].
struct PredictionRaster {
  int width = 0;
  int height = 0;
  std::vector<float> values;
};

/// Reads a prediction file. 8-bit unsigned rasters are binary masks (nonzero
/// becomes 1.0); any other numeric type is read as probabilities unchanged.
/// Nodata cells are rejected.
PredictionRaster read_prediction(const std::filesystem::path& path);

void write_raster(const DemGrid& grid, const std::filesystem::path& path);

/// Float export for .asc/.tif (invalid cells get the -9999 sentinel), 8-bit for .png.
void write_raster(const MultiBandImage& image, const std::filesystem::path& path,
                  const GeoRef& georef = {});

/// 8-bit single-band class raster (.tif or .asc).
void write_labels(const LabelGrid& labels, const std::filesystem::path& path,
                  const GeoRef& georef = {});

/// Greyscale (1 band) or RGB (3 band) 8-bit PNG; invalid cells map to 0.
void write_png(const MultiBandImage& image, const std::filesystem::path& path);

/// value * 255 rounded half-up, clamped to [0,255].
std::uint8_t to_png_byte(float value);

inline constexpr float kImageNodata = -9999.0f;

}  // namespace lidarvt
