#pragma once

// Format codecs behind raster_io. Pixels are decoded into doubles, which hold
// every supported sample type exactly.

#include <filesystem>
#include <optional>
#include <vector>

#include "lidarvt/raster_io.hpp"

namespace lidarvt::detail {

enum class SampleKind { unsigned_int, signed_int, ieee_float };

struct DecodedRaster {
  int width = 0;
  int height = 0;
  int samples = 1;
  SampleKind kind = SampleKind::ieee_float;
  int bits = 32;
  std::optional<double> gsd;
  std::optional<GeoOrigin> origin;
  std::optional<double> nodata;
  std::vector<std::vector<double>> bands;
};

struct EncodeRequest {
  int width = 0;
  int height = 0;
  SampleKind kind = SampleKind::ieee_float;
  int bits = 32;  // 32 for float, 8 for unsigned
  GeoRef georef;
  std::optional<double> nodata;
  std::vector<const float*> float_bands;
  const std::uint8_t* byte_band = nullptr;
};

DecodedRaster read_ascii_grid(const std::filesystem::path& path);
void write_ascii_grid(const EncodeRequest& req, const std::filesystem::path& path);

DecodedRaster read_geotiff(const std::filesystem::path& path);
void write_geotiff(const EncodeRequest& req, const std::filesystem::path& path);

}  // namespace lidarvt::detail
