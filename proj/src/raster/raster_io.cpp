#include "lidarvt/raster_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "codec.hpp"

namespace lidarvt {

using detail::DecodedRaster;
using detail::EncodeRequest;
using detail::SampleKind;

namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

DecodedRaster decode(const std::filesystem::path& path) {
  switch (format_from_path(path)) {
    case RasterFormat::ascii_grid: return detail::read_ascii_grid(path);
    case RasterFormat::geotiff: return detail::read_geotiff(path);
    case RasterFormat::png: break;
  }
  throw RasterIoError(path.string() + ": PNG is an export-only format");
}

void encode(const EncodeRequest& req, const std::filesystem::path& path) {
  switch (format_from_path(path)) {
    case RasterFormat::ascii_grid: return detail::write_ascii_grid(req, path);
    case RasterFormat::geotiff: return detail::write_geotiff(req, path);
    case RasterFormat::png: break;
  }
  throw RasterIoError(path.string() + ": use write_png for PNG export");
}

}  // namespace

RasterFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".asc" || ext == ".txt") return RasterFormat::ascii_grid;
  if (ext == ".tif" || ext == ".tiff") return RasterFormat::geotiff;
  if (ext == ".png") return RasterFormat::png;
  throw RasterIoError("unsupported raster extension '" + ext + "' for " + path.string());
}

DemGrid read_raster(const std::filesystem::path& path, ReadReport* report) {
  DecodedRaster d = decode(path);
  if (d.samples != 1)
    throw RasterIoError(path.string() + ": expected a single-band raster, found " +
                        std::to_string(d.samples) + " bands");
  std::vector<float> values(d.bands[0].size());
  std::transform(d.bands[0].begin(), d.bands[0].end(), values.begin(),
                 [](double v) { return static_cast<float>(v); });
  std::optional<float> nodata;
  if (d.nodata) nodata = static_cast<float>(*d.nodata);
  if (report) report->gsd_defaulted = !d.gsd.has_value();
  DemGrid grid(d.width, d.height, std::move(values), d.gsd.value_or(1.0), nodata);
  grid.set_origin(d.origin);
  return grid;
}

MultiBandImage read_image(const std::filesystem::path& path, GeoRef* georef) {
  DecodedRaster d = decode(path);
  if (d.samples != 1 && d.samples != 3)
    throw RasterIoError(path.string() + ": images must have 1 or 3 bands");
  const std::size_t n = d.bands[0].size();
  std::vector<std::uint8_t> valid;
  std::vector<MultiBandImage::Band> bands;
  for (const auto& src : d.bands) {
    MultiBandImage::Band band(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = src[i];
      const bool is_nodata = d.nodata && (std::isnan(*d.nodata) ? std::isnan(v) : v == *d.nodata);
      if (is_nodata) {
        if (valid.empty()) valid.assign(n, 1);
        valid[i] = 0;
        band[i] = 0.0f;
      } else {
        band[i] = static_cast<float>(v);
      }
    }
    bands.push_back(std::move(band));
  }
  if (georef) *georef = GeoRef{d.gsd.value_or(1.0), d.origin};
  return MultiBandImage(d.width, d.height, std::move(bands), std::move(valid));
}

LabelGrid read_labels(const std::filesystem::path& path) {
  DecodedRaster d = decode(path);
  if (d.samples != 1)
    throw RasterIoError(path.string() + ": label rasters must be single-band");
  std::vector<std::uint8_t> labels(d.bands[0].size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = d.bands[0][i];
    if (!(v >= 0.0 && v <= 255.0) || v != std::floor(v))
      throw RasterIoError(path.string() + ": label value " + std::to_string(v) +
                          " is not a class id in [0,255]");
    labels[i] = static_cast<std::uint8_t>(v);
  }
  return LabelGrid(d.width, d.height, std::move(labels));
}

PredictionRaster read_prediction(const std::filesystem::path& path) {
  DecodedRaster d = decode(path);
  if (d.samples != 1)
    throw RasterIoError(path.string() + ": predictions must be single-band");
  const bool binary = d.kind == SampleKind::unsigned_int && d.bits == 8;
  PredictionRaster out{d.width, d.height, std::vector<float>(d.bands[0].size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double v = d.bands[0][i];
    if (d.nodata && (v == *d.nodata || (std::isnan(*d.nodata) && std::isnan(v))))
      throw RasterIoError(path.string() + ": predictions must not contain nodata cells");
    out.values[i] = binary ? (v != 0.0 ? 1.0f : 0.0f) : static_cast<float>(v);
  }
  return out;
}

void write_raster(const DemGrid& grid, const std::filesystem::path& path) {
  EncodeRequest req;
  req.width = grid.width();
  req.height = grid.height();
  req.georef = georef_of(grid);
  if (grid.nodata()) req.nodata = static_cast<double>(*grid.nodata());
  req.float_bands.push_back(grid.values().data());
  encode(req, path);
}

void write_raster(const MultiBandImage& image, const std::filesystem::path& path,
                  const GeoRef& georef) {
  if (format_from_path(path) == RasterFormat::png) return write_png(image, path);
  std::vector<std::vector<float>> staged;
  EncodeRequest req;
  req.width = image.width();
  req.height = image.height();
  req.georef = georef;
  const bool masked = image.has_invalid_cells();
  if (masked) req.nodata = static_cast<double>(kImageNodata);
  for (std::size_t b = 0; b < image.band_count(); ++b) {
    auto band = image.band(b);
    if (!masked) {
      req.float_bands.push_back(band.data());
      continue;
    }
    std::vector<float> copy(band.begin(), band.end());
    for (std::size_t i = 0; i < copy.size(); ++i)
      if (!image.is_valid(i)) copy[i] = kImageNodata;
    staged.push_back(std::move(copy));
  }
  for (const auto& s : staged) req.float_bands.push_back(s.data());
  encode(req, path);
}

void write_labels(const LabelGrid& labels, const std::filesystem::path& path,
                  const GeoRef& georef) {
  EncodeRequest req;
  req.width = labels.width();
  req.height = labels.height();
  req.georef = georef;
  req.kind = SampleKind::unsigned_int;
  req.bits = 8;
  req.byte_band = labels.labels().data();
  encode(req, path);
}

std::uint8_t to_png_byte(float value) {
  const double scaled = std::floor(static_cast<double>(value) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

void write_png(const MultiBandImage& image, const std::filesystem::path& path) {
  const std::size_t bands = image.band_count();
  if (bands != 1 && bands != 3)
    throw RasterIoError("PNG export supports 1 or 3 bands, got " + std::to_string(bands));
  const std::size_t n = image.pixel_count();
  std::vector<png_byte> buffer(n * bands);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < bands; ++b)
      buffer[i * bands + b] = image.is_valid(i) ? to_png_byte(image.band(b)[i]) : 0;

  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = bands == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  const std::string file = path.string();
  if (!png_image_write_to_file(&png, file.c_str(), 0, buffer.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw RasterIoError("PNG write failed for " + file + ": " + msg);
  }
}

}  // namespace lidarvt
