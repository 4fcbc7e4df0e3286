// ESRI ASCII grid (.asc) codec.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "codec.hpp"

namespace lidarvt::detail {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool starts_numeric(std::string_view tok) {
  if (tok.empty()) return false;
  const char c = tok.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' ||
         lower(std::string(tok.substr(0, 3))) == "nan";
}

double parse_double(std::string_view tok, const std::filesystem::path& path) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw RasterIoError(path.string() + ": non-numeric value '" + std::string(tok) + "'");
  return v;
}

float parse_float(std::string_view tok, const std::filesystem::path& path) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  float v = 0.0f;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw RasterIoError(path.string() + ": non-numeric pixel value '" + std::string(tok) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

DecodedRaster read_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RasterIoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  DecodedRaster out;
  out.samples = 1;
  out.kind = SampleKind::ieee_float;
  out.bits = 32;

  std::optional<long> ncols, nrows;
  std::optional<double> xll, yll;
  bool x_center = false, y_center = false;

  std::size_t pos = 0;
  auto next_token = [&](std::size_t& p) -> std::string_view {
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    const std::size_t start = p;
    while (p < text.size() && !std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    return std::string_view(text).substr(start, p - start);
  };

  // Header: key/value pairs until the first numeric token.
  for (;;) {
    std::size_t probe = pos;
    const std::string_view key_tok = next_token(probe);
    if (key_tok.empty() || starts_numeric(key_tok)) break;
    const std::string key = lower(std::string(key_tok));
    const std::string_view value = next_token(probe);
    if (value.empty()) throw RasterIoError(path.string() + ": truncated header");
    pos = probe;
    if (key == "ncols") {
      ncols = static_cast<long>(parse_double(value, path));
    } else if (key == "nrows") {
      nrows = static_cast<long>(parse_double(value, path));
    } else if (key == "xllcorner" || key == "xllcenter") {
      xll = parse_double(value, path);
      x_center = key == "xllcenter";
    } else if (key == "yllcorner" || key == "yllcenter") {
      yll = parse_double(value, path);
      y_center = key == "yllcenter";
    } else if (key == "cellsize") {
      out.gsd = parse_double(value, path);
    } else if (key == "nodata_value") {
      out.nodata = static_cast<double>(parse_float(value, path));
    } else {
      throw RasterIoError(path.string() + ": unknown header key '" + key + "'");
    }
  }
  if (!ncols || !nrows || *ncols < 1 || *nrows < 1)
    throw RasterIoError(path.string() + ": missing or invalid ncols/nrows");
  if (out.gsd && !(*out.gsd > 0.0)) throw RasterIoError(path.string() + ": cellsize must be > 0");

  out.width = static_cast<int>(*ncols);
  out.height = static_cast<int>(*nrows);
  if (xll && yll) {
    const double half = out.gsd.value_or(1.0) / 2.0;
    out.origin = GeoOrigin{x_center ? *xll - half : *xll, y_center ? *yll - half : *yll};
  }

  const std::size_t n = static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.height);
  std::vector<double> values;
  values.reserve(n);
  for (;;) {
    const std::string_view tok = next_token(pos);
    if (tok.empty()) break;
    if (values.size() == n)
      throw RasterIoError(path.string() + ": more values than ncols*nrows");
    values.push_back(static_cast<double>(parse_float(tok, path)));
  }
  if (values.size() != n)
    throw RasterIoError(path.string() + ": expected " + std::to_string(n) + " values, found " +
                        std::to_string(values.size()));
  out.bands.push_back(std::move(values));
  return out;
}

void write_ascii_grid(const EncodeRequest& req, const std::filesystem::path& path) {
  const bool bytes = req.byte_band != nullptr;
  if (!bytes && req.float_bands.size() != 1)
    throw RasterIoError("ASCII grids hold a single band; got " +
                        std::to_string(req.float_bands.size()) + " bands for " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RasterIoError("cannot write " + path.string());

  const GeoOrigin origin = req.georef.origin.value_or(GeoOrigin{});
  out << "ncols " << req.width << "\n"
      << "nrows " << req.height << "\n"
      << "xllcorner " << format_double(origin.x) << "\n"
      << "yllcorner " << format_double(origin.y) << "\n"
      << "cellsize " << format_double(req.georef.gsd) << "\n";
  if (req.nodata) out << "NODATA_value " << format_double(*req.nodata) << "\n";

  std::string line;
  char buf[32];
  for (int r = 0; r < req.height; ++r) {
    line.clear();
    for (int c = 0; c < req.width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * req.width + c;
      std::to_chars_result res;
      if (bytes)
        res = std::to_chars(buf, buf + sizeof buf, static_cast<int>(req.byte_band[i]));
      else
        res = std::to_chars(buf, buf + sizeof buf, req.float_bands[0][i]);
      if (c) line.push_back(' ');
      line.append(buf, res.ptr);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw RasterIoError("write failed for " + path.string());
}

}  // namespace lidarvt::detail
