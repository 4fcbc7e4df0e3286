// Baseline GeoTIFF codec: classic (32-bit offset) TIFF, uncompressed, strip or
// tile layout, chunky or planar samples. Georeferencing comes from the
// ModelPixelScale / ModelTiepoint tags and GDAL's nodata tag.

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "codec.hpp"

namespace lidarvt::detail {
namespace {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kTileLength = 323,
  kTileOffsets = 324,
  kTileByteCounts = 325,
  kExtraSamples = 338,
  kSampleFormat = 339,
  kModelPixelScale = 33550,
  kModelTiepoint = 33922,
  kGeoKeyDirectory = 34735,
  kGdalNodata = 42113,
};

enum FieldType : std::uint16_t {
  kByte = 1, kAscii = 2, kShort = 3, kLong = 4, kRational = 5,
  kSByte = 6, kUndefined = 7, kSShort = 8, kSLong = 9, kSRational = 10,
  kFloat = 11, kDouble = 12,
};

std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case kByte: case kAscii: case kSByte: case kUndefined: return 1;
    case kShort: case kSShort: return 2;
    case kLong: case kSLong: case kFloat: return 4;
    case kRational: case kSRational: case kDouble: return 8;
    default: return 0;
  }
}

class Reader {
 public:
  Reader(std::string bytes, std::filesystem::path path)
      : data_(std::move(bytes)), path_(std::move(path)) {
    if (data_.size() < 8) fail("file too short");
    if (data_[0] == 'I' && data_[1] == 'I') big_endian_ = false;
    else if (data_[0] == 'M' && data_[1] == 'M') big_endian_ = true;
    else fail("not a TIFF file");
    const auto magic = u16(2);
    if (magic == 43) fail("BigTIFF is not supported");
    if (magic != 42) fail("bad TIFF magic number");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw RasterIoError(path_.string() + ": " + what);
  }

  void need(std::size_t off, std::size_t len) const {
    if (off > data_.size() || len > data_.size() - off) fail("truncated file");
  }

  std::uint64_t read_uint(std::size_t off, std::size_t len) const {
    need(off, len);
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < len; ++k) {
      const auto b = static_cast<std::uint8_t>(data_[off + k]);
      if (big_endian_) v = (v << 8) | b;
      else v |= static_cast<std::uint64_t>(b) << (8 * k);
    }
    return v;
  }
  std::uint16_t u16(std::size_t off) const { return static_cast<std::uint16_t>(read_uint(off, 2)); }
  std::uint32_t u32(std::size_t off) const { return static_cast<std::uint32_t>(read_uint(off, 4)); }

  struct Entry {
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t value_offset = 0;  // where the value bytes live
  };

  std::map<std::uint16_t, Entry> read_first_ifd() const {
    const std::size_t ifd = u32(4);
    const std::uint16_t n = u16(ifd);
    std::map<std::uint16_t, Entry> entries;
    for (std::uint16_t k = 0; k < n; ++k) {
      const std::size_t e = ifd + 2 + 12 * static_cast<std::size_t>(k);
      Entry entry;
      const auto tag = u16(e);
      entry.type = u16(e + 2);
      entry.count = u32(e + 4);
      const std::size_t bytes = type_size(entry.type) * entry.count;
      entry.value_offset = bytes <= 4 ? e + 8 : u32(e + 8);
      if (type_size(entry.type) != 0) need(entry.value_offset, bytes);
      entries[tag] = entry;
    }
    return entries;
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    out.reserve(e.count);
    const std::size_t sz = type_size(e.type);
    for (std::uint32_t k = 0; k < e.count; ++k) {
      const std::size_t off = e.value_offset + k * sz;
      switch (e.type) {
        case kByte: case kUndefined: out.push_back(static_cast<double>(read_uint(off, 1))); break;
        case kSByte: out.push_back(static_cast<std::int8_t>(read_uint(off, 1))); break;
        case kShort: out.push_back(u16(off)); break;
        case kSShort: out.push_back(static_cast<std::int16_t>(u16(off))); break;
        case kLong: out.push_back(u32(off)); break;
        case kSLong: out.push_back(static_cast<std::int32_t>(u32(off))); break;
        case kRational: out.push_back(static_cast<double>(u32(off)) / u32(off + 4)); break;
        case kSRational:
          out.push_back(static_cast<double>(static_cast<std::int32_t>(u32(off))) /
                        static_cast<std::int32_t>(u32(off + 4)));
          break;
        case kFloat: out.push_back(std::bit_cast<float>(u32(off))); break;
        case kDouble: out.push_back(std::bit_cast<double>(read_uint(off, 8))); break;
        default: fail("unsupported TIFF field type " + std::to_string(e.type));
      }
    }
    return out;
  }

  std::string ascii(const Entry& e) const {
    need(e.value_offset, e.count);
    std::string s = data_.substr(e.value_offset, e.count);
    while (!s.empty() && (s.back() == '\0' || s.back() == ' ')) s.pop_back();
    return s;
  }

  double sample(std::size_t off, SampleKind kind, int bits) const {
    const std::size_t len = static_cast<std::size_t>(bits / 8);
    const std::uint64_t raw = read_uint(off, len);
    switch (kind) {
      case SampleKind::unsigned_int: return static_cast<double>(raw);
      case SampleKind::signed_int: {
        const std::uint64_t sign = std::uint64_t{1} << (bits - 1);
        const auto v = static_cast<std::int64_t>(raw ^ sign) - static_cast<std::int64_t>(sign);
        return static_cast<double>(v);
      }
      case SampleKind::ieee_float:
        if (bits == 32) return std::bit_cast<float>(static_cast<std::uint32_t>(raw));
        return std::bit_cast<double>(raw);
    }
    return 0.0;
  }

 private:
  std::string data_;
  std::filesystem::path path_;
  bool big_endian_ = false;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RasterIoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Little-endian byte sink used by the writer.
struct Sink {
  std::string bytes;
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void put(std::uint64_t v, int len) {
    for (int k = 0; k < len; ++k) bytes.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  }
  void align() {
    if (bytes.size() % 2) bytes.push_back('\0');
  }
};

struct OutEntry {
  std::uint16_t tag;
  std::uint16_t type;
  std::uint32_t count;
  std::string payload;  // little-endian value bytes
};

template <typename T>
std::string pack(const std::vector<T>& values, int len) {
  Sink s;
  for (const auto& v : values) {
    if constexpr (std::is_floating_point_v<T>) s.f64(v);
    else s.put(static_cast<std::uint64_t>(v), len);
  }
  return s.bytes;
}

}  // namespace

DecodedRaster read_geotiff(const std::filesystem::path& path) {
  Reader rd(slurp(path), path);
  const auto entries = rd.read_first_ifd();
  auto get = [&](std::uint16_t tag) -> const Reader::Entry* {
    auto it = entries.find(tag);
    return it == entries.end() ? nullptr : &it->second;
  };
  auto scalar = [&](std::uint16_t tag, double fallback) {
    const auto* e = get(tag);
    if (!e) return fallback;
    const auto v = rd.numbers(*e);
    return v.empty() ? fallback : v.front();
  };

  DecodedRaster out;
  if (!get(kImageWidth) || !get(kImageLength)) rd.fail("missing image dimensions");
  out.width = static_cast<int>(scalar(kImageWidth, 0));
  out.height = static_cast<int>(scalar(kImageLength, 0));
  if (out.width < 1 || out.height < 1) rd.fail("invalid image dimensions");
  out.samples = static_cast<int>(scalar(kSamplesPerPixel, 1));
  if (out.samples < 1) rd.fail("invalid SamplesPerPixel");

  if (scalar(kCompression, 1) != 1) rd.fail("compressed TIFFs are not supported");
  if (scalar(kPredictor, 1) != 1) rd.fail("TIFF predictors are not supported");

  out.bits = static_cast<int>(scalar(kBitsPerSample, 1));
  if (const auto* e = get(kBitsPerSample)) {
    for (double b : rd.numbers(*e))
      if (static_cast<int>(b) != out.bits) rd.fail("mixed BitsPerSample is not supported");
  }
  const int format = static_cast<int>(scalar(kSampleFormat, 1));
  switch (format) {
    case 1: out.kind = SampleKind::unsigned_int; break;
    case 2: out.kind = SampleKind::signed_int; break;
    case 3: out.kind = SampleKind::ieee_float; break;
    default: rd.fail("non-numeric pixel type (SampleFormat " + std::to_string(format) + ")");
  }
  const bool bits_ok = out.kind == SampleKind::ieee_float
                           ? (out.bits == 32 || out.bits == 64)
                           : (out.bits == 8 || out.bits == 16 || out.bits == 32);
  if (!bits_ok) rd.fail("unsupported BitsPerSample " + std::to_string(out.bits));

  const bool planar = scalar(kPlanarConfig, 1) == 2;
  const std::size_t bps = static_cast<std::size_t>(out.bits / 8);

  // Block geometry: strips are tiles as wide as the image.
  const bool tiled = get(kTileWidth) != nullptr;
  int block_w = out.width, block_h = out.height;
  std::vector<double> offsets, counts;
  if (tiled) {
    block_w = static_cast<int>(scalar(kTileWidth, 0));
    block_h = static_cast<int>(scalar(kTileLength, 0));
    if (!get(kTileOffsets)) rd.fail("missing TileOffsets");
    offsets = rd.numbers(*get(kTileOffsets));
  } else {
    block_h = static_cast<int>(std::min<double>(scalar(kRowsPerStrip, out.height), out.height));
    if (!get(kStripOffsets)) rd.fail("missing StripOffsets");
    offsets = rd.numbers(*get(kStripOffsets));
  }
  if (block_w < 1 || block_h < 1) rd.fail("invalid block size");
  const int across = (out.width + block_w - 1) / block_w;
  const int down = (out.height + block_h - 1) / block_h;
  const std::size_t per_plane = static_cast<std::size_t>(across) * down;
  if (offsets.size() != per_plane * (planar ? out.samples : 1))
    rd.fail("block offset count does not match the image layout");

  const std::size_t npix = static_cast<std::size_t>(out.width) * out.height;
  out.bands.assign(out.samples, std::vector<double>(npix));
  const int planes = planar ? out.samples : 1;
  const int spp_in_block = planar ? 1 : out.samples;
  for (int plane = 0; plane < planes; ++plane) {
    for (int by = 0; by < down; ++by) {
      for (int bx = 0; bx < across; ++bx) {
        const std::size_t base =
            static_cast<std::size_t>(offsets[plane * per_plane + by * across + bx]);
        for (int r = 0; r < block_h; ++r) {
          const int row = by * block_h + r;
          if (row >= out.height) break;
          for (int c = 0; c < block_w; ++c) {
            const int col = bx * block_w + c;
            if (col >= out.width) break;
            const std::size_t px = static_cast<std::size_t>(r) * block_w + c;
            const std::size_t dst = static_cast<std::size_t>(row) * out.width + col;
            for (int s = 0; s < spp_in_block; ++s) {
              const std::size_t off = base + (px * spp_in_block + s) * bps;
              out.bands[planar ? plane : s][dst] = rd.sample(off, out.kind, out.bits);
            }
          }
        }
      }
    }
  }

  if (const auto* e = get(kModelPixelScale)) {
    const auto scale = rd.numbers(*e);
    if (!scale.empty() && scale[0] > 0) out.gsd = scale[0];
  }
  if (const auto* e = get(kModelTiepoint)) {
    const auto tp = rd.numbers(*e);
    if (tp.size() >= 6) {
      const double g = out.gsd.value_or(1.0);
      const double ulx = tp[3] - tp[0] * g;
      const double uly = tp[4] + tp[1] * g;
      out.origin = GeoOrigin{ulx, uly - out.height * g};
    }
  }
  if (const auto* e = get(kGdalNodata)) {
    const std::string s = rd.ascii(*e);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc()) out.nodata = v;
    else if (s == "nan" || s == "NaN") out.nodata = std::nan("");
  }
  return out;
}

void write_geotiff(const EncodeRequest& req, const std::filesystem::path& path) {
  const bool bytes = req.byte_band != nullptr;
  const int spp = bytes ? 1 : static_cast<int>(req.float_bands.size());
  if (spp < 1) throw RasterIoError("no bands to write to " + path.string());
  const int bits = bytes ? 8 : 32;
  const std::size_t bps = static_cast<std::size_t>(bits / 8);
  const std::size_t row_bytes = static_cast<std::size_t>(req.width) * spp * bps;
  const int rows_per_strip = static_cast<int>(std::max<std::size_t>(1, 65536 / row_bytes));
  const int nstrips = (req.height + rows_per_strip - 1) / rows_per_strip;

  Sink s;
  s.bytes = "II";
  s.u16(42);
  s.u32(0);  // IFD offset, patched below

  std::vector<std::uint32_t> strip_offsets, strip_counts;
  for (int st = 0; st < nstrips; ++st) {
    strip_offsets.push_back(static_cast<std::uint32_t>(s.bytes.size()));
    const int r0 = st * rows_per_strip;
    const int r1 = std::min(req.height, r0 + rows_per_strip);
    for (int r = r0; r < r1; ++r) {
      for (int c = 0; c < req.width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * req.width + c;
        if (bytes) {
          s.bytes.push_back(static_cast<char>(req.byte_band[i]));
        } else {
          for (int b = 0; b < spp; ++b) s.u32(std::bit_cast<std::uint32_t>(req.float_bands[b][i]));
        }
      }
    }
    strip_counts.push_back(static_cast<std::uint32_t>(s.bytes.size() - strip_offsets.back()));
  }
  s.align();

  std::vector<OutEntry> entries;
  auto add = [&](std::uint16_t tag, std::uint16_t type, std::uint32_t count, std::string payload) {
    entries.push_back({tag, type, count, std::move(payload)});
  };
  add(kImageWidth, kLong, 1, pack(std::vector<std::uint32_t>{std::uint32_t(req.width)}, 4));
  add(kImageLength, kLong, 1, pack(std::vector<std::uint32_t>{std::uint32_t(req.height)}, 4));
  add(kBitsPerSample, kShort, spp, pack(std::vector<std::uint16_t>(spp, bits), 2));
  add(kCompression, kShort, 1, pack(std::vector<std::uint16_t>{1}, 2));
  add(kPhotometric, kShort, 1, pack(std::vector<std::uint16_t>{1}, 2));
  add(kStripOffsets, kLong, nstrips, pack(strip_offsets, 4));
  add(kSamplesPerPixel, kShort, 1, pack(std::vector<std::uint16_t>{std::uint16_t(spp)}, 2));
  add(kRowsPerStrip, kLong, 1, pack(std::vector<std::uint32_t>{std::uint32_t(rows_per_strip)}, 4));
  add(kStripByteCounts, kLong, nstrips, pack(strip_counts, 4));
  add(kPlanarConfig, kShort, 1, pack(std::vector<std::uint16_t>{1}, 2));
  if (spp > 1) add(kExtraSamples, kShort, spp - 1, pack(std::vector<std::uint16_t>(spp - 1, 0), 2));
  add(kSampleFormat, kShort, spp, pack(std::vector<std::uint16_t>(spp, bytes ? 1 : 3), 2));
  add(kModelPixelScale, kDouble, 3, pack(std::vector<double>{req.georef.gsd, req.georef.gsd, 0.0}, 8));
  if (req.georef.origin) {
    const auto& o = *req.georef.origin;
    const double uly = o.y + req.height * req.georef.gsd;
    add(kModelTiepoint, kDouble, 6, pack(std::vector<double>{0, 0, 0, o.x, uly, 0}, 8));
  }
  // Version 1.1.0, one key: GTRasterTypeGeoKey = RasterPixelIsArea.
  add(kGeoKeyDirectory, kShort, 8,
      pack(std::vector<std::uint16_t>{1, 1, 0, 1, 1025, 0, 1, 1}, 2));
  if (req.nodata) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, *req.nodata);
    std::string text(buf, res.ptr);
    text.push_back('\0');
    add(kGdalNodata, kAscii, static_cast<std::uint32_t>(text.size()), text);
  }

  const std::size_t ifd_offset = s.bytes.size();
  std::size_t extra = ifd_offset + 2 + 12 * entries.size() + 4;
  std::string overflow;
  Sink ifd;
  ifd.u16(static_cast<std::uint16_t>(entries.size()));
  for (const auto& e : entries) {
    ifd.u16(e.tag);
    ifd.u16(e.type);
    ifd.u32(e.count);
    if (e.payload.size() <= 4) {
      std::string inline_bytes = e.payload;
      inline_bytes.resize(4, '\0');
      ifd.bytes += inline_bytes;
    } else {
      ifd.u32(static_cast<std::uint32_t>(extra + overflow.size()));
      overflow += e.payload;
      if (overflow.size() % 2) overflow.push_back('\0');
    }
  }
  ifd.u32(0);
  s.bytes += ifd.bytes;
  s.bytes += overflow;
  if (s.bytes.size() > 0xffffffffULL) throw RasterIoError("raster too large for classic TIFF");
  for (int k = 0; k < 4; ++k)
    s.bytes[4 + k] = static_cast<char>((ifd_offset >> (8 * k)) & 0xff);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw RasterIoError("cannot write " + path.string());
  out.write(s.bytes.data(), static_cast<std::streamsize>(s.bytes.size()));
  if (!out) throw RasterIoError("write failed for " + path.string());
}

}  // namespace lidarvt::detail
