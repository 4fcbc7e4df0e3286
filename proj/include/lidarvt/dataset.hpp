#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lidarvt/raster.hpp"

namespace lidarvt {

struct ClassInfo {
  int id = 0;
  std::string name;
  bool operator==(const ClassInfo&) const = default;
};

/// Ordered class list; ids are contiguous from 1 and background is 0.
class ClassCatalog {
 public:
  ClassCatalog() = default;
  explicit ClassCatalog(std::vector<ClassInfo> classes);

  /// aguada=1, building=2, platform=3
  static ClassCatalog chactun();
  /// barrow=1, charcoal_kiln=2
  static ClassCatalog veluwe();

  const std::vector<ClassInfo>& classes() const { return classes_; }
  bool contains(int id) const { return id >= 1 && id <= static_cast<int>(classes_.size()); }
  const std::string& name_of(int id) const;
  std::optional<int> id_of(const std::string& name) const;

  bool operator==(const ClassCatalog&) const = default;

 private:
  std::vector<ClassInfo> classes_;
};

inline constexpr int kDefaultTileSize = 256;
inline constexpr int kMinTileSize = 32;

struct TilePair {
  std::string tile_id;
  int row = 0;  ///< tile row index
  int col = 0;  ///< tile column index
  DemGrid dem;
  LabelGrid mask;
  std::set<int> classes_present;
};

std::string tile_id_for(int row, int col);

/// The set of nonzero labels in `mask`.
std::set<int> classes_in(const LabelGrid& mask);

/**
 * Non-overlapping row-major tiling. Ragged right/bottom tiles are padded, the
 * DEM by edge replication and the mask with background. Tile origins are
 * shifted so every tile stays georeferenced.
 */
std::vector<TilePair> tile_grid(const DemGrid& dem, const LabelGrid& mask,
                                int tile_size = kDefaultTileSize);

struct ManifestEntry {
  std::string tile_id;
  std::string dem_path;   ///< relative to the manifest directory unless absolute
  std::string mask_path;  ///< relative to the manifest directory unless absolute
  std::set<int> classes_present;
  std::optional<int> fold;

  bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
  std::string dataset_name;
  double gsd = 0.5;
  int tile_size = kDefaultTileSize;
  int k = 0;  ///< 0 until folds are assigned
  std::uint64_t seed = 0;
  ClassCatalog catalog;
  std::vector<ManifestEntry> entries;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  bool operator==(const DatasetManifest&) const = default;
};

nlohmann::json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

/// Pretty-printed JSON with a trailing newline; byte-stable for equal manifests.
std::string manifest_text(const DatasetManifest& manifest);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Resolves an entry path against the manifest's directory.
std::filesystem::path resolve_entry_path(const std::filesystem::path& manifest_path,
                                         const std::string& entry_path);

/// Canonical stratum key: sorted class ids joined by ',' ("" for background-only).
std::string class_signature(const std::set<int>& classes);

/**
 * Stratified, seeded k-fold assignment.
 *
 * Entries are sorted by tile_id and grouped by class signature; strata are
 * visited in ascending signature order. Each stratum is Fisher-Yates shuffled
 * (j = next() % (i+1), i from n-1 down to 1) with a SplitMix64 stream seeded
 * by derive_seed(seed, signature, 0), then dealt to folds round-robin. The
 * deal position carries over between strata so overall fold sizes also differ
 * by at most one.
 */
DatasetManifest assign_folds(const DatasetManifest& manifest, int k, std::uint64_t seed);

struct ClassStat {
  int class_id = 0;
  std::string name;
  std::size_t tile_count = 0;
  std::uint64_t pixel_count = 0;
};

/// Per-class tile and pixel counts, reading each mask from disk. Classes that
/// never occur are omitted.
std::vector<ClassStat> class_stats(const DatasetManifest& manifest,
                                   const std::filesystem::path& manifest_path);

}  // namespace lidarvt
