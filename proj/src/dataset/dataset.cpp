#include "lidarvt/dataset.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lidarvt/raster_io.hpp"
#include "lidarvt/rng.hpp"

namespace lidarvt {

ClassCatalog::ClassCatalog(std::vector<ClassInfo> classes) : classes_(std::move(classes)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i].id != static_cast<int>(i) + 1)
      throw std::invalid_argument("class ids must be contiguous from 1 in catalog order");
    if (classes_[i].name.empty()) throw std::invalid_argument("class names must be non-empty");
    if (!names.insert(classes_[i].name).second)
      throw std::invalid_argument("duplicate class name '" + classes_[i].name + "'");
  }
  if (classes_.size() > 255) throw std::invalid_argument("at most 255 classes fit an 8-bit mask");
}

ClassCatalog ClassCatalog::chactun() {
  return ClassCatalog({{1, "aguada"}, {2, "building"}, {3, "platform"}});
}

ClassCatalog ClassCatalog::veluwe() { return ClassCatalog({{1, "barrow"}, {2, "charcoal_kiln"}}); }

const std::string& ClassCatalog::name_of(int id) const {
  if (!contains(id)) throw std::out_of_range("class id " + std::to_string(id) + " not in catalog");
  return classes_[static_cast<std::size_t>(id) - 1].name;
}

std::optional<int> ClassCatalog::id_of(const std::string& name) const {
  for (const auto& c : classes_)
    if (c.name == name) return c.id;
  return std::nullopt;
}

std::string tile_id_for(int row, int col) {
  return "r" + std::to_string(row) + "_c" + std::to_string(col);
}

std::set<int> classes_in(const LabelGrid& mask) {
  std::array<bool, 256> seen{};
  for (auto v : mask.labels()) seen[v] = true;
  std::set<int> out;
  for (int v = 1; v < 256; ++v)
    if (seen[v]) out.insert(v);
  return out;
}

std::vector<TilePair> tile_grid(const DemGrid& dem, const LabelGrid& mask, int tile_size) {
  if (tile_size < kMinTileSize)
    throw std::invalid_argument("tile size must be >= " + std::to_string(kMinTileSize));
  if (dem.size() == 0 || mask.size() == 0) throw std::invalid_argument("cannot tile an empty raster");
  if (dem.width() != mask.width() || dem.height() != mask.height())
    throw std::invalid_argument("DEM and mask dimensions differ");

  const int rows = (dem.height() + tile_size - 1) / tile_size;
  const int cols = (dem.width() + tile_size - 1) / tile_size;
  std::vector<TilePair> tiles;
  tiles.reserve(static_cast<std::size_t>(rows) * cols);
  for (int tr = 0; tr < rows; ++tr) {
    for (int tc = 0; tc < cols; ++tc) {
      TilePair t;
      t.tile_id = tile_id_for(tr, tc);
      t.row = tr;
      t.col = tc;
      t.dem = DemGrid(tile_size, tile_size, dem.gsd(), 0.0f, dem.nodata());
      t.mask = LabelGrid(tile_size, tile_size, 0);
      for (int r = 0; r < tile_size; ++r) {
        const int sr = tr * tile_size + r;
        const int cr = std::min(sr, dem.height() - 1);
        for (int c = 0; c < tile_size; ++c) {
          const int sc = tc * tile_size + c;
          const int cc = std::min(sc, dem.width() - 1);
          t.dem(r, c) = dem(cr, cc);
          if (sr < dem.height() && sc < dem.width()) t.mask(r, c) = mask(sr, sc);
        }
      }
      if (dem.origin()) {
        const double g = dem.gsd();
        const double top = dem.origin()->y + dem.height() * g;
        t.dem.set_origin(GeoOrigin{dem.origin()->x + tc * tile_size * g,
                                   top - (tr + 1) * tile_size * g});
      }
      t.classes_present = classes_in(t.mask);
      tiles.push_back(std::move(t));
    }
  }
  return tiles;
}

void DatasetManifest::validate() const {
  if (!(gsd > 0.0)) throw std::invalid_argument("manifest gsd must be > 0");
  if (tile_size < 1) throw std::invalid_argument("manifest tile_size must be positive");
  if (k < 0) throw std::invalid_argument("manifest k must be >= 0");
  std::set<std::string> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.tile_id).second)
      throw std::invalid_argument("duplicate tile_id '" + e.tile_id + "'");
    for (int c : e.classes_present)
      if (!catalog.contains(c))
        throw std::invalid_argument("tile " + e.tile_id + " lists class " + std::to_string(c) +
                                    " which is not in the catalog");
    if (k > 0 && (!e.fold || *e.fold < 0 || *e.fold >= k))
      throw std::invalid_argument("tile " + e.tile_id + " has no fold in [0," +
                                  std::to_string(k) + ")");
    if (k == 0 && e.fold) throw std::invalid_argument("fold set without k");
  }
}

nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json catalog = nlohmann::json::array();
  for (const auto& c : m.catalog.classes()) catalog.push_back({{"id", c.id}, {"name", c.name}});
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"tile_id", e.tile_id},
                       {"dem_path", e.dem_path},
                       {"mask_path", e.mask_path},
                       {"classes_present", std::vector<int>(e.classes_present.begin(),
                                                            e.classes_present.end())},
                       {"fold", e.fold ? nlohmann::json(*e.fold) : nlohmann::json(nullptr)}});
  }
  return {{"dataset_name", m.dataset_name}, {"gsd", m.gsd}, {"tile_size", m.tile_size},
          {"k", m.k}, {"seed", m.seed}, {"catalog", catalog}, {"entries", entries}};
}

DatasetManifest manifest_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kKeys = {"dataset_name", "gsd",     "tile_size", "k",
                                              "seed",         "catalog", "entries"};
  DatasetManifest m;
  try {
    for (const auto& [key, value] : j.items())
      if (!kKeys.count(key)) throw std::invalid_argument("unknown manifest key '" + key + "'");
    m.dataset_name = j.at("dataset_name").get<std::string>();
    m.gsd = j.at("gsd").get<double>();
    m.tile_size = j.at("tile_size").get<int>();
    m.k = j.at("k").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    std::vector<ClassInfo> classes;
    for (const auto& c : j.at("catalog"))
      classes.push_back({c.at("id").get<int>(), c.at("name").get<std::string>()});
    m.catalog = ClassCatalog(std::move(classes));
    for (const auto& e : j.at("entries")) {
      ManifestEntry entry;
      entry.tile_id = e.at("tile_id").get<std::string>();
      entry.dem_path = e.at("dem_path").get<std::string>();
      entry.mask_path = e.at("mask_path").get<std::string>();
      for (const auto& c : e.at("classes_present")) entry.classes_present.insert(c.get<int>());
      if (e.contains("fold") && !e.at("fold").is_null()) entry.fold = e.at("fold").get<int>();
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
  }
  m.validate();
  return m;
}

std::string manifest_text(const DatasetManifest& manifest) {
  return to_json(manifest).dump(2) + "\n";
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << manifest_text(manifest);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return manifest_from_json(j);
}

std::filesystem::path resolve_entry_path(const std::filesystem::path& manifest_path,
                                         const std::string& entry_path) {
  const std::filesystem::path p(entry_path);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

std::string class_signature(const std::set<int>& classes) {
  std::string key;
  for (int c : classes) {
    if (!key.empty()) key.push_back(',');
    key += std::to_string(c);
  }
  return key;
}

DatasetManifest assign_folds(const DatasetManifest& manifest, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("fold count k must be >= 2");
  if (static_cast<std::size_t>(k) > manifest.entries.size())
    throw std::invalid_argument("fold count k=" + std::to_string(k) + " exceeds the " +
                                std::to_string(manifest.entries.size()) + " manifest entries");

  DatasetManifest out = manifest;
  std::sort(out.entries.begin(), out.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.tile_id < b.tile_id; });

  std::map<std::string, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < out.entries.size(); ++i)
    strata[class_signature(out.entries[i].classes_present)].push_back(i);

  std::size_t deal = 0;
  for (auto& [signature, members] : strata) {
    SplitMix64 rng(derive_seed(seed, signature, 0));
    for (std::size_t i = members.size(); i-- > 1;) {
      const std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
      std::swap(members[i], members[j]);
    }
    for (std::size_t idx : members) {
      out.entries[idx].fold = static_cast<int>(deal % static_cast<std::size_t>(k));
      ++deal;
    }
  }
  out.k = k;
  out.seed = seed;
  out.validate();
  return out;
}

std::vector<ClassStat> class_stats(const DatasetManifest& manifest,
                                   const std::filesystem::path& manifest_path) {
  std::map<int, ClassStat> stats;
  for (const auto& e : manifest.entries) {
    for (int c : e.classes_present) ++stats[c].tile_count;
    const LabelGrid mask = read_labels(resolve_entry_path(manifest_path, e.mask_path));
    for (auto v : mask.labels())
      if (v != 0) ++stats[v].pixel_count;
  }
  std::vector<ClassStat> out;
  for (auto& [id, s] : stats) {
    s.class_id = id;
    s.name = manifest.catalog.contains(id) ? manifest.catalog.name_of(id) : "";
    out.push_back(s);
  }
  return out;
}

}  // namespace lidarvt
