#pragma once

// Helpers for driving the CLI in-process and faking a perfect model.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "lidarvt/cli.hpp"
#include "lidarvt/dataset.hpp"
#include "lidarvt/raster_io.hpp"

namespace testing_support {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

inline CliRun run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"lidarvt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = lidarvt::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::string file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Every regular file under `root`, relative path -> bytes.
inline std::vector<std::pair<std::string, std::string>> tree_bytes(const std::filesystem::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out.emplace_back(std::filesystem::relative(e.path(), root).string(), file_bytes(e.path()));
  std::sort(out.begin(), out.end());
  return out;
}

/// Writes <tile_id>_<class>.tif = (mask == class) as 8-bit binary rasters for
/// every entry and catalog class: the predictions of a perfect model.
inline std::size_t write_ground_truth_predictions(const std::filesystem::path& manifest_path,
                                                  const std::filesystem::path& dir) {
  const auto m = lidarvt::load_manifest(manifest_path);
  std::filesystem::create_directories(dir);
  std::size_t n = 0;
  for (const auto& e : m.entries) {
    const auto mask = lidarvt::read_labels(lidarvt::resolve_entry_path(manifest_path, e.mask_path));
    for (const auto& cls : m.catalog.classes()) {
      lidarvt::LabelGrid bin(mask.width(), mask.height(), 0);
      for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c) bin(r, c) = mask(r, c) == cls.id ? 1 : 0;
      lidarvt::write_labels(bin, dir / (e.tile_id + "_" + std::to_string(cls.id) + ".tif"));
      ++n;
    }
  }
  return n;
}

}  // namespace testing_support
