#include "lidarvt/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "lidarvt/dataset.hpp"
#include "lidarvt/metrics.hpp"
#include "lidarvt/raster_io.hpp"
#include "lidarvt/report.hpp"
#include "lidarvt/synthetic.hpp"
#include "lidarvt/vt.hpp"

namespace lidarvt {

namespace {

namespace fs = std::filesystem;

// Bad arguments detected after parsing; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalArgs {
  int threads = 1;
  std::uint64_t seed = 0;
  std::string params;
  bool quiet = false;
};

struct Io {
  std::ostream& out;
  std::ostream& err;
  bool quiet;
  std::ostringstream discarded{};

  std::ostream& info() { return quiet ? discarded : out; }
  void warn(const std::string& msg) { err << "warning: " << msg << "\n"; }
};

VtParams load_params(const GlobalArgs& g) {
  if (g.params.empty()) return {};
  try {
    return load_vt_params(g.params);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--params: ") + e.what());
  }
}

std::vector<VtName> parse_vts(const std::string& name, bool allow_all) {
  if (allow_all && name == "all") return {kAllVts.begin(), kAllVts.end()};
  if (auto vt = parse_vt_name(name)) return {*vt};
  throw UsageError("unknown VT '" + name + "'; valid names: " + valid_vt_names() +
                   (allow_all ? ", all" : ""));
}

// Creates the directory an output file goes into.
void ensure_parent(const fs::path& path) {
  const fs::path parent = fs::absolute(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

ClassCatalog parse_catalog(const std::string& spec) {
  if (spec == "chactun") return ClassCatalog::chactun();
  if (spec == "veluwe") return ClassCatalog::veluwe();
  std::vector<ClassInfo> classes;
  std::stringstream ss(spec);
  std::string name;
  while (std::getline(ss, name, ','))
    classes.push_back({static_cast<int>(classes.size()) + 1, name});
  try {
    return ClassCatalog(std::move(classes));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--catalog: ") + e.what());
  }
}

DatasetManifest load_manifest_arg(const std::string& path) {
  if (!fs::exists(path)) throw UsageError("manifest " + path + " does not exist");
  return load_manifest(path);
}

// ---------------------------------------------------------------- viz

struct VizArgs {
  std::string input;
  std::string manifest;
  std::string vt;
  std::string output;
  std::string output_dir;
  bool png = false;
};

void export_vt(VtName vt, const DemGrid& dem, const VtParams& params, const fs::path& output,
               bool png) {
  const MultiBandImage image = compute_vt(vt, dem, params);
  write_raster(image, output, georef_of(dem));
  fs::path sidecar = output;
  sidecar.replace_extension(".json");
  write_text(sidecar, vt_sidecar(vt, params, image).dump(2) + "\n");
  if (png && format_from_path(output) != RasterFormat::png) {
    fs::path p = output;
    write_png(image, p.replace_extension(".png"));
  }
}

int cmd_viz(const GlobalArgs& g, const VizArgs& a, Io& io) {
  const bool batch = !a.manifest.empty();
  if (batch == !a.input.empty()) throw UsageError("viz needs exactly one of --input or --manifest");
  if (!batch && a.output.empty()) throw UsageError("viz --input needs --output");
  if (batch && a.output_dir.empty()) throw UsageError("viz --manifest needs --output-dir");
  const auto vts = parse_vts(a.vt, batch);
  const VtParams params = load_params(g);

  if (!batch) {
    ReadReport report;
    const DemGrid dem = read_raster(a.input, &report);
    if (report.gsd_defaulted) io.warn(a.input + " has no cell size; assuming 1.0");
    ensure_parent(a.output);
    export_vt(vts.front(), dem, params, a.output, a.png);
    io.info() << "wrote " << a.output << "\n";
    return kExitOk;
  }

  const DatasetManifest manifest = load_manifest_arg(a.manifest);
  for (VtName vt : vts) fs::create_directories(fs::path(a.output_dir) / std::string(to_string(vt)));
  for (const auto& e : manifest.entries) {
    const DemGrid dem = read_raster(resolve_entry_path(a.manifest, e.dem_path));
    for (VtName vt : vts) {
      const fs::path out = fs::path(a.output_dir) / std::string(to_string(vt)) / (e.tile_id + ".tif");
      export_vt(vt, dem, params, out, a.png);
    }
  }
  io.info() << "wrote " << manifest.entries.size() * vts.size() << " rasters under " << a.output_dir
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- tile

struct TileArgs {
  std::string dem;
  std::string mask;
  std::string output_dir;
  std::string catalog;
  std::string name;
  int tile_size = kDefaultTileSize;
};

int cmd_tile(const GlobalArgs& g, const TileArgs& a, Io& io) {
  if (a.tile_size < kMinTileSize)
    throw UsageError("--tile-size must be >= " + std::to_string(kMinTileSize));
  const ClassCatalog catalog = parse_catalog(a.catalog);

  ReadReport report;
  const DemGrid dem = read_raster(a.dem, &report);
  if (report.gsd_defaulted) io.warn(a.dem + " has no cell size; assuming 1.0");
  const LabelGrid mask = read_labels(a.mask);
  const auto tiles = tile_grid(dem, mask, a.tile_size);

  DatasetManifest manifest;
  manifest.dataset_name = a.name.empty() ? fs::path(a.dem).stem().string() : a.name;
  manifest.gsd = dem.gsd();
  manifest.tile_size = a.tile_size;
  manifest.seed = g.seed;
  manifest.catalog = catalog;

  const fs::path root(a.output_dir);
  fs::create_directories(root / "tiles");
  for (const auto& t : tiles) {
    for (int c : t.classes_present)
      if (!catalog.contains(c))
        throw std::runtime_error("mask value " + std::to_string(c) + " in tile " + t.tile_id +
                                 " is not in the catalog");
    ManifestEntry e;
    e.tile_id = t.tile_id;
    e.dem_path = "tiles/" + t.tile_id + "_dem.tif";
    e.mask_path = "tiles/" + t.tile_id + "_mask.tif";
    e.classes_present = t.classes_present;
    write_raster(t.dem, root / e.dem_path);
    write_labels(t.mask, root / e.mask_path, georef_of(t.dem));
    manifest.entries.push_back(std::move(e));
  }
  save_manifest(manifest, root / "manifest.json");
  io.info() << "wrote " << tiles.size() << " tiles and " << (root / "manifest.json").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- folds

struct FoldsArgs {
  std::string manifest;
  std::string output;
  int k = 5;
};

int cmd_folds(const GlobalArgs& g, const FoldsArgs& a, Io& io) {
  if (a.k < 2) throw UsageError("--k must be >= 2");
  DatasetManifest manifest = load_manifest_arg(a.manifest);
  if (static_cast<std::size_t>(a.k) > manifest.entries.size())
    throw UsageError("--k " + std::to_string(a.k) + " exceeds the " +
                     std::to_string(manifest.entries.size()) + " manifest entries");
  DatasetManifest out = assign_folds(manifest, a.k, g.seed);
  // Entry paths stay relative to the original manifest's directory.
  const fs::path src_dir = fs::absolute(a.manifest).parent_path();
  ensure_parent(a.output);
  const fs::path dst_dir = fs::absolute(a.output).parent_path();
  if (fs::weakly_canonical(src_dir) != fs::weakly_canonical(dst_dir)) {
    for (auto& e : out.entries) {
      for (std::string* p : {&e.dem_path, &e.mask_path})
        if (!fs::path(*p).is_absolute())
          *p = fs::relative(fs::weakly_canonical(src_dir / *p), fs::weakly_canonical(dst_dir))
                   .generic_string();
    }
  }
  save_manifest(out, a.output);
  std::vector<int> sizes(static_cast<std::size_t>(a.k), 0);
  for (const auto& e : out.entries) ++sizes[static_cast<std::size_t>(*e.fold)];
  auto& info = io.info();
  info << "fold sizes:";
  for (int s : sizes) info << " " << s;
  info << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string manifest;
  std::string predictions;
  std::string output;
  std::string vt;
  std::string run_id = "run";
  int model_id = 1;
  std::optional<int> fold;
  double threshold = 0.5;
  bool strict = false;
};

int cmd_eval(const GlobalArgs&, const EvalArgs& a, Io& io) {
  const VtName vt = parse_vts(a.vt, false).front();
  if (a.model_id < kMinModelId || a.model_id > kMaxModelId)
    throw UsageError("--model-id must be in [1,8]");
  EvalConfig cfg;
  cfg.threshold = a.threshold;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--threshold: ") + e.what());
  }
  if (!fs::is_directory(a.predictions))
    throw UsageError("predictions directory " + a.predictions + " does not exist");
  const DatasetManifest manifest = load_manifest_arg(a.manifest);

  // Entries per fold; an unsplit manifest is evaluated as fold 0.
  std::map<int, std::vector<const ManifestEntry*>> folds;
  for (const auto& e : manifest.entries) {
    const int f = e.fold.value_or(0);
    if (!a.fold || *a.fold == f) folds[f].push_back(&e);
  }
  if (a.fold && folds.empty()) throw UsageError("no entries in fold " + std::to_string(*a.fold));

  std::vector<const ManifestEntry*> order;
  for (const auto& [f, entries] : folds) order.insert(order.end(), entries.begin(), entries.end());
  const auto& classes = manifest.catalog.classes();

  // Per-entry counts are computed in parallel and merged in manifest order.
  std::vector<std::map<int, BinaryCounts>> per_entry(order.size());
  std::vector<std::vector<std::string>> missing(order.size());
  std::vector<std::string> failure(order.size());
  const auto n = static_cast<std::ptrdiff_t>(order.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const ManifestEntry& e = *order[static_cast<std::size_t>(i)];
    try {
      const LabelGrid mask = read_labels(resolve_entry_path(a.manifest, e.mask_path));
      std::vector<std::uint8_t> gt(mask.size());
      for (const auto& c : classes) {
        const fs::path p =
            fs::path(a.predictions) / (e.tile_id + "_" + std::to_string(c.id) + ".tif");
        if (!fs::exists(p)) {
          missing[static_cast<std::size_t>(i)].push_back(p.string());
          continue;
        }
        const PredictionRaster pred = read_prediction(p);
        if (pred.width != mask.width() || pred.height != mask.height())
          throw std::runtime_error(p.string() + ": size " + std::to_string(pred.width) + "x" +
                                   std::to_string(pred.height) + " does not match the mask");
        auto labels = mask.labels();
        for (std::size_t k = 0; k < gt.size(); ++k) gt[k] = labels[k] == c.id ? 1 : 0;
        try {
          accumulate(pred.values, gt, cfg, per_entry[static_cast<std::size_t>(i)][c.id]);
        } catch (const std::invalid_argument& ex) {
          throw std::runtime_error(p.string() + ": " + ex.what());
        }
      }
    } catch (const std::exception& ex) {
      failure[static_cast<std::size_t>(i)] = ex.what();
    }
  }

  std::size_t missing_count = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!failure[i].empty()) throw std::runtime_error(failure[i]);
    for (const auto& p : missing[i]) io.warn("missing prediction " + p);
    missing_count += missing[i].size();
  }
  if (missing_count && a.strict)
    throw std::runtime_error(std::to_string(missing_count) + " prediction files missing (--strict)");

  std::vector<MetricRow> rows;
  std::size_t next = 0;
  for (const auto& [f, entries] : folds) {
    ConfusionCounts counts;
    for (const auto& c : classes) counts[c.id];
    for (std::size_t j = 0; j < entries.size(); ++j, ++next)
      for (const auto& [id, bc] : per_entry[next]) counts[id] += bc;
    for (const auto& c : classes)
      rows.push_back(make_metric_row(a.run_id, a.model_id, std::string(to_string(vt)), f, c.id,
                                     counts.at(c.id)));
  }

  ensure_parent(a.output);
  std::ofstream out(a.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + a.output);
  write_metric_csv(out, rows);
  if (!out) throw std::runtime_error("write failed for " + a.output);
  io.info() << "wrote " << rows.size() << " metric rows to " << a.output;
  if (missing_count) io.info() << " (" << missing_count << " prediction files missing)";
  io.info() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> metrics;
  std::string output_dir;
  std::string mode = "per-vt-class";
  std::string catalog;
  int folds = 0;
};

int cmd_report(const GlobalArgs&, const ReportArgs& a, Io& io) {
  BestMode mode;
  if (a.mode == "per-vt-class") mode = BestMode::per_vt_class;
  else if (a.mode == "per-vt") mode = BestMode::per_vt;
  else throw UsageError("--best-mode must be per-vt-class or per-vt");
  if (a.folds < 0) throw UsageError("--folds must be >= 0");
  const ClassCatalog catalog = a.catalog.empty() ? ClassCatalog{} : parse_catalog(a.catalog);

  std::vector<MetricRow> rows;
  for (const auto& path : a.metrics) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open metric CSV " + path);
    try {
      auto part = read_metric_csv(in);
      rows.insert(rows.end(), part.begin(), part.end());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(path + ": " + e.what());
    }
  }
  const auto records = records_from_rows(rows);
  const auto means = fold_mean(records, a.folds);
  const RunSummary summary{best_per_vt_class(means, mode), variability(means, GroupBy::vt),
                           variability(means, GroupBy::model)};
  write_report(summary, means, a.output_dir);
  const std::string text = summary_text(summary, catalog);
  write_text(fs::path(a.output_dir) / "summary.txt", text);
  io.info() << text;
  return kExitOk;
}

// ---------------------------------------------------------------- stats / synth

struct StatsArgs {
  std::string manifest;
};

int cmd_stats(const GlobalArgs&, const StatsArgs& a, Io& io) {
  const DatasetManifest manifest = load_manifest_arg(a.manifest);
  io.out << "class,name,tile_count,pixel_count\n";
  for (const auto& s : class_stats(manifest, a.manifest))
    io.out << s.class_id << ',' << s.name << ',' << s.tile_count << ',' << s.pixel_count << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string output_dir;
  int size = 512;
  double gsd = 0.5;
};

int cmd_synth(const GlobalArgs& g, const SynthArgs& a, Io& io) {
  if (a.size < 64) throw UsageError("--size must be >= 64");
  if (!(a.gsd > 0.0)) throw UsageError("--gsd must be > 0");
  const SyntheticScene scene = synthetic_terrain(a.size, g.seed, a.gsd);
  const fs::path root(a.output_dir);
  fs::create_directories(root);
  write_raster(scene.dem, root / "dem.tif");
  write_labels(scene.mask, root / "mask.tif", georef_of(scene.dem));
  std::string names;
  for (const auto& c : scene.catalog.classes()) names += (names.empty() ? "" : ",") + c.name;
  io.info() << "wrote dem.tif and mask.tif to " << root.string() << " (catalog " << names << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LiDAR DEM visualisation, dataset and evaluation toolkit", "lidarvt"};
  app.fallthrough();
  app.require_subcommand(1);

  GlobalArgs g;
  g.threads = std::max(1, omp_get_num_procs());
  app.add_option("--threads", g.threads, "Worker threads (default: available cores)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for folds and synthetic data");
  app.add_option("--params", g.params, "VtParams JSON file")->check(CLI::ExistingFile);
  app.add_flag("--quiet", g.quiet, "Only print warnings and errors");

  VizArgs viz;
  auto* viz_cmd = app.add_subcommand("viz", "Compute a visualisation");
  viz_cmd->add_option("--input", viz.input, "DEM raster")->check(CLI::ExistingFile);
  viz_cmd->add_option("--manifest", viz.manifest, "Run over every tile of a manifest");
  viz_cmd->add_option("--vt", viz.vt, "Visualisation name (or 'all' with --manifest)")->required();
  viz_cmd->add_option("--output", viz.output, "Output raster (.tif, .asc or .png)");
  viz_cmd->add_option("--output-dir", viz.output_dir, "Batch output root: <dir>/<VT>/<tile_id>.tif");
  viz_cmd->add_flag("--png", viz.png, "Also export an 8-bit PNG");

  TileArgs tile;
  auto* tile_cmd = app.add_subcommand("tile", "Cut a DEM and mask into tiles and write a manifest");
  tile_cmd->add_option("--dem", tile.dem, "DEM raster")->required()->check(CLI::ExistingFile);
  tile_cmd->add_option("--mask", tile.mask, "Class-id raster")->required()->check(CLI::ExistingFile);
  tile_cmd->add_option("--output-dir", tile.output_dir, "Output directory")->required();
  tile_cmd->add_option("--catalog", tile.catalog, "chactun, veluwe or comma-separated class names")
      ->required();
  tile_cmd->add_option("--tile-size", tile.tile_size, "Tile edge in pixels");
  tile_cmd->add_option("--name", tile.name, "Dataset name (default: DEM file stem)");

  FoldsArgs folds;
  auto* folds_cmd = app.add_subcommand("folds", "Assign stratified cross-validation folds");
  folds_cmd->add_option("--manifest", folds.manifest, "Input manifest")->required();
  folds_cmd->add_option("--output", folds.output, "Output manifest")->required();
  folds_cmd->add_option("--k", folds.k, "Fold count");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score prediction files against manifest masks");
  eval_cmd->add_option("--manifest", eval.manifest, "Manifest with ground-truth masks")->required();
  eval_cmd->add_option("--predictions", eval.predictions, "Directory of <tile_id>_<class>.tif files")
      ->required();
  eval_cmd->add_option("--output", eval.output, "Metric CSV")->required();
  eval_cmd->add_option("--vt", eval.vt, "Visualisation the predictions were made from")->required();
  eval_cmd->add_option("--model-id", eval.model_id, "Model configuration id (1-8)");
  eval_cmd->add_option("--run-id", eval.run_id, "Run identifier written to every row");
  eval_cmd->add_option("--fold", eval.fold, "Only evaluate this fold");
  eval_cmd->add_option("--threshold", eval.threshold, "Detection threshold");
  eval_cmd->add_flag("--strict", eval.strict, "Fail when any prediction file is missing");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summarise metric CSVs");
  report_cmd->add_option("--metrics", report.metrics, "Metric CSV files")->required()->expected(1, -1);
  report_cmd->add_option("--output-dir", report.output_dir, "Output directory")->required();
  report_cmd->add_option("--best-mode", report.mode, "per-vt-class (default) or per-vt");
  report_cmd->add_option("--folds", report.folds, "Expected folds per group (0: infer)");
  report_cmd->add_option("--catalog", report.catalog, "Class names for the summary text");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Per-class tile and pixel counts");
  stats_cmd->add_option("--manifest", stats.manifest, "Manifest")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic DEM with labelled features");
  synth_cmd->add_option("--output-dir", synth.output_dir, "Output directory")->required();
  synth_cmd->add_option("--size", synth.size, "Edge length in pixels");
  synth_cmd->add_option("--gsd", synth.gsd, "Cell size in metres");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  omp_set_num_threads(g.threads);
  Io io{out, err, g.quiet};
  try {
    if (*viz_cmd) return cmd_viz(g, viz, io);
    if (*tile_cmd) return cmd_tile(g, tile, io);
    if (*folds_cmd) return cmd_folds(g, folds, io);
    if (*eval_cmd) return cmd_eval(g, eval, io);
    if (*report_cmd) return cmd_report(g, report, io);
    if (*stats_cmd) return cmd_stats(g, stats, io);
    if (*synth_cmd) return cmd_synth(g, synth, io);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lidarvt
