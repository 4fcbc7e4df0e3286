#include <gtest/gtest.h>

#include "lidarvt/dataset.hpp"
#include "lidarvt/metrics.hpp"
#include "lidarvt/raster_io.hpp"
#include "lidarvt/vt_params.hpp"
#include "pipeline.hpp"
#include "temp_dir.hpp"

using namespace lidarvt;
using testing_support::file_bytes;
using testing_support::run_cli;

namespace {

// Scales that fit 64-px tiles.
std::string write_small_params(const testing_support::TempDir& dir) {
  VtParams p;
  p.svf_radius_px = 5;
  p.slrm_radius_px = 8;
  p.mstp_local = {1, 5, 2};
  p.mstp_meso = {6, 14, 4};
  p.mstp_broad = {16, 28, 6};
  const auto path = (dir / "params.json").string();
  std::ofstream(path) << to_json(p).dump();
  return path;
}

// synth (128 px) -> tile (64 px), returning the manifest path.
std::string tiled_dataset(const testing_support::TempDir& dir) {
  const std::string synth = (dir / "synth").string(), data = (dir / "data").string();
  EXPECT_EQ(run_cli({"--quiet", "--seed", "3", "synth", "--output-dir", synth, "--size", "128"}).code, 0);
  const auto r = run_cli({"--quiet", "tile", "--dem", synth + "/dem.tif", "--mask", synth + "/mask.tif",
                          "--output-dir", data, "--tile-size", "64", "--catalog", "mound,ditch"});
  EXPECT_EQ(r.code, 0) << r.err;
  return data + "/manifest.json";
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"folds", "--manifest", "x.json"}).code, 2);  // --output missing
  EXPECT_EQ(run_cli({"viz", "--input", "/does/not/exist.asc", "--vt", "VAT", "--output", "o.tif"}).code, 2);
  EXPECT_EQ(run_cli({"--threads", "0", "stats", "--manifest", "m.json"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("viz"), std::string::npos);
}

TEST(Cli, UnknownVtListsValidNames) {
  testing_support::TempDir dir;
  write_raster(DemGrid(40, 40, 1.0, 1.0f), dir / "flat.asc");
  const auto r = run_cli({"viz", "--input", (dir / "flat.asc").string(), "--vt", "FOO", "--output",
                          (dir / "o.tif").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("FOO"), std::string::npos);
  EXPECT_NE(r.err.find("DEM_C, DEM_S, SLRM, DSS, E2MSTP, E2MSTP_1B, VAT"), std::string::npos) << r.err;
  EXPECT_FALSE(std::filesystem::exists(dir / "o.tif"));
}

TEST(Cli, RuntimeFailuresExitOne) {
  testing_support::TempDir dir;
  std::ofstream(dir / "bad.asc") << "ncols 2\nnrows 2\ncellsize 1\n1 2\n3\n";
  const auto r = run_cli({"viz", "--input", (dir / "bad.asc").string(), "--vt", "DEM_C", "--output",
                          (dir / "o.tif").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
}

TEST(Cli, VizOnFlatDemIsHalfGrey) {
  testing_support::TempDir dir;
  write_raster(DemGrid(64, 64, 0.5, 250.0f), dir / "flat.asc");
  const auto out = dir / "flat_demc.tif";
  const auto r = run_cli({"--quiet", "viz", "--input", (dir / "flat.asc").string(), "--vt", "DEM_C",
                          "--output", out.string(), "--png"});
  ASSERT_EQ(r.code, 0) << r.err;
  const MultiBandImage img = read_image(out);
  ASSERT_EQ(img.band_count(), 1u);
  for (float v : img.band(0)) EXPECT_EQ(v, 0.5f);
  const auto sidecar = nlohmann::json::parse(file_bytes(dir / "flat_demc.json"));
  EXPECT_EQ(sidecar.at("vt"), "DEM_C");
  EXPECT_TRUE(std::filesystem::exists(dir / "flat_demc.png"));
}

TEST(Cli, OutputParentDirectoriesAreCreated) {
  testing_support::TempDir dir;
  write_raster(DemGrid(40, 40, 1.0, 1.0f), dir / "flat.asc");
  const auto out = dir / "a" / "b" / "demc.tif";
  const auto r = run_cli({"--quiet", "viz", "--input", (dir / "flat.asc").string(), "--vt", "DEM_C", "--output",
                          out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(out));
}

TEST(Cli, VizUsesParamsFile) {
  testing_support::TempDir dir;
  const std::string params = write_small_params(dir);
  write_raster(DemGrid(64, 64, 0.5, 1.0f), dir / "flat.asc");
  // Default MSTP radii (up to 100 px) do not fit a 64 px raster.
  EXPECT_EQ(run_cli({"viz", "--input", (dir / "flat.asc").string(), "--vt", "E2MSTP", "--output",
                     (dir / "a.tif").string()})
                .code,
            1);
  const auto r = run_cli({"--quiet", "--params", params, "viz", "--input", (dir / "flat.asc").string(),
                          "--vt", "E2MSTP", "--output", (dir / "b.tif").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sidecar = nlohmann::json::parse(file_bytes(dir / "b.json"));
  EXPECT_EQ(sidecar.at("params").at("slrm_radius_px"), 8);
}

TEST(Cli, TileFoldsStats) {
  testing_support::TempDir dir;
  const std::string manifest = tiled_dataset(dir);
  const DatasetManifest m = load_manifest(manifest);
  EXPECT_EQ(m.entries.size(), 4u);
  EXPECT_EQ(m.k, 0);
  EXPECT_EQ(m.catalog.name_of(2), "ditch");

  const auto a = (dir / "folds_a.json").string(), b = (dir / "folds_b.json").string();
  ASSERT_EQ(run_cli({"--seed", "11", "folds", "--manifest", manifest, "--output", a, "--k", "2"}).code, 0);
  ASSERT_EQ(run_cli({"--seed", "11", "folds", "--manifest", manifest, "--output", b, "--k", "2"}).code, 0);
  EXPECT_EQ(file_bytes(a), file_bytes(b));
  const DatasetManifest folded = load_manifest(a);
  EXPECT_EQ(folded.k, 2);
  EXPECT_EQ(folded.seed, 11u);
  // Paths were re-relativised to the new manifest location.
  for (const auto& e : folded.entries) EXPECT_TRUE(std::filesystem::exists(resolve_entry_path(a, e.mask_path)));

  EXPECT_EQ(run_cli({"folds", "--manifest", manifest, "--output", a, "--k", "9"}).code, 2);

  const auto s = run_cli({"stats", "--manifest", manifest});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out.rfind("class,name,tile_count,pixel_count\n", 0), 0u);
  EXPECT_NE(s.out.find(",mound,"), std::string::npos) << s.out;
}

TEST(Cli, EvalPerfectPredictionsGiveIouOne) {
  testing_support::TempDir dir;
  const std::string manifest = tiled_dataset(dir);
  const std::string folded = (dir / "data" / "folds.json").string();
  ASSERT_EQ(run_cli({"folds", "--manifest", manifest, "--output", folded, "--k", "2"}).code, 0);
  const auto preds = dir / "preds";
  EXPECT_EQ(testing_support::write_ground_truth_predictions(folded, preds), 8u);

  const auto csv = (dir / "metrics.csv").string();
  const auto r = run_cli({"eval", "--manifest", folded, "--predictions", preds.string(), "--output", csv,
                          "--vt", "VAT", "--model-id", "4", "--run-id", "gt"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.err.empty()) << r.err;
  std::ifstream in(csv);
  const auto rows = read_metric_csv(in);
  ASSERT_EQ(rows.size(), 4u);  // 2 folds x 2 classes
  for (const auto& row : rows) {
    EXPECT_EQ(row.iou, 1.0);
    EXPECT_EQ(row.precision, 1.0);
    EXPECT_EQ(row.recall, 1.0);
    EXPECT_EQ(row.model_id, 4);
    EXPECT_EQ(row.vt, "VAT");
  }
  EXPECT_EQ(rows[0].fold, 0);
  EXPECT_EQ(rows[3].fold, 1);

  const auto report_dir = dir / "report";
  const auto rep = run_cli({"report", "--metrics", csv, "--output-dir", report_dir.string(), "--catalog",
                            "mound,ditch"});
  ASSERT_EQ(rep.code, 0) << rep.err;
  for (const char* f : {"best_per_vt_class.csv", "variability_by_vt.csv", "variability_by_model.csv",
                        "summary.txt"})
    EXPECT_TRUE(std::filesystem::exists(report_dir / f)) << f;
  EXPECT_NE(rep.out.find("mound: IoU 1"), std::string::npos) << rep.out;
}

TEST(Cli, EvalWarnsOnMissingPredictionsAndStrictFails) {
  testing_support::TempDir dir;
  const std::string manifest = tiled_dataset(dir);
  const auto preds = dir / "preds";
  testing_support::write_ground_truth_predictions(manifest, preds);
  std::filesystem::remove(preds / "r0_c1_2.tif");
  const auto csv = (dir / "m.csv").string();
  const std::vector<std::string> args = {"eval", "--manifest", manifest, "--predictions", preds.string(),
                                         "--output", csv, "--vt", "DSS"};
  const auto r = run_cli(args);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning: "), std::string::npos);
  EXPECT_NE(r.err.find("r0_c1_2.tif"), std::string::npos) << r.err;

  auto strict = args;
  strict.push_back("--strict");
  EXPECT_EQ(run_cli(strict).code, 1);
}

TEST(Cli, OutputsIdenticalAcrossThreadCounts) {
  testing_support::TempDir dir;
  const std::string params = write_small_params(dir);
  const std::string manifest = tiled_dataset(dir);
  const auto preds = dir / "preds";
  testing_support::write_ground_truth_predictions(manifest, preds);

  std::vector<std::vector<std::pair<std::string, std::string>>> trees;
  std::vector<std::string> csvs;
  for (const char* threads : {"1", "3"}) {
    const auto out = dir / (std::string("viz_") + threads);
    const auto r = run_cli({"--quiet", "--threads", threads, "--params", params, "viz", "--manifest", manifest,
                            "--vt", "all", "--output-dir", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    trees.push_back(testing_support::tree_bytes(out));
    const auto csv = dir / (std::string("m_") + threads + ".csv");
    ASSERT_EQ(run_cli({"--threads", threads, "eval", "--manifest", manifest, "--predictions", preds.string(),
                       "--output", csv.string(), "--vt", "DEM_C"})
                  .code,
              0);
    csvs.push_back(file_bytes(csv));
  }
  ASSERT_EQ(trees[0].size(), 4u * 7u * 2u);  // raster + sidecar per tile and VT
  EXPECT_EQ(trees[0], trees[1]);
  EXPECT_EQ(csvs[0], csvs[1]);
}
