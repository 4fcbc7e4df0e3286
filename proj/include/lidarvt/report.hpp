#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lidarvt/dataset.hpp"
#include "lidarvt/metrics.hpp"
#include "lidarvt/vt_params.hpp"

namespace lidarvt {

inline constexpr int kMinModelId = 1;
inline constexpr int kMaxModelId = 8;

struct EvalRecord {
  int model_id = kMinModelId;
  VtName vt = VtName::DEM_C;
  int fold = 0;
  int class_id = 1;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  void validate() const;
  bool operator==(const EvalRecord&) const = default;
};

/// Converts metric CSV rows; throws std::invalid_argument on an unknown VT
/// name, a model id outside 1..8 or a metric outside [0,1].
std::vector<EvalRecord> records_from_rows(const std::vector<MetricRow>& rows);

/// Fold-averaged metrics of one (model, vt, class) group.
struct FoldMeanRecord {
  int model_id = kMinModelId;
  VtName vt = VtName::DEM_C;
  int class_id = 1;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  int n_folds = 0;
  bool incomplete = false;  ///< fewer folds than the fullest group

  bool operator==(const FoldMeanRecord&) const = default;
};

/**
 * Arithmetic mean over folds for every (model, vt, class). A group is flagged
 * incomplete when it has fewer folds than `expected_folds`; with
 * expected_folds = 0 the largest fold count present in the input is used.
 * Output is sorted by (model, vt, class). Duplicate fold records are an error.
 */
std::vector<FoldMeanRecord> fold_mean(const std::vector<EvalRecord>& records, int expected_folds = 0);

enum class BestMode {
  per_vt_class,  ///< best model chosen independently for every (vt, class)
  per_vt,        ///< one model per vt: highest mean IoU over its classes
};

struct BestEntry {
  VtName vt = VtName::DEM_C;
  int class_id = 1;
  int model_id = kMinModelId;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool incomplete = false;

  bool operator==(const BestEntry&) const = default;
};

/// Highest IoU per (vt, class), ties going to the lower model id. Sorted by
/// (vt, class). Throws std::invalid_argument on empty input.
std::vector<BestEntry> best_per_vt_class(const std::vector<FoldMeanRecord>& records,
                                         BestMode mode = BestMode::per_vt_class);

enum class GroupBy { vt, model };

/// IoU spread of one group across the complementary axis. class_id is
/// nullopt for the row pooling every class of the group.
struct VariabilityRow {
  std::string group;  ///< VT name or model id
  std::optional<int> class_id;
  int n = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  double range = 0.0;

  bool operator==(const VariabilityRow&) const = default;
};

/// Median of a non-empty sample; even sizes average the two middle values.
double median_of(std::vector<double> values);

std::vector<VariabilityRow> variability(const std::vector<FoldMeanRecord>& records, GroupBy group_by);

struct RunSummary {
  std::vector<BestEntry> best;
  std::vector<VariabilityRow> by_vt;
  std::vector<VariabilityRow> by_model;

  bool operator==(const RunSummary&) const = default;
};

RunSummary summarise(const std::vector<EvalRecord>& records, BestMode mode = BestMode::per_vt_class,
                     int expected_folds = 0);

inline constexpr const char* kBestCsvHeader =
    "vt,class,model_id,iou,precision,recall,incomplete";
inline constexpr const char* kVariabilityByVtHeader = "vt,class,n,min,median,max,range";
inline constexpr const char* kVariabilityByModelHeader = "model_id,class,n,min,median,max,range";
inline constexpr const char* kFoldMeanCsvHeader =
    "model_id,vt,class,iou,precision,recall,n_folds,incomplete";

void write_best_csv(std::ostream& out, const std::vector<BestEntry>& rows);
std::vector<BestEntry> read_best_csv(std::istream& in);

/// The class column holds the class id, or "all" for the pooled row.
void write_variability_csv(std::ostream& out, const std::vector<VariabilityRow>& rows, GroupBy group_by);
std::vector<VariabilityRow> read_variability_csv(std::istream& in, GroupBy group_by);

void write_fold_mean_csv(std::ostream& out, const std::vector<FoldMeanRecord>& rows);

/// Classes ranked by their best IoU over every VT, plus the conventions the
/// numbers depend on. Class names come from `catalog` when it knows the id.
std::string summary_text(const RunSummary& summary, const ClassCatalog& catalog = {});

/// Writes best_per_vt_class.csv, variability_by_vt.csv, variability_by_model.csv
/// and fold_means.csv into `dir` (created if missing).
void write_report(const RunSummary& summary, const std::vector<FoldMeanRecord>& fold_means,
                  const std::filesystem::path& dir);

}  // namespace lidarvt
