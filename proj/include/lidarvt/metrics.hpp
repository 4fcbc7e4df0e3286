#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lidarvt {

struct EvalConfig {
  double threshold = 0.5;  ///< pred >= threshold counts as positive
  double tversky_alpha = 0.7;
  double tversky_beta = 0.3;

  void validate() const;
};

/// Pixel confusion counts for one class.
struct BinaryCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  BinaryCounts& operator+=(const BinaryCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const BinaryCounts&) const = default;
};

/// Per-class counts, accumulated over a whole dataset split (micro averaging).
class ConfusionCounts {
 public:
  BinaryCounts& operator[](int class_id) { return counts_[class_id]; }
  const BinaryCounts& at(int class_id) const;
  bool contains(int class_id) const { return counts_.count(class_id) != 0; }
  const std::map<int, BinaryCounts>& by_class() const { return counts_; }

  void merge(const ConfusionCounts& other);
  bool operator==(const ConfusionCounts&) const = default;

 private:
  std::map<int, BinaryCounts> counts_;
};

/// Thresholds `pred` and adds its confusion against binary `gt` into `into`.
/// Throws std::invalid_argument on a size mismatch or a prediction outside [0,1].
void accumulate(std::span<const float> pred, std::span<const std::uint8_t> gt,
                const EvalConfig& cfg, BinaryCounts& into);

/// tp / (tp+fp+fn); 1.0 when the class is absent and never predicted.
double iou(const BinaryCounts& c);
double precision(const BinaryCounts& c);  ///< 1.0 when nothing was predicted
double recall(const BinaryCounts& c);     ///< 1.0 when nothing was present

inline double iou(const ConfusionCounts& counts, int class_id) { return iou(counts.at(class_id)); }

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};
inline PrecisionRecall precision_recall(const ConfusionCounts& counts, int class_id) {
  const auto& c = counts.at(class_id);
  return {precision(c), recall(c)};
}

inline constexpr double kTverskySmooth = 1e-7;

/// 1 - (TP + eps) / (TP + alpha*FN + beta*FP + eps) over soft counts.
double tversky_loss(std::span<const float> pred, std::span<const std::uint8_t> gt,
                    const EvalConfig& cfg);

/// Soft Dice coefficient (2TP + 2eps) / (2TP + FN + FP + 2eps); with the same
/// smoothing, 1 - dice equals the Tversky loss at alpha = beta = 0.5.
double dice_coefficient(std::span<const float> pred, std::span<const std::uint8_t> gt);

/// One line of the metric CSV.
struct MetricRow {
  std::string run_id;
  int model_id = 0;
  std::string vt;
  int fold = 0;
  int class_id = 0;
  BinaryCounts counts;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  bool operator==(const MetricRow&) const = default;
};

MetricRow make_metric_row(std::string run_id, int model_id, std::string vt, int fold, int class_id,
                          const BinaryCounts& counts);

inline constexpr const char* kMetricCsvHeader =
    "run_id,model_id,vt,fold,class,tp,fp,fn,tn,iou,precision,recall";

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metric_csv(std::istream& in);

}  // namespace lidarvt
