#include "lidarvt/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lidarvt {

void EvalConfig::validate() const {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("threshold must be in (0,1)");
  if (!(tversky_alpha >= 0.0 && tversky_beta >= 0.0 && tversky_alpha + tversky_beta > 0.0))
    throw std::invalid_argument("Tversky alpha and beta must be >= 0 with a positive sum");
}

const BinaryCounts& ConfusionCounts::at(int class_id) const {
  auto it = counts_.find(class_id);
  if (it == counts_.end())
    throw std::out_of_range("no counts for class " + std::to_string(class_id));
  return it->second;
}

void ConfusionCounts::merge(const ConfusionCounts& other) {
  for (const auto& [id, c] : other.counts_) counts_[id] += c;
}

namespace {

void check_shapes(std::span<const float> pred, std::span<const std::uint8_t> gt) {
  if (pred.size() != gt.size())
    throw std::invalid_argument("prediction and ground truth sizes differ (" +
                                std::to_string(pred.size()) + " vs " + std::to_string(gt.size()) +
                                ")");
}

void check_prob(float p) {
  if (!(p >= 0.0f && p <= 1.0f))
    throw std::invalid_argument("prediction value " + std::to_string(p) + " is outside [0,1]");
}

double ratio_or_one(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void accumulate(std::span<const float> pred, std::span<const std::uint8_t> gt,
                const EvalConfig& cfg, BinaryCounts& into) {
  cfg.validate();
  check_shapes(pred, gt);
  BinaryCounts local;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    check_prob(pred[i]);
    const bool p = static_cast<double>(pred[i]) >= cfg.threshold;
    const bool g = gt[i] != 0;
    if (p && g) ++local.tp;
    else if (p) ++local.fp;
    else if (g) ++local.fn;
    else ++local.tn;
  }
  into += local;
}

double iou(const BinaryCounts& c) { return ratio_or_one(c.tp, c.tp + c.fp + c.fn); }
double precision(const BinaryCounts& c) { return ratio_or_one(c.tp, c.tp + c.fp); }
double recall(const BinaryCounts& c) { return ratio_or_one(c.tp, c.tp + c.fn); }

double tversky_loss(std::span<const float> pred, std::span<const std::uint8_t> gt,
                    const EvalConfig& cfg) {
  cfg.validate();
  check_shapes(pred, gt);
  double tp = 0.0, fn = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    check_prob(pred[i]);
    const double p = pred[i];
    const double g = gt[i] != 0 ? 1.0 : 0.0;
    tp += p * g;
    fn += (1.0 - p) * g;
    fp += p * (1.0 - g);
  }
  return 1.0 - (tp + kTverskySmooth) /
                   (tp + cfg.tversky_alpha * fn + cfg.tversky_beta * fp + kTverskySmooth);
}

double dice_coefficient(std::span<const float> pred, std::span<const std::uint8_t> gt) {
  check_shapes(pred, gt);
  double tp = 0.0, fn = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    const double g = gt[i] != 0 ? 1.0 : 0.0;
    tp += p * g;
    fn += (1.0 - p) * g;
    fp += p * (1.0 - g);
  }
  return (2.0 * tp + 2.0 * kTverskySmooth) / (2.0 * tp + fn + fp + 2.0 * kTverskySmooth);
}

MetricRow make_metric_row(std::string run_id, int model_id, std::string vt, int fold, int class_id,
                          const BinaryCounts& counts) {
  MetricRow row;
  row.run_id = std::move(run_id);
  row.model_id = model_id;
  row.vt = std::move(vt);
  row.fold = fold;
  row.class_id = class_id;
  row.counts = counts;
  row.iou = iou(counts);
  row.precision = precision(counts);
  row.recall = recall(counts);
  return row;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_metric_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << kMetricCsvHeader << "\n";
  for (const auto& r : rows) {
    if (r.run_id.find_first_of(",\n\"") != std::string::npos ||
        r.vt.find_first_of(",\n\"") != std::string::npos)
      throw std::invalid_argument("run_id and vt must not contain commas, quotes or newlines");
    out << r.run_id << ',' << r.model_id << ',' << r.vt << ',' << r.fold << ',' << r.class_id << ','
        << r.counts.tp << ',' << r.counts.fp << ',' << r.counts.fn << ',' << r.counts.tn << ','
        << format_real(r.iou) << ',' << format_real(r.precision) << ',' << format_real(r.recall)
        << "\n";
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, const char* what, std::size_t line_no) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("metric CSV line " + std::to_string(line_no) + ": bad " + what +
                                " '" + s + "'");
  return v;
}

}  // namespace

std::vector<MetricRow> read_metric_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("metric CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricCsvHeader)
    throw std::invalid_argument("unexpected metric CSV header: " + line);
  std::vector<MetricRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12)
      throw std::invalid_argument("metric CSV line " + std::to_string(line_no) + ": expected 12 fields");
    MetricRow r;
    r.run_id = f[0];
    r.model_id = parse_number<int>(f[1], "model_id", line_no);
    r.vt = f[2];
    r.fold = parse_number<int>(f[3], "fold", line_no);
    r.class_id = parse_number<int>(f[4], "class", line_no);
    r.counts.tp = parse_number<std::uint64_t>(f[5], "tp", line_no);
    r.counts.fp = parse_number<std::uint64_t>(f[6], "fp", line_no);
    r.counts.fn = parse_number<std::uint64_t>(f[7], "fn", line_no);
    r.counts.tn = parse_number<std::uint64_t>(f[8], "tn", line_no);
    r.iou = parse_number<double>(f[9], "iou", line_no);
    r.precision = parse_number<double>(f[10], "precision", line_no);
    r.recall = parse_number<double>(f[11], "recall", line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace lidarvt
