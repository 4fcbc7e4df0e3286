#include "lidarvt/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace lidarvt {

void EvalRecord::validate() const {
  if (model_id < kMinModelId || model_id > kMaxModelId)
    throw std::invalid_argument("model_id " + std::to_string(model_id) + " is outside [1,8]");
  if (fold < 0) throw std::invalid_argument("fold must be >= 0");
  if (class_id < 1) throw std::invalid_argument("class id must be >= 1");
  for (double m : {iou, precision, recall})
    if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("metric outside [0,1]");
}

std::vector<EvalRecord> records_from_rows(const std::vector<MetricRow>& rows) {
  std::vector<EvalRecord> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto vt = parse_vt_name(row.vt);
    if (!vt)
      throw std::invalid_argument("unknown VT '" + row.vt + "' (valid: " + valid_vt_names() + ")");
    EvalRecord r{row.model_id, *vt, row.fold, row.class_id, row.iou, row.precision, row.recall};
    r.validate();
    out.push_back(r);
  }
  return out;
}

std::vector<FoldMeanRecord> fold_mean(const std::vector<EvalRecord>& records, int expected_folds) {
  if (records.empty()) throw std::invalid_argument("fold_mean: no records");
  if (expected_folds < 0) throw std::invalid_argument("expected fold count must be >= 0");

  using Key = std::tuple<int, VtName, int>;
  std::map<Key, std::map<int, const EvalRecord*>> groups;
  for (const auto& r : records) {
    r.validate();
    auto& folds = groups[{r.model_id, r.vt, r.class_id}];
    if (!folds.emplace(r.fold, &r).second)
      throw std::invalid_argument("duplicate record for model " + std::to_string(r.model_id) + ", " +
                                  std::string(to_string(r.vt)) + ", fold " + std::to_string(r.fold) +
                                  ", class " + std::to_string(r.class_id));
  }

  int full = expected_folds;
  if (full == 0)
    for (const auto& [key, folds] : groups) full = std::max(full, static_cast<int>(folds.size()));

  std::vector<FoldMeanRecord> out;
  out.reserve(groups.size());
  for (const auto& [key, folds] : groups) {
    FoldMeanRecord m;
    std::tie(m.model_id, m.vt, m.class_id) = key;
    // Sum in fold order so the result does not depend on record order.
    for (const auto& [fold, r] : folds) {
      m.iou += r->iou;
      m.precision += r->precision;
      m.recall += r->recall;
    }
    m.n_folds = static_cast<int>(folds.size());
    m.iou /= m.n_folds;
    m.precision /= m.n_folds;
    m.recall /= m.n_folds;
    m.incomplete = m.n_folds < full;
    out.push_back(m);
  }
  return out;
}

namespace {

BestEntry entry_from(const FoldMeanRecord& r) {
  return {r.vt, r.class_id, r.model_id, r.iou, r.precision, r.recall, r.incomplete};
}

// Strictly better, or equal with a lower model id.
bool beats(const FoldMeanRecord& a, const FoldMeanRecord& b) {
  return a.iou > b.iou || (a.iou == b.iou && a.model_id < b.model_id);
}

}  // namespace

std::vector<BestEntry> best_per_vt_class(const std::vector<FoldMeanRecord>& records, BestMode mode) {
  if (records.empty()) throw std::invalid_argument("best_per_vt_class: no records");

  std::map<std::pair<VtName, int>, const FoldMeanRecord*> best;
  if (mode == BestMode::per_vt_class) {
    for (const auto& r : records) {
      auto [it, inserted] = best.emplace(std::pair{r.vt, r.class_id}, &r);
      if (!inserted && beats(r, *it->second)) it->second = &r;
    }
  } else {
    // Mean IoU over classes for every (vt, model), summed in class order.
    std::map<std::pair<VtName, int>, std::map<int, double>> per_model;
    for (const auto& r : records) per_model[{r.vt, r.model_id}][r.class_id] = r.iou;
    std::map<VtName, std::pair<int, double>> chosen;
    for (const auto& [key, classes] : per_model) {
      double sum = 0.0;
      for (const auto& [c, v] : classes) sum += v;
      const double mean = sum / static_cast<double>(classes.size());
      auto [it, inserted] = chosen.emplace(key.first, std::pair{key.second, mean});
      // Models arrive in ascending id order, so only a strictly larger mean wins.
      if (!inserted && mean > it->second.second) it->second = {key.second, mean};
    }
    for (const auto& r : records)
      if (chosen.at(r.vt).first == r.model_id) best[{r.vt, r.class_id}] = &r;
  }

  std::vector<BestEntry> out;
  out.reserve(best.size());
  for (const auto& [key, r] : best) out.push_back(entry_from(*r));
  return out;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

namespace {

VariabilityRow spread(std::string group, std::optional<int> class_id, std::vector<double> values) {
  VariabilityRow row;
  row.group = std::move(group);
  row.class_id = class_id;
  row.n = static_cast<int>(values.size());
  row.min = *std::min_element(values.begin(), values.end());
  row.max = *std::max_element(values.begin(), values.end());
  row.median = median_of(std::move(values));
  row.range = row.max - row.min;
  return row;
}

}  // namespace

std::vector<VariabilityRow> variability(const std::vector<FoldMeanRecord>& records, GroupBy group_by) {
  if (records.empty()) throw std::invalid_argument("variability: no records");

  // Keyed by the group's sort position so VTs keep their canonical order.
  std::map<int, std::map<int, std::vector<double>>> by_group;
  for (const auto& r : records) {
    const int g = group_by == GroupBy::vt ? static_cast<int>(r.vt) : r.model_id;
    by_group[g][r.class_id].push_back(r.iou);
  }

  std::vector<VariabilityRow> out;
  for (const auto& [g, classes] : by_group) {
    const std::string name = group_by == GroupBy::vt ? std::string(to_string(static_cast<VtName>(g)))
                                                     : std::to_string(g);
    std::vector<double> pooled;
    for (const auto& [c, values] : classes) {
      out.push_back(spread(name, c, values));
      pooled.insert(pooled.end(), values.begin(), values.end());
    }
    out.push_back(spread(name, std::nullopt, std::move(pooled)));
  }
  return out;
}

RunSummary summarise(const std::vector<EvalRecord>& records, BestMode mode, int expected_folds) {
  const auto means = fold_mean(records, expected_folds);
  return {best_per_vt_class(means, mode), variability(means, GroupBy::vt),
          variability(means, GroupBy::model)};
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_field(const std::string& s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("bad ") + what + " '" + s + "'");
  return v;
}

VtName parse_vt_field(const std::string& s) {
  const auto vt = parse_vt_name(s);
  if (!vt) throw std::invalid_argument("unknown VT '" + s + "'");
  return *vt;
}

bool parse_flag(const std::string& s) {
  if (s == "0") return false;
  if (s == "1") return true;
  throw std::invalid_argument("bad flag '" + s + "'");
}

// Reads a CSV body after checking its header; calls `row` per data line.
template <typename F>
void read_csv(std::istream& in, const char* header, std::size_t fields, F&& row) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::invalid_argument("unexpected CSV header: " + line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != fields)
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(fields) + " fields");
    try {
      row(f);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace

void write_best_csv(std::ostream& out, const std::vector<BestEntry>& rows) {
  out << kBestCsvHeader << "\n";
  for (const auto& r : rows)
    out << to_string(r.vt) << ',' << r.class_id << ',' << r.model_id << ',' << format_real(r.iou)
        << ',' << format_real(r.precision) << ',' << format_real(r.recall) << ','
        << (r.incomplete ? 1 : 0) << "\n";
}

std::vector<BestEntry> read_best_csv(std::istream& in) {
  std::vector<BestEntry> rows;
  read_csv(in, kBestCsvHeader, 7, [&](const std::vector<std::string>& f) {
    BestEntry e;
    e.vt = parse_vt_field(f[0]);
    e.class_id = parse_field<int>(f[1], "class");
    e.model_id = parse_field<int>(f[2], "model_id");
    e.iou = parse_field<double>(f[3], "iou");
    e.precision = parse_field<double>(f[4], "precision");
    e.recall = parse_field<double>(f[5], "recall");
    e.incomplete = parse_flag(f[6]);
    rows.push_back(e);
  });
  return rows;
}

void write_variability_csv(std::ostream& out, const std::vector<VariabilityRow>& rows,
                           GroupBy group_by) {
  out << (group_by == GroupBy::vt ? kVariabilityByVtHeader : kVariabilityByModelHeader) << "\n";
  for (const auto& r : rows)
    out << r.group << ',' << (r.class_id ? std::to_string(*r.class_id) : std::string("all")) << ','
        << r.n << ',' << format_real(r.min) << ',' << format_real(r.median) << ','
        << format_real(r.max) << ',' << format_real(r.range) << "\n";
}

std::vector<VariabilityRow> read_variability_csv(std::istream& in, GroupBy group_by) {
  std::vector<VariabilityRow> rows;
  const char* header = group_by == GroupBy::vt ? kVariabilityByVtHeader : kVariabilityByModelHeader;
  read_csv(in, header, 7, [&](const std::vector<std::string>& f) {
    VariabilityRow r;
    r.group = f[0];
    if (group_by == GroupBy::vt) parse_vt_field(r.group);
    else parse_field<int>(r.group, "model_id");
    if (f[1] != "all") r.class_id = parse_field<int>(f[1], "class");
    r.n = parse_field<int>(f[2], "n");
    r.min = parse_field<double>(f[3], "min");
    r.median = parse_field<double>(f[4], "median");
    r.max = parse_field<double>(f[5], "max");
    r.range = parse_field<double>(f[6], "range");
    rows.push_back(std::move(r));
  });
  return rows;
}

void write_fold_mean_csv(std::ostream& out, const std::vector<FoldMeanRecord>& rows) {
  out << kFoldMeanCsvHeader << "\n";
  for (const auto& r : rows)
    out << r.model_id << ',' << to_string(r.vt) << ',' << r.class_id << ',' << format_real(r.iou)
        << ',' << format_real(r.precision) << ',' << format_real(r.recall) << ',' << r.n_folds << ','
        << (r.incomplete ? 1 : 0) << "\n";
}

std::string summary_text(const RunSummary& summary, const ClassCatalog& catalog) {
  // Best entry per class across every VT; ties keep the earlier VT.
  std::map<int, const BestEntry*> per_class;
  for (const auto& e : summary.best) {
    auto [it, inserted] = per_class.emplace(e.class_id, &e);
    if (!inserted && e.iou > it->second->iou) it->second = &e;
  }
  std::vector<const BestEntry*> ranked;
  for (const auto& [c, e] : per_class) ranked.push_back(e);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const BestEntry* a, const BestEntry* b) { return a->iou > b->iou; });

  std::ostringstream out;
  out << "Classes ranked by best validation IoU\n";
  int rank = 1;
  for (const auto* e : ranked) {
    const std::string name =
        catalog.contains(e->class_id) ? catalog.name_of(e->class_id) : "class " + std::to_string(e->class_id);
    out << rank++ << ". " << name << ": IoU " << format_real(e->iou) << " (" << to_string(e->vt)
        << ", model " << e->model_id << (e->incomplete ? ", incomplete folds" : "") << ")\n";
  }
  bool any_incomplete = false;
  for (const auto& e : summary.best) any_incomplete = any_incomplete || e.incomplete;
  out << "\nIoU, precision and recall are accumulated over all pixels of a fold (micro), then\n"
         "averaged over folds. Empty denominators count as 1.0. Per-tile averaging would\n"
         "give different numbers.\n";
  if (any_incomplete) out << "Some groups are missing folds; their means use the folds present.\n";
  return out.str();
}

void write_report(const RunSummary& summary, const std::vector<FoldMeanRecord>& fold_means,
                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("best_per_vt_class.csv");
    write_best_csv(out, summary.best);
  }
  {
    auto out = open("variability_by_vt.csv");
    write_variability_csv(out, summary.by_vt, GroupBy::vt);
  }
  {
    auto out = open("variability_by_model.csv");
    write_variability_csv(out, summary.by_model, GroupBy::model);
  }
  {
    auto out = open("fold_means.csv");
    write_fold_mean_csv(out, fold_means);
  }
}

}  // namespace lidarvt
