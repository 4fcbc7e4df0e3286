#include "lidarvt/vt_params.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace lidarvt {

namespace {

constexpr std::array<std::string_view, 7> kVtNames = {"DEM_C",  "DEM_S",     "SLRM", "DSS",
                                                      "E2MSTP", "E2MSTP_1B", "VAT"};

void check_range(const ScaleRange& r, const char* field) {
  if (r.min < 1 || r.min >= r.max || r.step < 1)
    throw std::invalid_argument(std::string(field) +
                                ": need 1 <= min < max and step >= 1, got (" +
                                std::to_string(r.min) + "," + std::to_string(r.max) + "," +
                                std::to_string(r.step) + ")");
}

ScaleRange range_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_object()) throw std::invalid_argument(std::string(field) + ": expected an object");
  ScaleRange r;
  for (const auto& [key, value] : j.items()) {
    if (key == "min") r.min = value.get<int>();
    else if (key == "max") r.max = value.get<int>();
    else if (key == "step") r.step = value.get<int>();
    else throw std::invalid_argument(std::string(field) + ": unknown key '" + key + "'");
  }
  return r;
}

nlohmann::json range_to_json(const ScaleRange& r) {
  return {{"min", r.min}, {"max", r.max}, {"step", r.step}};
}

}  // namespace

std::string_view to_string(VtName vt) { return kVtNames.at(static_cast<std::size_t>(vt)); }

std::optional<VtName> parse_vt_name(std::string_view name) {
  for (std::size_t i = 0; i < kVtNames.size(); ++i)
    if (kVtNames[i] == name) return static_cast<VtName>(i);
  return std::nullopt;
}

std::string valid_vt_names() {
  std::string out;
  for (auto n : kVtNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

std::size_t vt_band_count(VtName vt) {
  switch (vt) {
    case VtName::DEM_C:
    case VtName::SLRM:
    case VtName::E2MSTP_1B: return 1;
    default: return 3;
  }
}

std::vector<int> ScaleRange::radii() const {
  std::vector<int> out;
  for (int r = min; r <= max; r += step) out.push_back(r);
  return out;
}

void VtParams::validate() const {
  if (svf_directions < 4 || svf_directions % 2 != 0)
    throw std::invalid_argument("svf_directions must be even and >= 4");
  if (svf_radius_px < 1) throw std::invalid_argument("svf_radius_px must be >= 1");
  if (slrm_radius_px < 1) throw std::invalid_argument("slrm_radius_px must be >= 1");
  check_range(mstp_local, "mstp_local");
  check_range(mstp_meso, "mstp_meso");
  check_range(mstp_broad, "mstp_broad");
  if (!(cut_low_pct >= 0.0 && cut_low_pct < cut_high_pct && cut_high_pct <= 100.0))
    throw std::invalid_argument("cut_low_pct/cut_high_pct must satisfy 0 <= low < high <= 100");
}

int VtParams::largest_mstp_radius() const {
  int r = 0;
  for (const auto* range : {&mstp_local, &mstp_meso, &mstp_broad})
    for (int x : range->radii()) r = std::max(r, x);
  return r;
}

nlohmann::json to_json(const VtParams& p) {
  return {{"svf_directions", p.svf_directions},
          {"svf_radius_px", p.svf_radius_px},
          {"slrm_radius_px", p.slrm_radius_px},
          {"mstp_local", range_to_json(p.mstp_local)},
          {"mstp_meso", range_to_json(p.mstp_meso)},
          {"mstp_broad", range_to_json(p.mstp_broad)},
          {"cut_low_pct", p.cut_low_pct},
          {"cut_high_pct", p.cut_high_pct},
          {"e2_flatten", "mean"}};
}

VtParams vt_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("VT parameters must be a JSON object");
  VtParams p;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "svf_directions") p.svf_directions = value.get<int>();
      else if (key == "svf_radius_px") p.svf_radius_px = value.get<int>();
      else if (key == "slrm_radius_px") p.slrm_radius_px = value.get<int>();
      else if (key == "mstp_local") p.mstp_local = range_from_json(value, "mstp_local");
      else if (key == "mstp_meso") p.mstp_meso = range_from_json(value, "mstp_meso");
      else if (key == "mstp_broad") p.mstp_broad = range_from_json(value, "mstp_broad");
      else if (key == "cut_low_pct") p.cut_low_pct = value.get<double>();
      else if (key == "cut_high_pct") p.cut_high_pct = value.get<double>();
      else if (key == "e2_flatten") {
        if (value.get<std::string>() != "mean")
          throw std::invalid_argument("e2_flatten: only \"mean\" is supported");
      } else {
        throw std::invalid_argument("unknown VT parameter '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed VT parameters: ") + e.what());
  }
  p.validate();
  return p;
}

VtParams load_vt_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open parameter file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return vt_params_from_json(j);
}

}  // namespace lidarvt
