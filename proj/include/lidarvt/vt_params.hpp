#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lidarvt {

/// The seven visualisation techniques.
enum class VtName { DEM_C, DEM_S, SLRM, DSS, E2MSTP, E2MSTP_1B, VAT };

inline constexpr std::array<VtName, 7> kAllVts = {VtName::DEM_C, VtName::DEM_S,  VtName::SLRM,
                                                  VtName::DSS,   VtName::E2MSTP, VtName::E2MSTP_1B,
                                                  VtName::VAT};

std::string_view to_string(VtName vt);
std::optional<VtName> parse_vt_name(std::string_view name);
/// Comma-separated list of the valid names, for error messages.
std::string valid_vt_names();
std::size_t vt_band_count(VtName vt);

/// Inclusive radius range min, min+step, ..., <= max (pixels).
struct ScaleRange {
  int min = 1;
  int max = 10;
  int step = 1;

  std::vector<int> radii() const;
  bool operator==(const ScaleRange&) const = default;
};

enum class FlattenMode { mean };

struct VtParams {
  int svf_directions = 16;
  int svf_radius_px = 10;
  int slrm_radius_px = 20;
  ScaleRange mstp_local{1, 10, 1};
  ScaleRange mstp_meso{10, 50, 5};
  ScaleRange mstp_broad{50, 100, 10};
  double cut_low_pct = 1.0;
  double cut_high_pct = 99.0;
  FlattenMode e2_flatten = FlattenMode::mean;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  int largest_mstp_radius() const;

  bool operator==(const VtParams&) const = default;
};

/// JSON keys mirror the field names; ranges are {"min","max","step"} objects.
nlohmann::json to_json(const VtParams& params);
/// Missing keys keep their defaults; unknown keys are rejected.
VtParams vt_params_from_json(const nlohmann::json& j);
VtParams load_vt_params(const std::filesystem::path& path);

}  // namespace lidarvt
