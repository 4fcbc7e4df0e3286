#include "lidarvt/vt.hpp"

#include <algorithm>
#include <exception>
#include <map>

#include "lidarvt/focal.hpp"
#include "lidarvt/mstp.hpp"
#include "lidarvt/terrain.hpp"

namespace lidarvt {

namespace {

// Runs one constituent, tagging any failure with its name.
template <typename F>
auto step(std::string_view what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(what) + ": " + e.what());
  }
}

MultiBandImage single_band(const DemGrid& like, std::vector<float> band) {
  std::vector<std::uint8_t> valid;
  if (like.nodata()) {
    valid.assign(like.size(), 1);
    for (std::size_t i = 0; i < like.size(); ++i)
      if (like.is_nodata(i)) valid[i] = 0;
  }
  std::vector<MultiBandImage::Band> bands;
  bands.push_back(std::move(band));
  return MultiBandImage(like.width(), like.height(), std::move(bands), std::move(valid));
}

template <typename Map>
MultiBandImage map_grid(const DemGrid& grid, Map map) {
  std::vector<float> band(grid.size(), 0.0f);
  const auto v = grid.values();
  for (std::size_t i = 0; i < band.size(); ++i)
    if (!grid.is_nodata(i)) band[i] = static_cast<float>(map(static_cast<double>(v[i])));
  return single_band(grid, std::move(band));
}

MultiBandImage stretch(const DemGrid& g, const VtParams& p) {
  return percentile_cut_stretch(g, p.cut_low_pct, p.cut_high_pct);
}

MultiBandImage dispatch(VtName name, const DemGrid& tile, const VtParams& params) {
  switch (name) {
    case VtName::DEM_C:
      return step("stretch", [&] { return stretch(tile, params); });
    case VtName::DEM_S: {
      const auto c = step("stretch", [&] { return stretch(tile, params); });
      return MultiBandImage::stack({&c, &c, &c});
    }
    case VtName::SLRM: {
      const auto relief = step("slrm", [&] { return slrm(tile, params); });
      return step("stretch", [&] { return stretch(relief, params); });
    }
    case VtName::DSS: {
      const auto c = step("stretch", [&] { return stretch(tile, params); });
      const auto s = step("slope", [&] { return map_grid(slope(tile), normalise_slope); });
      const auto relief = step("slrm", [&] { return slrm(tile, params); });
      const auto l = step("stretch", [&] { return stretch(relief, params); });
      return MultiBandImage::stack({&c, &s, &l});
    }
    case VtName::E2MSTP:
      return step("e2mstp", [&] { return e2mstp(tile, params); });
    case VtName::E2MSTP_1B: {
      const auto e2 = step("e2mstp", [&] { return e2mstp(tile, params); });
      std::vector<float> band(e2.pixel_count(), 0.0f);
      for (std::size_t i = 0; i < band.size(); ++i) {
        if (!e2.is_valid(i)) continue;
        const double sum = static_cast<double>(e2.band(0)[i]) + e2.band(1)[i] + e2.band(2)[i];
        band[i] = static_cast<float>(sum / 3.0);
      }
      return MultiBandImage(e2.width(), e2.height(), {std::move(band)}, e2.validity());
    }
    case VtName::VAT: {
      const auto s = step("slope", [&] { return map_grid(slope(tile), normalise_slope); });
      const auto o = step("openness", [&] {
        return map_grid(positive_openness(tile, params), normalise_openness);
      });
      const auto v = step("sky_view_factor", [&] {
        return map_grid(sky_view_factor(tile, params), normalise_svf);
      });
      return MultiBandImage::stack({&s, &o, &v});
    }
  }
  throw std::invalid_argument("unknown visualisation");
}

}  // namespace

double normalise_slope(double degrees) {
  return std::clamp(degrees / kSlopeDisplayMaxDeg, 0.0, 1.0);
}

double normalise_openness(double degrees) {
  return std::clamp((degrees - kOpennessDisplayMinDeg) /
                        (kOpennessDisplayMaxDeg - kOpennessDisplayMinDeg),
                    0.0, 1.0);
}

double normalise_svf(double svf) {
  return std::clamp((svf - kSvfDisplayMin) / (1.0 - kSvfDisplayMin), 0.0, 1.0);
}

MultiBandImage compute_vt(VtName name, const DemGrid& tile, const VtParams& params) {
  try {
    params.validate();
    MultiBandImage out = dispatch(name, tile, params);
    out.check_invariants();
    return out;
  } catch (const std::exception& e) {
    throw VtError(std::string(to_string(name)) + ": " + e.what());
  }
}

nlohmann::json vt_sidecar(VtName name, const VtParams& params, const MultiBandImage& image) {
  static const std::map<VtName, std::vector<std::string>> kBandNames = {
      {VtName::DEM_C, {"dem_c"}},
      {VtName::DEM_S, {"dem_c", "dem_c", "dem_c"}},
      {VtName::SLRM, {"slrm"}},
      {VtName::DSS, {"dem_c", "slope", "slrm"}},
      {VtName::E2MSTP, {"broad", "meso", "local"}},
      {VtName::E2MSTP_1B, {"e2mstp_mean"}},
      {VtName::VAT, {"slope", "openness", "sky_view_factor"}},
  };
  return {{"vt", std::string(to_string(name))},
          {"params", to_json(params)},
          {"bands", kBandNames.at(name)},
          {"width", image.width()},
          {"height", image.height()},
          {"value_range", {0.0, 1.0}},
          {"display_ranges",
           {{"slope_deg", {0.0, kSlopeDisplayMaxDeg}},
            {"openness_deg", {kOpennessDisplayMinDeg, kOpennessDisplayMaxDeg}},
            {"sky_view_factor", {kSvfDisplayMin, 1.0}}}}};
}

}  // namespace lidarvt
