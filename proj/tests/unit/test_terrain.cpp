#include <cmath>
#include <gtest/gtest.h>
#include <numbers>

#include "lidarvt/terrain.hpp"
#include "oracles.hpp"

using namespace lidarvt;

namespace {

VtParams horizon_params(int n, int radius) {
  VtParams p;
  p.svf_directions = n;
  p.svf_radius_px = radius;
  return p;
}

// 90 degrees counter-clockwise: the east column becomes the top row.
DemGrid rotate_ccw(const DemGrid& g) {
  DemGrid out(g.height(), g.width(), g.gsd());
  for (int r = 0; r < out.height(); ++r)
    for (int c = 0; c < out.width(); ++c) out(r, c) = g(c, g.width() - 1 - r);
  return out;
}

// Random grid on a 1/1024 lattice so adding 1024 is exact in float.
DemGrid dyadic_grid(int w, int h, std::uint64_t seed) {
  DemGrid g = oracle::random_grid(w, h, seed, 0.0, 8.0);
  for (auto& v : g.values()) v = std::round(v * 1024.0f) / 1024.0f;
  return g;
}

DemGrid with_nodata_holes(DemGrid g, int modulo) {
  g.set_nodata(-9999.0f);
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c)
      if ((r * 5 + c * 3) % modulo == 0) g(r, c) = -9999.0f;
  return g;
}

}  // namespace

TEST(Slope, FlatIsZero) {
  const DemGrid s = slope(DemGrid(10, 10, 0.5, 7.0f));
  for (float v : s.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Slope, PlaneZEqualsXIs45Degrees) {
  DemGrid g(16, 12, 1.0);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 16; ++c) g(r, c) = static_cast<float>(c);
  const DemGrid s = slope(g);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 16; ++c) EXPECT_NEAR(s(r, c), 45.0, 1e-4) << r << "," << c;
}

TEST(Slope, GsdScalesDistances) {
  DemGrid g(8, 8, 0.5);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) g(r, c) = static_cast<float>(0.5 * r);  // rises southward, 1 m/m
  const DemGrid s = slope(g);
  EXPECT_NEAR(s(4, 4), 45.0, 1e-4);
}

TEST(Slope, Random8x8MatchesHornOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DemGrid g = oracle::random_grid(8, 8, seed, 0.0, 5.0, seed % 2 ? 0.5 : 1.0);
    const auto deg = detail::slope_degrees(g);
    const DemGrid s = slope(g);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) {
        const double expect = oracle::slope_deg(g, r, c);
        EXPECT_NEAR(deg[g.index(r, c)], expect, 1e-9) << r << "," << c;
        EXPECT_EQ(s(r, c), static_cast<float>(deg[g.index(r, c)]));
      }
  }
}

TEST(Slope, NodataNeighboursFallBackAndCentresStayNodata) {
  const DemGrid g = with_nodata_holes(oracle::random_grid(12, 10, 4), 7);
  const auto deg = detail::slope_degrees(g);
  const DemGrid s = slope(g);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 12; ++c) {
      if (g.is_nodata(r, c)) {
        EXPECT_TRUE(s.is_nodata(r, c));
        continue;
      }
      EXPECT_NEAR(deg[g.index(r, c)], oracle::slope_deg(g, r, c), 1e-9) << r << "," << c;
    }
}

TEST(Slope, NonNegativeAndBelowNinety) {
  const DemGrid s = slope(oracle::random_grid(20, 20, 77, -100.0, 100.0));
  for (float v : s.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LT(v, 90.0f);
  }
}

TEST(Slope, TooSmall) {
  EXPECT_THROW(slope(DemGrid(2, 5)), std::invalid_argument);
}

TEST(HorizonRays, SamplingPattern) {
  const auto rays = horizon_rays(8, 3);
  ASSERT_EQ(rays.size(), 8u);
  // East: (0,1), (0,2), (0,3).
  ASSERT_EQ(rays[0].size(), 3u);
  EXPECT_EQ(rays[0][2].dcol, 3);
  EXPECT_EQ(rays[0][2].drow, 0);
  // North is up: negative rows.
  EXPECT_EQ(rays[2][0].drow, -1);
  EXPECT_EQ(rays[2][0].dcol, 0);
  // North-east: k=1 -> (1,1) dist 1.41; k=2 -> (1,1) repeat dropped; k=3 -> (2,2) dist 2.83.
  ASSERT_EQ(rays[1].size(), 2u);
  EXPECT_EQ(rays[1][1].dcol, 2);
  EXPECT_DOUBLE_EQ(rays[1][1].distance_px, std::sqrt(8.0));
}

TEST(HorizonAngles, FlatIsZero) {
  const DemGrid g(15, 15, 1.0, 3.0f);
  for (double gamma : horizon_angles(g, 7, 7, horizon_params(16, 5))) EXPECT_EQ(gamma, 0.0);
}

TEST(HorizonAngles, ConeGives45Degrees) {
  DemGrid g(21, 21, 1.0);
  for (int r = 0; r < 21; ++r)
    for (int c = 0; c < 21; ++c) g(r, c) = static_cast<float>(5.0 + std::hypot(r - 10.0, c - 10.0));
  for (double gamma : horizon_angles(g, 10, 10, horizon_params(16, 8)))
    EXPECT_NEAR(gamma, std::numbers::pi / 4, 1e-6);
}

TEST(HorizonAngles, Random32MatchesRayWalkExactly) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DemGrid g = oracle::random_grid(32, 32, 900 + seed);
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) {
        const auto got = horizon_angles(g, r, c, horizon_params(8, 5));
        const auto expect = oracle::horizon(g, r, c, 8, 5);
        ASSERT_EQ(got, expect) << r << "," << c;
      }
  }
}

TEST(HorizonAngles, EdgeRaysAreEmpty) {
  const DemGrid g = oracle::random_grid(6, 6, 1);
  const auto gamma = horizon_angles(g, 0, 5, horizon_params(4, 3));
  EXPECT_EQ(gamma[0], 0.0);  // east of the last column
  EXPECT_EQ(gamma[1], 0.0);  // north of the first row
  EXPECT_THROW(horizon_angles(g, 6, 0, horizon_params(4, 3)), std::out_of_range);
}

TEST(SkyView, FlatIsOne) {
  const DemGrid s = sky_view_factor(DemGrid(20, 20, 0.5, 1.0f), VtParams{});
  for (float v : s.values()) EXPECT_EQ(v, 1.0f);
}

TEST(SkyView, UniformHorizon45) {
  DemGrid g(31, 31, 1.0);
  for (int r = 0; r < 31; ++r)
    for (int c = 0; c < 31; ++c) g(r, c) = static_cast<float>(std::hypot(r - 15.0, c - 15.0));
  const DemGrid s = sky_view_factor(g, VtParams{});
  EXPECT_NEAR(s(15, 15), 1.0 - std::sin(std::numbers::pi / 4), 1e-6);
  EXPECT_NEAR(s(15, 15), 0.29289, 1e-5);
}

TEST(SkyView, RandomMatchesOracleComposition) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DemGrid g = oracle::random_grid(32, 32, 40 + seed);
    const VtParams p = horizon_params(16, 6);
    const auto svf = detail::sky_view_factor_values(g, p);
    const DemGrid out = sky_view_factor(g, p);
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) {
        const std::size_t i = g.index(r, c);
        ASSERT_NEAR(svf[i], oracle::svf(g, r, c, 16, 6), 1e-9) << r << "," << c;
        ASSERT_EQ(out.values()[i], static_cast<float>(svf[i]));
      }
  }
}

TEST(SkyView, RangeAndNodata) {
  const DemGrid g = with_nodata_holes(oracle::random_grid(25, 25, 8, 0.0, 30.0), 9);
  const VtParams p = horizon_params(8, 4);
  const auto svf = detail::sky_view_factor_values(g, p);
  const DemGrid out = sky_view_factor(g, p);
  for (int r = 0; r < 25; ++r)
    for (int c = 0; c < 25; ++c) {
      if (g.is_nodata(r, c)) {
        EXPECT_TRUE(out.is_nodata(r, c));
        continue;
      }
      EXPECT_GE(out(r, c), 0.0f);
      EXPECT_LE(out(r, c), 1.0f);
      EXPECT_NEAR(svf[g.index(r, c)], oracle::svf(g, r, c, 8, 4), 1e-9);
    }
}

TEST(Openness, FlatIsNinety) {
  const DemGrid o = positive_openness(DemGrid(20, 20, 1.0, 4.0f), VtParams{});
  for (float v : o.values()) EXPECT_EQ(v, 90.0f);
}

TEST(Openness, PitWallsAt45) {
  DemGrid g(31, 31, 1.0);
  for (int r = 0; r < 31; ++r)
    for (int c = 0; c < 31; ++c) g(r, c) = static_cast<float>(std::hypot(r - 15.0, c - 15.0));
  EXPECT_NEAR(positive_openness(g, VtParams{})(15, 15), 45.0, 1e-4);
}

TEST(Openness, RidgeAboveNinetyPitBelow) {
  DemGrid ridge(21, 21, 1.0), pit(21, 21, 1.0);
  for (int r = 0; r < 21; ++r)
    for (int c = 0; c < 21; ++c) {
      const double d = std::abs(c - 10.0);
      ridge(r, c) = static_cast<float>(10.0 - 0.3 * d);
      pit(r, c) = static_cast<float>(0.3 * d);
    }
  EXPECT_GT(positive_openness(ridge, VtParams{})(10, 10), 90.0f);
  EXPECT_LT(positive_openness(pit, VtParams{})(10, 10), 90.0f);
}

TEST(Openness, RandomMatchesOracleComposition) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DemGrid g = oracle::random_grid(32, 32, 70 + seed);
    if (seed == 4) g = with_nodata_holes(g, 11);
    const VtParams p = horizon_params(16, 7);
    const auto open = detail::openness_degrees(g, p);
    const DemGrid out = positive_openness(g, p);
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) {
        if (g.is_nodata(r, c)) continue;
        const std::size_t i = g.index(r, c);
        ASSERT_NEAR(open[i], oracle::openness(g, r, c, 16, 7), 1e-9) << r << "," << c;
        ASSERT_EQ(out.values()[i], static_cast<float>(open[i]));
      }
  }
}

TEST(Horizon, RejectsBadDirectionCounts) {
  const DemGrid g(8, 8);
  EXPECT_THROW(sky_view_factor(g, horizon_params(6 - 1, 3)), std::invalid_argument);
  EXPECT_THROW(positive_openness(g, horizon_params(2, 3)), std::invalid_argument);
}

TEST(Slrm, ConstantIsZero) {
  const DemGrid s = slrm(DemGrid(50, 50, 1.0, 9.0f), VtParams{});
  for (float v : s.values()) EXPECT_EQ(v, 0.0f);
}

TEST(Slrm, RampInteriorIsZero) {
  DemGrid g(60, 50);
  for (int r = 0; r < 50; ++r)
    for (int c = 0; c < 60; ++c) g(r, c) = static_cast<float>(0.1 * c + 0.05 * r);
  VtParams p;
  p.slrm_radius_px = 10;
  const DemGrid s = slrm(g, p);
  for (int r = 10; r < 40; ++r)
    for (int c = 10; c < 50; ++c) EXPECT_NEAR(s(r, c), 0.0, 1e-6);
}

TEST(Slrm, BumpIsPositiveWithNegativeRing) {
  DemGrid g(41, 41, 1.0, 0.0f);
  g(20, 20) = 1.0f;
  VtParams p;
  p.slrm_radius_px = 5;
  const DemGrid s = slrm(g, p);
  EXPECT_GT(s(20, 20), 0.0f);
  EXPECT_LT(s(20, 23), 0.0f);
  EXPECT_NEAR(s(0, 0), 0.0, 1e-12);
  // Every window touching the bump lies inside the raster, so the relief sums to 0.
  double total = 0.0;
  for (float v : s.values()) total += v;
  EXPECT_NEAR(total, 0.0, 1e-6);
  for (int r = 0; r < 41; ++r)
    for (int c = 0; c < 41; ++c) EXPECT_NEAR(s(r, c), oracle::slrm(g, r, c, 5), 1e-7);
}

TEST(Slrm, RandomMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DemGrid g = oracle::random_grid(32, 32, 300 + seed);
    if (seed == 4) g = with_nodata_holes(g, 6);
    VtParams p;  // radius 20
    const auto relief = detail::slrm_values(g, p);
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c) {
        if (g.is_nodata(r, c)) continue;
        ASSERT_NEAR(relief[g.index(r, c)], oracle::slrm(g, r, c, 20), 1e-9);
      }
  }
}

TEST(Slrm, RadiusTooLarge) {
  VtParams p;
  p.slrm_radius_px = 20;
  EXPECT_THROW(slrm(DemGrid(20, 40), p), std::invalid_argument);
}

TEST(TerrainProperties, TranslationInvariance) {
  const DemGrid g = dyadic_grid(32, 32, 12);
  DemGrid shifted = g;
  for (auto& v : shifted.values()) v += 1024.0f;
  const VtParams p = horizon_params(16, 6);
  auto expect_same = [](const DemGrid& a, const DemGrid& b) {
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a.values()[i], b.values()[i], 1e-6);
  };
  expect_same(slope(g), slope(shifted));
  expect_same(sky_view_factor(g, p), sky_view_factor(shifted, p));
  expect_same(positive_openness(g, p), positive_openness(shifted, p));
  VtParams small;
  small.slrm_radius_px = 7;
  expect_same(slrm(g, small), slrm(shifted, small));
}

TEST(TerrainProperties, RotationConsistency) {
  const DemGrid g = oracle::random_grid(24, 18, 5);
  const DemGrid rg = rotate_ccw(g);
  for (int n : {8, 16}) {
    const VtParams p = horizon_params(n, 5);
    const DemGrid a = rotate_ccw(sky_view_factor(g, p));
    const DemGrid b = sky_view_factor(rg, p);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a.values()[i], b.values()[i], 1e-6);
    const DemGrid oa = rotate_ccw(positive_openness(g, p));
    const DemGrid ob = positive_openness(rg, p);
    for (std::size_t i = 0; i < oa.size(); ++i) ASSERT_NEAR(oa.values()[i], ob.values()[i], 1e-4);
  }
  const DemGrid sa = rotate_ccw(slope(g));
  const DemGrid sb = slope(rg);
  for (std::size_t i = 0; i < sa.size(); ++i) ASSERT_NEAR(sa.values()[i], sb.values()[i], 1e-6);
}
