#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "uwloc/environment.hpp"

using namespace uwloc;

namespace {

// Frozen from tests/oracles/formula_oracle.py (exact rational / 40-digit
// evaluation of the published coefficients).
constexpr double kSpeed10C35S0m = 1489.8034;
constexpr double kSpeed10C35S1000m = 1506.263761;
constexpr double kAbsorption10kHz = 0.9865722856253996;
constexpr double kAbsorption10kHzAt5000m = 0.5070551577553783;

Layer layer(double thickness, double t = 10.0, double s = 35.0, double ph = 8.0) {
  return {thickness, t, s, ph};
}

}  // namespace

TEST(WaterColumn, SingleLayerTotalDepth) {
  const WaterColumn c = build_water_column({layer(100.0)});
  EXPECT_EQ(c.size(), 1u);
  EXPECT_DOUBLE_EQ(c.total_depth(), 100.0);
}

TEST(WaterColumn, BoundariesArePrefixSums) {
  const WaterColumn c = build_water_column({layer(50.0), layer(150.0)});
  ASSERT_EQ(c.boundaries().size(), 3u);
  EXPECT_EQ(c.boundaries()[0], 0.0);
  EXPECT_EQ(c.boundaries()[1], 50.0);
  EXPECT_EQ(c.boundaries()[2], 200.0);
  EXPECT_EQ(c.mid_depth(1), 125.0);
}

TEST(WaterColumn, RejectsEmptyAndInvalidLayers) {
  EXPECT_THROW(build_water_column({}), ValidationError);
  EXPECT_THROW(build_water_column({layer(-5.0)}), ValidationError);
  EXPECT_THROW(build_water_column({layer(10.0, 45.0)}), ValidationError);
  EXPECT_THROW(build_water_column({layer(10.0, 10.0, 43.0)}), ValidationError);
  EXPECT_THROW(build_water_column({layer(10.0, 10.0, 35.0, 5.5)}), ValidationError);
}

TEST(WaterColumn, ValidationMessageNamesField) {
  try {
    build_water_column({layer(10.0), layer(10.0, 10.0, 35.0, 9.5)});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("layer[1].ph"), std::string::npos) << e.what();
  }
}

TEST(LayerIndex, BoundaryConventions) {
  const WaterColumn c = build_water_column({layer(50.0), layer(150.0)});
  EXPECT_EQ(layer_index_at(c, 0.0), 0u);
  EXPECT_EQ(layer_index_at(c, 49.999), 0u);
  EXPECT_EQ(layer_index_at(c, 50.0), 1u);
  EXPECT_EQ(layer_index_at(c, 200.0), 1u);
  EXPECT_THROW(layer_index_at(c, -0.1), RangeError);
  EXPECT_THROW(layer_index_at(c, 200.1), RangeError);
}

TEST(SoundSpeed, MatchesOracle) {
  EXPECT_NEAR(sound_speed(10.0, 35.0, 0.0), kSpeed10C35S0m, 1e-12 * kSpeed10C35S0m);
  EXPECT_NEAR(sound_speed(10.0, 35.0, 1000.0), kSpeed10C35S1000m, 1e-12 * kSpeed10C35S1000m);
  EXPECT_GT(sound_speed(20.0, 35.0, 0.0), sound_speed(10.0, 35.0, 0.0));
}

TEST(SoundSpeed, DomainErrors) {
  EXPECT_THROW(sound_speed(41.0, 35.0, 0.0), DomainError);
  EXPECT_THROW(sound_speed(10.0, -1.0, 0.0), DomainError);
  EXPECT_THROW(sound_speed(10.0, 35.0, -1.0), DomainError);
}

TEST(SoundSpeed, PureAndDeterministic) {
  const double a = sound_speed(12.3, 34.1, 321.0);
  const double b = sound_speed(12.3, 34.1, 321.0);
  EXPECT_EQ(a, b);
}

TEST(SoundSpeed, IncreasesWithTemperatureOnHalfDegreeGrid) {
  double prev = sound_speed(0.0, 35.0, 0.0);
  for (double t = 0.5; t <= 30.0; t += 0.5) {
    const double c = sound_speed(t, 35.0, 0.0);
    EXPECT_GT(c, prev) << "T=" << t;
    prev = c;
  }
}

TEST(SoundSpeed, IncreasesWithDepthOnTenMetreGrid) {
  for (double t : {0.0, 10.0, 25.0}) {
    double prev = sound_speed(t, 35.0, 0.0);
    for (double d = 10.0; d <= 4000.0; d += 10.0) {
      const double c = sound_speed(t, 35.0, d);
      EXPECT_GT(c, prev) << "T=" << t << " D=" << d;
      prev = c;
    }
  }
}

TEST(Absorption, MatchesOracle) {
  EXPECT_NEAR(absorption_coeff(10.0, 10.0, 35.0, 8.0, 0.0), kAbsorption10kHz,
              1e-12 * kAbsorption10kHz);
  EXPECT_NEAR(absorption_coeff(10.0, 10.0, 35.0, 8.0, 5000.0), kAbsorption10kHzAt5000m,
              1e-12 * kAbsorption10kHzAt5000m);
}

TEST(Absorption, DepthReducesAbsorption) {
  EXPECT_GT(absorption_coeff(10.0, 10.0, 35.0, 8.0, 0.0),
            absorption_coeff(10.0, 10.0, 35.0, 8.0, 5000.0));
}

TEST(Absorption, RejectsNonPositiveFrequency) {
  EXPECT_THROW(absorption_coeff(0.0, 10.0, 35.0, 8.0, 0.0), DomainError);
  EXPECT_THROW(absorption_coeff(-3.0, 10.0, 35.0, 8.0, 0.0), DomainError);
}

// Strict monotonicity in frequency on a log grid, over a spread of valid
// (T, S, pH, z) combinations including fresh water.
TEST(Absorption, StrictlyIncreasingInFrequency) {
  const std::vector<std::array<double, 4>> media = {
      {10.0, 35.0, 8.0, 0.0}, {-2.0, 0.0, 6.0, 0.0},  {40.0, 42.0, 9.0, 6000.0},
      {4.0, 34.7, 7.9, 3000.0}, {25.0, 20.0, 8.3, 50.0}};
  for (const auto& m : media) {
    double prev = 0.0;
    for (int k = 0; k <= 90; ++k) {
      const double f = 0.1 * std::pow(10.0, 3.0 * k / 90.0);
      const double a = absorption_coeff(f, m[0], m[1], m[2], m[3]);
      EXPECT_GE(a, 0.0);
      if (k > 0) {
        EXPECT_GT(a, prev) << "f=" << f;
      }
      prev = a;
    }
  }
}

TEST(AcousticsProfile, SingleLayerMatchesDirectCalls) {
  const WaterColumn c = build_water_column({layer(100.0, 12.0, 34.0, 7.9)});
  const auto p = acoustics_profile(c, 12.0);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].sound_speed, sound_speed(12.0, 34.0, 50.0));
  EXPECT_EQ(p[0].absorption, absorption_coeff(12.0, 12.0, 34.0, 7.9, 50.0));
}

TEST(AcousticsProfile, IdenticalLayersDifferOnlyThroughDepth) {
  const WaterColumn c = build_water_column({layer(100.0), layer(100.0)});
  const auto p = acoustics_profile(c, 10.0);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].sound_speed, sound_speed(10.0, 35.0, 50.0));
  EXPECT_EQ(p[1].sound_speed, sound_speed(10.0, 35.0, 150.0));
  EXPECT_GT(p[1].sound_speed, p[0].sound_speed);
  EXPECT_LT(p[1].absorption, p[0].absorption);
}

TEST(AcousticsProfile, WarmSurfaceColdDeepOrdering) {
  const WaterColumn c =
      build_water_column({layer(50.0, 25.0), layer(100.0, 15.0), layer(300.0, 4.0)});
  const auto p = acoustics_profile(c, 10.0);
  const double surface = sound_speed(25.0, 35.0, 25.0);
  const double deep = sound_speed(4.0, 35.0, 300.0);
  EXPECT_EQ(p.front().sound_speed, surface);
  EXPECT_EQ(p.back().sound_speed, deep);
  EXPECT_GT(p.front().sound_speed, p.back().sound_speed);
}

TEST(AcousticsProfile, EntriesSatisfyInvariants) {
  const WaterColumn c = build_water_column(
      {layer(10.0, -2.0, 0.0, 6.0), layer(500.0, 40.0, 42.0, 9.0), layer(4000.0, 2.0, 34.9)});
  const auto p = acoustics_profile(c, 50.0);
  ASSERT_EQ(p.size(), c.size());
  for (const auto& e : p) {
    EXPECT_GE(e.sound_speed, 1300.0);
    EXPECT_LE(e.sound_speed, 1700.0);
    EXPECT_GE(e.absorption, 0.0);
  }
}
