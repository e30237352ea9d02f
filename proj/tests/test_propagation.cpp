#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "uwloc/propagation.hpp"

using namespace uwloc;

namespace {

AcousticProfile two_layer(double c1, double c2, double a1 = 0.0, double a2 = 0.0) {
  return AcousticProfile({100.0, 100.0}, {{c1, a1}, {c2, a2}});
}

// Test-only oracle: travel time through two layers split at z = 100 m as a
// function of the interface crossing x, minimised by golden-section search.
double fermat_two_layer(double c1, double c2, double range) {
  auto t = [&](double x) {
    return std::hypot(x, 100.0) / c1 + std::hypot(range - x, 100.0) / c2;
  };
  double a = 0.0, b = range;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double x1 = b - g * (b - a), x2 = a + g * (b - a);
    if (t(x1) < t(x2)) {
      b = x2;
    } else {
      a = x1;
    }
  }
  return t(0.5 * (a + b));
}

AcousticProfile random_profile(std::mt19937_64& rng, int min_layers, int max_layers) {
  std::uniform_int_distribution<int> n_dist(min_layers, max_layers);
  std::uniform_real_distribution<double> thick(5.0, 80.0), speed(1450.0, 1550.0);
  const int n = n_dist(rng);
  std::vector<double> t;
  std::vector<LayerAcoustics> l;
  for (int i = 0; i < n; ++i) {
    t.push_back(thick(rng));
    l.push_back({speed(rng), 1.0});
  }
  return AcousticProfile(t, l);
}

}  // namespace

TEST(TraceRefracted, VerticalRayIsSumOfLayerTimes) {
  const AcousticProfile p = AcousticProfile({100.0, 100.0}, {{1500.0, 0.0}, {1480.0, 0.0}});
  const RayPath r = trace_refracted(p, 0.0, 200.0, 0.0);
  EXPECT_EQ(r.ray_parameter, 0.0);
  EXPECT_NEAR(r.tof, 0.13423423423423425, 1e-15);
  EXPECT_DOUBLE_EQ(r.total_length, 200.0);
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_EQ(r.segments[0].layer, 0u);
}

TEST(TraceRefracted, HomogeneousIsStraightLine) {
  const AcousticProfile p = AcousticProfile::homogeneous(500.0, 1500.0);
  const RayPath r = trace_refracted(p, 400.0, 0.0, 300.0);
  EXPECT_NEAR(r.total_length, 500.0, 1e-9);
  EXPECT_NEAR(r.tof, 1.0 / 3.0, 1e-12);
}

TEST(TraceRefracted, TwoLayerMatchesFermatMinimum) {
  const AcousticProfile p = two_layer(1500.0, 1450.0);
  const RayPath r = trace_refracted(p, 200.0, 0.0, 200.0);
  // 0.19178533640332646 from the 40-digit root of dt/dx in formula_oracle.py
  EXPECT_NEAR(r.tof, 0.19178533640332646, 1e-9);
  EXPECT_NEAR(r.tof, fermat_two_layer(1500.0, 1450.0, 200.0), 1e-9);
  // segments run source (deep) to receiver (surface)
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_EQ(r.segments.front().layer, 1u);
  EXPECT_EQ(r.segments.back().layer, 0u);
}

TEST(TraceRefracted, SameDepthIsHorizontalRay) {
  const AcousticProfile p = two_layer(1500.0, 1450.0);
  const RayPath r = trace_refracted(p, 150.0, 150.0, 300.0);
  EXPECT_DOUBLE_EQ(r.tof, 300.0 / 1450.0);
  EXPECT_DOUBLE_EQ(r.ray_parameter, 1.0 / 1450.0);
  const RayPath empty = trace_refracted(p, 150.0, 150.0, 0.0);
  EXPECT_EQ(empty.tof, 0.0);
  EXPECT_TRUE(empty.segments.empty());
}

TEST(TraceRefracted, RangeErrors) {
  const AcousticProfile p = two_layer(1500.0, 1450.0);
  EXPECT_THROW(trace_refracted(p, -1.0, 10.0, 5.0), RangeError);
  EXPECT_THROW(trace_refracted(p, 10.0, 201.0, 5.0), RangeError);
  EXPECT_THROW(trace_refracted(p, 10.0, 20.0, -5.0), RangeError);
}

TEST(TraceRefracted, TurningRayHasNoDirectPath) {
  // slow upper layer over a fast lower one: the ray from just inside the
  // fast layer cannot reach 1 km before turning
  const AcousticProfile p = AcousticProfile({100.0, 100.0}, {{1450.0, 0.0}, {1550.0, 0.0}});
  EXPECT_THROW(trace_refracted(p, 100.001, 0.0, 1000.0), NoDirectPathError);
  EXPECT_NO_THROW(trace_refracted(p, 100.001, 0.0, 100.0));
}

TEST(TraceRefracted, SnellInvariantAndEndpointOnRandomProfiles) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const AcousticProfile p = random_profile(rng, 3, 10);
    std::uniform_real_distribution<double> depth(0.0, p.total_depth());
    std::uniform_real_distribution<double> range(0.0, 2.0 * p.total_depth());
    const double zs = depth(rng), zr = depth(rng), x = range(rng);
    RayPath r;
    try {
      r = trace_refracted(p, zs, zr, x);
    } catch (const NoDirectPathError&) {
      continue;
    }
    double horizontal = 0.0, length = 0.0, tof = 0.0, c_max = 0.0;
    for (const auto& s : r.segments) {
      c_max = std::max(c_max, p.speed(s.layer));
      EXPECT_LT(std::abs(std::cos(s.grazing_angle) / p.speed(s.layer) - r.ray_parameter), 1e-12);
      horizontal += s.horizontal;
      length += s.length;
      tof += s.length / p.speed(s.layer);
    }
    EXPECT_NEAR(horizontal, x, 1e-6);
    EXPECT_NEAR(length, r.total_length, 1e-9 * length);
    EXPECT_NEAR(tof, r.tof, 1e-12 * tof);
    EXPECT_GE(r.ray_parameter, 0.0);
    if (zs != zr) {
      EXPECT_LT(r.ray_parameter * c_max, 1.0);
    }
  }
}

TEST(TraceRefracted, Reciprocity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const AcousticProfile p = random_profile(rng, 2, 6);
    std::uniform_real_distribution<double> depth(0.0, p.total_depth());
    const double zs = depth(rng), zr = depth(rng), x = depth(rng);
    const RayPath a = trace_refracted(p, zs, zr, x);
    const RayPath b = trace_refracted(p, zr, zs, x);
    EXPECT_NEAR(a.tof, b.tof, 1e-9 * a.tof);
    EXPECT_NEAR(a.total_length, b.total_length, 1e-9 * a.total_length);
  }
}

TEST(TraceRefracted, TofIncreasesWithRange) {
  const AcousticProfile p = AcousticProfile({30.0, 70.0, 100.0},
                                            {{1520.0, 0.0}, {1490.0, 0.0}, {1505.0, 0.0}});
  double prev = trace_refracted(p, 180.0, 2.0, 0.0).tof;
  for (double x = 5.0; x <= 600.0; x += 5.0) {
    const double t = trace_refracted(p, 180.0, 2.0, x).tof;
    EXPECT_GT(t, prev) << "x=" << x;
    prev = t;
  }
}

TEST(TraceStraight, HomogeneousAgreesWithRefracted) {
  const AcousticProfile p = AcousticProfile::homogeneous(500.0, 1500.0);
  const Enu src{0.0, 0.0, -400.0}, dst{180.0, 240.0, 0.0};
  const RayPath s = trace_straight(p, src, dst);
  const RayPath r = trace_refracted(p, src, dst);
  EXPECT_NEAR(s.tof, r.tof, 1e-12);
  EXPECT_NEAR(s.tof, 1.0 / 3.0, 1e-12);
}

TEST(TraceStraight, VerticalChordMatchesRefracted) {
  const AcousticProfile p = AcousticProfile({100.0, 100.0}, {{1500.0, 0.0}, {1480.0, 0.0}});
  const RayPath s = trace_straight(p, {5.0, 5.0, -200.0}, {5.0, 5.0, 0.0});
  const RayPath r = trace_refracted(p, 200.0, 0.0, 0.0);
  EXPECT_NEAR(s.tof, r.tof, 1e-15);
  EXPECT_NEAR(s.total_length, 200.0, 1e-12);
}

TEST(TraceStraight, TwoLayerObliqueChordSegments) {
  const AcousticProfile p = two_layer(1500.0, 1450.0);
  const Enu src{0.0, 0.0, -150.0}, dst{300.0, 0.0, -20.0};
  // The chord crosses z = 100 at parameter u = (150 - 100) / (150 - 20) from
  // the source; the lower piece lies in layer 1, the upper in layer 0.
  const double length = std::hypot(300.0, 130.0);
  const double u = 50.0 / 130.0;
  const double expected = u * length / 1450.0 + (1.0 - u) * length / 1500.0;
  const RayPath s = trace_straight(p, src, dst);
  ASSERT_EQ(s.segments.size(), 2u);
  EXPECT_EQ(s.segments[0].layer, 1u);
  EXPECT_NEAR(s.segments[0].length, u * length, 1e-9);
  EXPECT_NEAR(s.tof, expected, 1e-14);
}

TEST(TraceStraight, OutsideColumnIsRangeError) {
  const AcousticProfile p = two_layer(1500.0, 1450.0);
  EXPECT_THROW(trace_straight(p, {0, 0, 1.0}, {0, 0, -10.0}), RangeError);
  EXPECT_THROW(trace_straight(p, {0, 0, -10.0}, {0, 0, -250.0}), RangeError);
}

TEST(Fermat, RefractedNeverSlowerThanStraight) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(1440.0, 1560.0), x(0.0, 400.0);
  for (int i = 0; i < 100; ++i) {
    const AcousticProfile p = two_layer(c(rng), c(rng));
    const double range = x(rng);
    const RayPath r = trace_refracted(p, 200.0, 0.0, range);
    const RayPath s = trace_straight(p, {0.0, 0.0, -200.0}, {range, 0.0, 0.0});
    EXPECT_LE(r.tof, s.tof * (1.0 + 1e-15));
  }
}

TEST(TransmissionLoss, SphericalSpreadingAndAbsorption) {
  const AcousticProfile lossless = AcousticProfile::homogeneous(2000.0, 1500.0, 0.0);
  const RayPath r = trace_refracted(lossless, 0.0, 1000.0, 0.0);
  EXPECT_NEAR(transmission_loss(r, lossless), 60.0, 1e-12);

  const AcousticProfile lossy = AcousticProfile::homogeneous(2000.0, 1500.0, 1.0);
  EXPECT_NEAR(transmission_loss(trace_refracted(lossy, 0.0, 1000.0, 0.0), lossy), 61.0, 1e-12);
}

TEST(TransmissionLoss, PerSegmentAbsorptionWeights) {
  const AcousticProfile p = two_layer(1500.0, 1500.0, 2.0, 5.0);
  const RayPath r = trace_refracted(p, 50.0, 180.0, 0.0);
  // 50 m in layer 0 at 2 dB/km, 80 m in layer 1 at 5 dB/km
  const double expected = 20.0 * std::log10(130.0) + 50.0 * 2e-3 + 80.0 * 5e-3;
  EXPECT_NEAR(transmission_loss(r, p), expected, 1e-12);
}

TEST(TransmissionLoss, IncreasesWithLengthAndRejectsShortPaths) {
  const AcousticProfile p = AcousticProfile::homogeneous(5000.0, 1500.0, 0.8);
  double prev = transmission_loss(trace_refracted(p, 0.0, 1.0, 0.0), p);
  for (double z = 2.0; z <= 5000.0; z *= 1.3) {
    const double tl = transmission_loss(trace_refracted(p, 0.0, z, 0.0), p);
    EXPECT_GT(tl, prev);
    prev = tl;
  }
  EXPECT_GE(transmission_loss(trace_refracted(p, 0.0, 1.0, 0.0), p), 0.0);
  EXPECT_THROW(transmission_loss(trace_refracted(p, 0.0, 0.5, 0.0), p), ReferenceDistanceError);
}

TEST(Snr, SonarEquation) {
  EXPECT_EQ(snr(170.0, 60.0, 50.0), 60.0);
  EXPECT_EQ(snr(170.0, 170.0, 0.0), 0.0);
  EXPECT_EQ(snr(170.0, 70.0, 50.0), snr(170.0, 60.0, 50.0) - 10.0);
  const AcousticProfile p = AcousticProfile::homogeneous(2000.0, 1500.0, 1.0);
  const LinkBudget b = link_budget(trace_refracted(p, 0.0, 1000.0, 0.0), p, 180.0, 55.0);
  EXPECT_EQ(b.snr, b.source_level - b.transmission_loss - b.noise_level);
}

class SimulatePingTest : public ::testing::Test {
 protected:
  AcousticProfile profile = AcousticProfile({50.0, 150.0}, {{1510.0, 1.0}, {1495.0, 1.2}});
  ChannelConfig channel;
  Enu beacon{0.0, 0.0, -80.0};
  Enu hydrophone{120.0, -60.0, 0.0};
};

TEST_F(SimulatePingTest, ZeroNoiseReturnsModelTof) {
  channel.tof_noise_sigma = 0.0;
  Rng rng(1);
  const PingResult r = simulate_ping(profile, channel, beacon, hydrophone, "A", rng, 3.0);
  ASSERT_TRUE(r.detected());
  EXPECT_EQ(r.measurement->tof_measured, trace_refracted(profile, beacon, hydrophone).tof);
  EXPECT_EQ(r.measurement->anchor_id, "A");
  EXPECT_EQ(r.measurement->timestamp, 3.0);
  EXPECT_GE(r.measurement->snr, channel.detection_threshold);
}

TEST_F(SimulatePingTest, StraightModelUsesChord) {
  channel.path_model = PathModel::kStraight;
  Rng rng(1);
  const PingResult r = simulate_ping(profile, channel, beacon, hydrophone, "A", rng, 0.0);
  ASSERT_TRUE(r.detected());
  EXPECT_EQ(r.measurement->tof_measured, trace_straight(profile, beacon, hydrophone).tof);
}

TEST_F(SimulatePingTest, UnreachableThresholdNeverDetects) {
  channel.detection_threshold = 1e6;
  Rng rng(1);
  const PingResult r = simulate_ping(profile, channel, beacon, hydrophone, "A", rng, 0.0);
  EXPECT_FALSE(r.detected());
  EXPECT_EQ(r.status, PingStatus::kBelowThreshold);
}

TEST_F(SimulatePingTest, SameSeedIsBitIdentical) {
  channel.tof_noise_sigma = 1e-3;
  Rng a(77), b(77);
  const PingResult ra = simulate_ping(profile, channel, beacon, hydrophone, "A", a, 0.0);
  const PingResult rb = simulate_ping(profile, channel, beacon, hydrophone, "A", b, 0.0);
  ASSERT_TRUE(ra.detected() && rb.detected());
  EXPECT_EQ(ra.measurement->tof_measured, rb.measurement->tof_measured);
  EXPECT_NE(ra.measurement->tof_measured, ra.true_tof);
}

TEST_F(SimulatePingTest, NoDirectPathIsNonDetection) {
  const AcousticProfile p = AcousticProfile({100.0, 100.0}, {{1450.0, 0.0}, {1550.0, 0.0}});
  Rng rng(1);
  const PingResult r =
      simulate_ping(p, channel, {0.0, 0.0, -100.001}, {1000.0, 0.0, 0.0}, "A", rng, 0.0);
  EXPECT_FALSE(r.detected());
  EXPECT_EQ(r.status, PingStatus::kNoDirectPath);
  EXPECT_FALSE(r.detail.empty());
}
