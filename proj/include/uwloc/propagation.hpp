#pragma once

// Direct-path acoustic propagation through a layered medium: refracted
// (Snell) and straight-chord ray tracing, transmission loss, the passive
// sonar equation and noisy ping synthesis.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "uwloc/environment.hpp"
#include "uwloc/errors.hpp"
#include "uwloc/geometry.hpp"
#include "uwloc/random.hpp"

namespace uwloc {

struct RaySegment {
  std::size_t layer = 0;
  double length = 0.0;         // m
  double grazing_angle = 0.0;  // rad from horizontal
  double horizontal = 0.0;     // horizontal advance, m
};

/// Segments are ordered from source to receiver.
struct RayPath {
  std::vector<RaySegment> segments;
  double total_length = 0.0;    // m
  double tof = 0.0;             // s
  double ray_parameter = 0.0;   // s/m, cos(theta)/c
  double horizontal_range = 0.0;
};

enum class PathModel { kRefracted, kStraight };

inline const char* to_string(PathModel m) {
  return m == PathModel::kRefracted ? "refracted" : "straight";
}

inline PathModel path_model_from_string(const std::string& s) {
  if (s == "refracted") return PathModel::kRefracted;
  if (s == "straight") return PathModel::kStraight;
  throw ValidationError("path_model must be \"refracted\" or \"straight\", got \"" +
                        s + "\"");
}

namespace detail {

inline constexpr double kTurningMargin = 1e-9;

struct Span {
  std::size_t layer;
  double dz;
  double c;
};

inline void require_in_column(const AcousticProfile& profile, double depth,
                              const char* what) {
  if (!(depth >= 0.0 && depth <= profile.total_depth())) {
    throw RangeError(std::string(what) + " depth " + std::to_string(depth) +
                     " m outside water column [0, " +
                     std::to_string(profile.total_depth()) + "]");
  }
}

/// Vertical extents of every layer crossed between two depths, shallow first.
/// Zero-thickness overlaps are dropped.
inline void vertical_spans(const AcousticProfile& profile, double z_top,
                           double z_bottom, std::vector<Span>& out) {
  out.clear();
  const auto& b = profile.boundaries();
  for (std::size_t i = profile.index_at(z_top); i < profile.size(); ++i) {
    const double lo = std::max(z_top, b[i]);
    const double hi = std::min(z_bottom, b[i + 1]);
    if (hi > lo) out.push_back({i, hi - lo, profile.speed(i)});
    if (b[i + 1] >= z_bottom) break;
  }
}

/// Horizontal advance and its derivative for ray parameter p.
inline void range_and_slope(const std::vector<Span>& spans, double p,
                            double& x, double& dx_dp) {
  x = 0.0;
  dx_dp = 0.0;
  for (const Span& s : spans) {
    const double pc = p * s.c;
    const double cos2 = 1.0 - pc * pc;
    const double root = std::sqrt(cos2);
    x += s.dz * pc / root;
    dx_dp += s.dz * s.c / (cos2 * root);
  }
}

/// Ray parameter whose horizontal advance over `spans` equals `range`.
/// Safeguarded Newton on the monotone map p -> X(p) over
/// [0, (1 - margin)/max c].
inline double solve_ray_parameter(const std::vector<Span>& spans, double range,
                                  double z_gap) {
  double c_max = 0.0;
  for (const Span& s : spans) c_max = std::max(c_max, s.c);
  double lo = 0.0;
  double hi = (1.0 - kTurningMargin) / c_max;

  double x = 0.0;
  double slope = 0.0;
  range_and_slope(spans, hi, x, slope);
  if (x < range) {
    throw NoDirectPathError("no direct path: ray turns before horizontal range " +
                            std::to_string(range) + " m (max reachable " +
                            std::to_string(x) + " m)");
  }

  // chord through the fastest layer as a starting guess
  double p = std::min(range / std::hypot(range, z_gap) / c_max, hi);
  const double tol = 1e-10 * std::max(1.0, range);
  for (int iter = 0; iter < 200; ++iter) {
    range_and_slope(spans, p, x, slope);
    const double f = x - range;
    if (std::abs(f) <= tol) break;
    if (f < 0.0) {
      lo = p;
    } else {
      hi = p;
    }
    double next = p - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == p || hi - lo <= std::numeric_limits<double>::epsilon() * hi) {
      p = next;
      break;
    }
    p = next;
  }
  return p;
}

}  // namespace detail

/// Snell-law direct path between two depths separated by `horizontal_range`.
/// Same-depth endpoints with nonzero range travel horizontally in the
/// containing layer, with ray_parameter = 1/c of that layer.
inline RayPath trace_refracted(const AcousticProfile& profile,
                               double source_depth, double receiver_depth,
                               double horizontal_range) {
  detail::require_in_column(profile, source_depth, "source");
  detail::require_in_column(profile, receiver_depth, "receiver");
  if (!(horizontal_range >= 0.0) || !std::isfinite(horizontal_range)) {
    throw RangeError("horizontal range must be finite and >= 0");
  }

  RayPath path;
  path.horizontal_range = horizontal_range;

  if (source_depth == receiver_depth) {
    if (horizontal_range > 0.0) {
      const std::size_t i = profile.index_at(source_depth);
      const double c = profile.speed(i);
      path.segments.push_back({i, horizontal_range, 0.0, horizontal_range});
      path.total_length = horizontal_range;
      path.tof = horizontal_range / c;
      path.ray_parameter = 1.0 / c;
    }
    return path;
  }

  const double z_top = std::min(source_depth, receiver_depth);
  const double z_bottom = std::max(source_depth, receiver_depth);
  std::vector<detail::Span> spans;
  detail::vertical_spans(profile, z_top, z_bottom, spans);

  const double p = horizontal_range > 0.0
                       ? detail::solve_ray_parameter(spans, horizontal_range,
                                                     z_bottom - z_top)
                       : 0.0;
  path.ray_parameter = p;
  path.segments.reserve(spans.size());
  for (const auto& s : spans) {
    const double pc = p * s.c;
    const double sin_theta = std::sqrt(1.0 - pc * pc);
    const double length = s.dz / sin_theta;
    path.segments.push_back({s.layer, length, std::acos(pc), length * pc});
    path.total_length += length;
    path.tof += length / s.c;
  }
  if (source_depth > receiver_depth) {
    std::reverse(path.segments.begin(), path.segments.end());
  }
  return path;
}

/// Euclidean chord split at layer interfaces; no refraction.
inline RayPath trace_straight(const AcousticProfile& profile, const Enu& source,
                              const Enu& receiver) {
  const double zs = source.depth();
  const double zr = receiver.depth();
  detail::require_in_column(profile, zs, "source");
  detail::require_in_column(profile, zr, "receiver");

  RayPath path;
  const double horizontal = horizontal_distance(source, receiver);
  const double length = distance(source, receiver);
  path.horizontal_range = horizontal;
  if (length == 0.0) return path;

  const double grazing = std::atan2(std::abs(zr - zs), horizontal);
  const double cos_grazing = horizontal / length;

  if (zs == zr) {
    const std::size_t i = profile.index_at(zs);
    path.segments.push_back({i, length, grazing, horizontal});
  } else {
    // chord fractions at which the depth crosses an interface
    std::vector<detail::Span> spans;
    detail::vertical_spans(profile, std::min(zs, zr), std::max(zs, zr), spans);
    const double dz_total = std::abs(zr - zs);
    for (const auto& s : spans) {
      const double frac = s.dz / dz_total;
      path.segments.push_back({s.layer, frac * length, grazing, frac * horizontal});
    }
    if (zs > zr) std::reverse(path.segments.begin(), path.segments.end());
  }

  double c_max = 0.0;
  for (const auto& seg : path.segments) {
    const double c = profile.speed(seg.layer);
    path.total_length += seg.length;
    path.tof += seg.length / c;
    c_max = std::max(c_max, c);
  }
  path.ray_parameter = cos_grazing / c_max;
  return path;
}

/// Refracted trace between two ENU points.
inline RayPath trace_refracted(const AcousticProfile& profile,
                               const Enu& source, const Enu& receiver) {
  return trace_refracted(profile, source.depth(), receiver.depth(),
                         horizontal_distance(source, receiver));
}

inline RayPath trace(const AcousticProfile& profile, PathModel model,
                     const Enu& source, const Enu& receiver) {
  return model == PathModel::kRefracted
             ? trace_refracted(profile, source, receiver)
             : trace_straight(profile, source, receiver);
}

/// Refracted travel time only, without materialising the segment list.
inline double refracted_tof(const AcousticProfile& profile, double source_depth,
                            double receiver_depth, double horizontal_range) {
  detail::require_in_column(profile, source_depth, "source");
  detail::require_in_column(profile, receiver_depth, "receiver");
  if (source_depth == receiver_depth) {
    return horizontal_range / profile.speed(profile.index_at(source_depth));
  }
  const double z_top = std::min(source_depth, receiver_depth);
  const double z_bottom = std::max(source_depth, receiver_depth);
  thread_local std::vector<detail::Span> spans;
  detail::vertical_spans(profile, z_top, z_bottom, spans);
  const double p = horizontal_range > 0.0
                       ? detail::solve_ray_parameter(spans, horizontal_range, z_bottom - z_top)
                       : 0.0;
  double tof = 0.0;
  for (const auto& s : spans) {
    const double pc = p * s.c;
    tof += s.dz / std::sqrt(1.0 - pc * pc) / s.c;
  }
  return tof;
}

/// Travel time under either path model. Used by the localisation objective,
/// which evaluates it hundreds of thousands of times per fix.
inline double travel_time(const AcousticProfile& profile, PathModel model,
                          const Enu& source, const Enu& receiver) {
  if (profile.size() == 1) {
    detail::require_in_column(profile, source.depth(), "source");
    detail::require_in_column(profile, receiver.depth(), "receiver");
    return distance(source, receiver) / profile.speed(0);
  }
  if (model == PathModel::kRefracted) {
    return refracted_tof(profile, source.depth(), receiver.depth(),
                         horizontal_distance(source, receiver));
  }
  return trace_straight(profile, source, receiver).tof;
}

/// Spherical spreading re 1 m plus per-segment absorption, in dB.
inline double transmission_loss(const RayPath& path,
                                const AcousticProfile& profile) {
  if (!(path.total_length >= 1.0)) {
    throw ReferenceDistanceError("path length " +
                                 std::to_string(path.total_length) +
                                 " m is below the 1 m reference distance");
  }
  double absorbed = 0.0;
  for (const auto& seg : path.segments) {
    absorbed += profile[seg.layer].absorption * 1e-3 * seg.length;
  }
  return 20.0 * std::log10(path.total_length) + absorbed;
}

/// Passive sonar equation.
inline double snr(double source_level, double transmission_loss,
                  double noise_level) {
  return source_level - transmission_loss - noise_level;
}

struct LinkBudget {
  double source_level = 0.0;       // dB re 1 uPa @ 1 m
  double transmission_loss = 0.0;  // dB
  double noise_level = 0.0;        // dB re 1 uPa
  double snr = 0.0;                // dB
};

inline LinkBudget link_budget(const RayPath& path,
                              const AcousticProfile& profile,
                              double source_level, double noise_level) {
  LinkBudget b;
  b.source_level = source_level;
  b.noise_level = noise_level;
  b.transmission_loss = transmission_loss(path, profile);
  b.snr = snr(source_level, b.transmission_loss, noise_level);
  return b;
}

struct ChannelConfig {
  double source_level = 185.0;        // dB re 1 uPa @ 1 m
  double noise_level = 50.0;          // dB re 1 uPa
  double detection_threshold = 10.0;  // dB
  double tof_noise_sigma = 0.0;       // s
  PathModel path_model = PathModel::kRefracted;
};

inline void validate(const ChannelConfig& c) {
  if (!std::isfinite(c.source_level) || !std::isfinite(c.noise_level) ||
      !std::isfinite(c.detection_threshold)) {
    throw ValidationError("channel levels must be finite");
  }
  if (!(c.tof_noise_sigma >= 0.0) || !std::isfinite(c.tof_noise_sigma)) {
    throw ValidationError("channel.tof_noise_sigma must be >= 0");
  }
}

struct PingMeasurement {
  std::string anchor_id;
  double tof_measured = 0.0;  // s
  double snr = 0.0;           // dB
  double timestamp = 0.0;     // s since scenario start
};

enum class PingStatus { kDetected, kBelowThreshold, kNoDirectPath, kNonPositiveTof };

inline const char* to_string(PingStatus s) {
  switch (s) {
    case PingStatus::kDetected: return "detected";
    case PingStatus::kBelowThreshold: return "below detection threshold";
    case PingStatus::kNoDirectPath: return "no direct path";
    case PingStatus::kNonPositiveTof: return "non-positive noisy tof";
  }
  return "?";
}

/// Outcome of one ping. `measurement` is set only when detected; the other
/// fields are diagnostics (NaN when not computed).
struct PingResult {
  PingStatus status = PingStatus::kNoDirectPath;
  std::optional<PingMeasurement> measurement;
  double true_tof = std::numeric_limits<double>::quiet_NaN();
  double snr = std::numeric_limits<double>::quiet_NaN();
  std::string detail;

  bool detected() const { return measurement.has_value(); }
};

/// One beacon-to-hydrophone ping. Consumes at most one Gaussian draw from
/// `rng` (none when tof_noise_sigma is zero or the ping is not detected).
template <class URBG>
PingResult simulate_ping(const AcousticProfile& profile,
                         const ChannelConfig& channel, const Enu& source,
                         const Enu& receiver, const std::string& anchor_id,
                         URBG& rng, double timestamp) {
  PingResult r;
  RayPath path;
  try {
    path = trace(profile, channel.path_model, source, receiver);
  } catch (const NoDirectPathError& e) {
    r.status = PingStatus::kNoDirectPath;
    r.detail = e.what();
    return r;
  }
  r.true_tof = path.tof;
  r.snr = snr(channel.source_level, transmission_loss(path, profile),
              channel.noise_level);
  if (r.snr < channel.detection_threshold) {
    r.status = PingStatus::kBelowThreshold;
    return r;
  }
  const double tof = path.tof + gaussian(rng, channel.tof_noise_sigma);
  if (!(tof > 0.0)) {
    r.status = PingStatus::kNonPositiveTof;
    return r;
  }
  r.status = PingStatus::kDetected;
  r.measurement = PingMeasurement{anchor_id, tof, r.snr, timestamp};
  return r;
}

}  // namespace uwloc
