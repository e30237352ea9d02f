#pragma once

// WGS84 geodetic <-> ECEF <-> local ENU conversions. Angles are radians.

#include <cmath>
#include <numbers>
#include <string>

#include "uwloc/errors.hpp"
#include "uwloc/geometry.hpp"

namespace uwloc {

namespace wgs84 {
inline constexpr double kSemiMajor = 6378137.0;
inline constexpr double kInverseFlattening = 298.257223563;
inline constexpr double kFlattening = 1.0 / kInverseFlattening;
inline constexpr double kSemiMinor = kSemiMajor * (1.0 - kFlattening);
inline constexpr double kEccentricitySq = kFlattening * (2.0 - kFlattening);
}  // namespace wgs84

struct GeodeticCoord {
  double latitude = 0.0;   // rad, [-pi/2, pi/2]
  double longitude = 0.0;  // rad, (-pi, pi]
  double height = 0.0;     // m above the ellipsoid
};

struct EcefCoord {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using EnuCoord = Enu;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline GeodeticCoord geodetic_from_degrees(double lat_deg, double lon_deg, double height) {
  return {deg_to_rad(lat_deg), deg_to_rad(lon_deg), height};
}

inline void validate(const GeodeticCoord& g) {
  constexpr double kPi = std::numbers::pi;
  if (!(g.latitude >= -kPi / 2 && g.latitude <= kPi / 2)) {
    throw ValidationError("latitude outside [-90, 90] degrees");
  }
  if (!(g.longitude > -kPi - 1e-12 && g.longitude <= kPi + 1e-12)) {
    throw ValidationError("longitude outside (-180, 180] degrees");
  }
  if (!std::isfinite(g.height)) throw ValidationError("height must be finite");
}

namespace detail {
inline double prime_vertical_radius(double sin_lat) {
  return wgs84::kSemiMajor / std::sqrt(1.0 - wgs84::kEccentricitySq * sin_lat * sin_lat);
}
}  // namespace detail

inline EcefCoord geodetic_to_ecef(const GeodeticCoord& g) {
  const double sin_lat = std::sin(g.latitude);
  const double cos_lat = std::cos(g.latitude);
  const double n = detail::prime_vertical_radius(sin_lat);
  const double r = (n + g.height) * cos_lat;
  return {r * std::cos(g.longitude), r * std::sin(g.longitude),
          (n * (1.0 - wgs84::kEccentricitySq) + g.height) * sin_lat};
}

/// Fixed-point (Bowring-style) latitude iteration until the update is below
/// 1e-12 rad. Longitude is reported as 0 on the polar axis.
inline GeodeticCoord ecef_to_geodetic(const EcefCoord& e) {
  const double p = std::hypot(e.x, e.y);
  if (std::hypot(p, e.z) < 1.0) {
    throw DomainError("ECEF point within 1 m of the geocentre has no geodetic position");
  }
  GeodeticCoord g;
  if (p == 0.0) {
    g.latitude = std::copysign(std::numbers::pi / 2, e.z);
    g.longitude = 0.0;
    g.height = std::abs(e.z) - wgs84::kSemiMinor;
    return g;
  }
  g.longitude = std::atan2(e.y, e.x);
  if (g.longitude == -std::numbers::pi) g.longitude = std::numbers::pi;

  double lat = std::atan2(e.z, p * (1.0 - wgs84::kEccentricitySq));
  for (int i = 0; i < 100; ++i) {
    const double sin_lat = std::sin(lat);
    const double n = detail::prime_vertical_radius(sin_lat);
    const double next = std::atan2(e.z + wgs84::kEccentricitySq * n * sin_lat, p);
    const double delta = std::abs(next - lat);
    lat = next;
    if (delta < 1e-12) break;
  }
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  g.latitude = lat;
  // height along the normal, stable at every latitude
  g.height = p * cos_lat + e.z * sin_lat -
             wgs84::kSemiMajor * std::sqrt(1.0 - wgs84::kEccentricitySq * sin_lat * sin_lat);
  return g;
}

inline EnuCoord ecef_to_enu(const EcefCoord& e, const GeodeticCoord& origin) {
  const EcefCoord o = geodetic_to_ecef(origin);
  const double dx = e.x - o.x;
  const double dy = e.y - o.y;
  const double dz = e.z - o.z;
  const double sl = std::sin(origin.latitude), cl = std::cos(origin.latitude);
  const double so = std::sin(origin.longitude), co = std::cos(origin.longitude);
  return {-so * dx + co * dy,
          -sl * co * dx - sl * so * dy + cl * dz,
          cl * co * dx + cl * so * dy + sl * dz};
}

inline EcefCoord enu_to_ecef(const EnuCoord& p, const GeodeticCoord& origin) {
  const EcefCoord o = geodetic_to_ecef(origin);
  const double sl = std::sin(origin.latitude), cl = std::cos(origin.latitude);
  const double so = std::sin(origin.longitude), co = std::cos(origin.longitude);
  const double dx = -so * p.east - sl * co * p.north + cl * co * p.up;
  const double dy = co * p.east - sl * so * p.north + cl * so * p.up;
  const double dz = cl * p.north + sl * p.up;
  return {o.x + dx, o.y + dy, o.z + dz};
}

inline EnuCoord geodetic_to_enu(const GeodeticCoord& g, const GeodeticCoord& origin) {
  return ecef_to_enu(geodetic_to_ecef(g), origin);
}

inline GeodeticCoord enu_to_geodetic(const EnuCoord& p, const GeodeticCoord& origin) {
  return ecef_to_geodetic(enu_to_ecef(p, origin));
}

}  // namespace uwloc
