#pragma once

#include <cmath>

namespace uwloc {

/// Local east-north-up position in metres. Underwater points have up < 0.
struct Enu {
  double east = 0.0;
  double north = 0.0;
  double up = 0.0;

  friend bool operator==(const Enu&, const Enu&) = default;

  Enu operator+(const Enu& o) const {
    return {east + o.east, north + o.north, up + o.up};
  }
  Enu operator-(const Enu& o) const {
    return {east - o.east, north - o.north, up - o.up};
  }
  Enu operator*(double s) const { return {east * s, north * s, up * s}; }

  double norm() const { return std::sqrt(east * east + north * north + up * up); }

  /// Positive-down depth used by the environment and propagation code.
  double depth() const { return -up; }
};

inline double distance(const Enu& a, const Enu& b) { return (a - b).norm(); }

inline double horizontal_distance(const Enu& a, const Enu& b) {
  return std::hypot(a.east - b.east, a.north - b.north);
}

}  // namespace uwloc
