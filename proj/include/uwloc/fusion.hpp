#pragma once

// Constant-velocity Kalman filter over (east, north, up, v_east, v_north,
// v_up). Both measurement models are linear (position fix, pressure depth),
// so the "extended" filter reduces to the standard equations; updates use the
// Joseph form and re-symmetrise the covariance.

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "uwloc/errors.hpp"
#include "uwloc/geometry.hpp"

namespace uwloc {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

namespace seawater {
inline constexpr double kAtmosphericPressure = 101325.0;  // Pa
inline constexpr double kDensity = 1025.0;                // kg/m^3
inline constexpr double kGravity = 9.80665;               // m/s^2
}  // namespace seawater

struct EkfState {
  Vector6 mean = Vector6::Zero();
  Matrix6 covariance = Matrix6::Identity();
  double timestamp = 0.0;

  Enu position() const { return {mean(0), mean(1), mean(2)}; }
  Enu velocity() const { return {mean(3), mean(4), mean(5)}; }
};

struct PressureReading {
  double pressure = seawater::kAtmosphericPressure;  // Pa absolute
  double timestamp = 0.0;
};

/// Hydrostatic depth (m, positive down) from absolute pressure.
inline double pressure_to_depth(const PressureReading& p,
                                double density = seawater::kDensity) {
  if (!(p.pressure >= seawater::kAtmosphericPressure)) {
    throw DomainError("pressure " + std::to_string(p.pressure) +
                      " Pa is below atmospheric");
  }
  return (p.pressure - seawater::kAtmosphericPressure) / (density * seawater::kGravity);
}

inline double depth_to_pressure(double depth, double density = seawater::kDensity) {
  return seawater::kAtmosphericPressure + density * seawater::kGravity * depth;
}

inline EkfState make_initial_state(const Enu& position, double position_sigma,
                                   double velocity_sigma, double timestamp) {
  EkfState s;
  s.mean << position.east, position.north, position.up, 0.0, 0.0, 0.0;
  s.covariance.setZero();
  s.covariance.topLeftCorner<3, 3>().diagonal().setConstant(position_sigma * position_sigma);
  s.covariance.bottomRightCorner<3, 3>().diagonal().setConstant(velocity_sigma * velocity_sigma);
  s.timestamp = timestamp;
  return s;
}

/// Propagates by dt under white-acceleration noise with per-axis spectral
/// density `accel_psd` (m^2/s^3).
inline EkfState ekf_predict(const EkfState& s, double dt,
                            const Eigen::Vector3d& accel_psd) {
  if (!(dt >= 0.0)) throw InputError("ekf_predict needs dt >= 0");
  if (dt == 0.0) return s;

  Matrix6 f = Matrix6::Identity();
  f.topRightCorner<3, 3>() = Eigen::Matrix3d::Identity() * dt;

  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Matrix6 q = Matrix6::Zero();
  for (int i = 0; i < 3; ++i) {
    const double psd = accel_psd(i);
    q(i, i) = psd * dt3 / 3.0;
    q(i, i + 3) = q(i + 3, i) = psd * dt2 / 2.0;
    q(i + 3, i + 3) = psd * dt;
  }

  EkfState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + q;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.timestamp = s.timestamp + dt;
  return out;
}

namespace detail {

template <int M>
EkfState joseph_update(const EkfState& s, const Eigen::Matrix<double, M, 6>& h,
                       const Eigen::Matrix<double, M, 1>& z,
                       const Eigen::Matrix<double, M, M>& r) {
  const Eigen::Matrix<double, M, 1> innovation = z - h * s.mean;
  const Eigen::Matrix<double, M, M> cov_innov = h * s.covariance * h.transpose() + r;
  const Eigen::Matrix<double, 6, M> gain =
      s.covariance * h.transpose() * cov_innov.inverse();
  const Matrix6 i_kh = Matrix6::Identity() - gain * h;

  EkfState out;
  out.mean = s.mean + gain * innovation;
  out.covariance = i_kh * s.covariance * i_kh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.timestamp = s.timestamp;
  return out;
}

}  // namespace detail

/// Position-block update with a 3-D fix.
inline EkfState ekf_update_fix(const EkfState& s, const Enu& fix,
                               const Eigen::Matrix3d& measurement_cov,
                               double fix_timestamp) {
  if (fix_timestamp < s.timestamp) {
    throw InputError("fix is older than the filter state; predict first");
  }
  if (!measurement_cov.isApprox(measurement_cov.transpose(), 1e-12) ||
      measurement_cov.llt().info() != Eigen::Success) {
    throw InputError("fix measurement covariance must be symmetric positive-definite");
  }
  Eigen::Matrix<double, 3, 6> h = Eigen::Matrix<double, 3, 6>::Zero();
  h.leftCols<3>().setIdentity();
  const Eigen::Vector3d z(fix.east, fix.north, fix.up);
  return detail::joseph_update<3>(s, h, z, measurement_cov);
}

/// Isotropic-variance convenience overload.
inline EkfState ekf_update_fix(const EkfState& s, const Enu& fix, double variance,
                               double fix_timestamp) {
  return ekf_update_fix(s, fix, Eigen::Matrix3d::Identity() * variance, fix_timestamp);
}

/// Scalar update of the up component with measurement -depth.
inline EkfState ekf_update_depth(const EkfState& s, double depth, double variance) {
  if (!(variance > 0.0)) throw InputError("depth variance must be > 0");
  Eigen::Matrix<double, 1, 6> h = Eigen::Matrix<double, 1, 6>::Zero();
  h(0, 2) = 1.0;
  Eigen::Matrix<double, 1, 1> z;
  z << -depth;
  Eigen::Matrix<double, 1, 1> r;
  r << variance;
  return detail::joseph_update<1>(s, h, z, r);
}

}  // namespace uwloc
