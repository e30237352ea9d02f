#pragma once

// Stratified water column and the empirical per-layer acoustic properties.
//
// Depth is positive-down everywhere in this header. Sound speed follows the
// Mackenzie (1981) nine-term equation, absorption the Ainslie & McColm (1998)
// simplification of Francois-Garrison.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "uwloc/errors.hpp"

namespace uwloc {

namespace limits {
inline constexpr double kMinTemperature = -2.0;
inline constexpr double kMaxTemperature = 40.0;
inline constexpr double kMinSalinity = 0.0;
inline constexpr double kMaxSalinity = 42.0;
inline constexpr double kMinPh = 6.0;
inline constexpr double kMaxPh = 9.0;
}  // namespace limits

struct Layer {
  double thickness = 0.0;    // m
  double temperature = 0.0;  // deg C
  double salinity = 0.0;     // PSU
  double ph = 8.0;
};

struct LayerAcoustics {
  double sound_speed = 0.0;  // m/s
  double absorption = 0.0;   // dB/km at the profile's carrier frequency
};

namespace detail {

inline void require_range(double value, double lo, double hi, const char* field,
                          const std::string& where) {
  if (!(value >= lo && value <= hi)) {
    throw ValidationError(where + field + " = " + std::to_string(value) +
                          " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
}

inline void require_domain(double value, double lo, double hi,
                           const char* field) {
  if (!(value >= lo && value <= hi)) {
    throw DomainError(std::string(field) + " = " + std::to_string(value) +
                      " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
}

}  // namespace detail

/// Throws ValidationError naming the first offending field.
inline void validate_layer(const Layer& layer, std::size_t index = 0) {
  const std::string where = "layer[" + std::to_string(index) + "].";
  if (!(layer.thickness > 0.0) || !std::isfinite(layer.thickness)) {
    throw ValidationError(where + "thickness = " +
                          std::to_string(layer.thickness) + " must be > 0");
  }
  detail::require_range(layer.temperature, limits::kMinTemperature,
                        limits::kMaxTemperature, "temperature", where);
  detail::require_range(layer.salinity, limits::kMinSalinity,
                        limits::kMaxSalinity, "salinity", where);
  detail::require_range(layer.ph, limits::kMinPh, limits::kMaxPh, "ph", where);
}

/// Immutable stack of layers, index 0 at the surface.
class WaterColumn {
 public:
  explicit WaterColumn(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) {
      throw ValidationError("water column needs at least one layer");
    }
    boundaries_.reserve(layers_.size() + 1);
    boundaries_.push_back(0.0);
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      validate_layer(layers_[i], i);
      boundaries_.push_back(boundaries_.back() + layers_[i].thickness);
    }
  }

  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t size() const { return layers_.size(); }
  const Layer& operator[](std::size_t i) const { return layers_[i]; }

  /// Layer interfaces, size() + 1 entries starting at 0.
  const std::vector<double>& boundaries() const { return boundaries_; }
  double total_depth() const { return boundaries_.back(); }

  double mid_depth(std::size_t i) const {
    return 0.5 * (boundaries_[i] + boundaries_[i + 1]);
  }

 private:
  std::vector<Layer> layers_;
  std::vector<double> boundaries_;
};

inline WaterColumn build_water_column(std::vector<Layer> layer_specs) {
  return WaterColumn(std::move(layer_specs));
}

/// Index of the layer containing `depth` given interface depths. A boundary
/// belongs to the layer below it; the bottom belongs to the last layer.
inline std::size_t layer_index_at(const std::vector<double>& boundaries,
                                  double depth) {
  const double bottom = boundaries.back();
  if (!(depth >= 0.0 && depth <= bottom)) {
    throw RangeError("depth " + std::to_string(depth) +
                     " m outside water column [0, " + std::to_string(bottom) +
                     "]");
  }
  const auto it =
      std::upper_bound(boundaries.begin() + 1, boundaries.end() - 1, depth);
  return static_cast<std::size_t>(it - (boundaries.begin() + 1));
}

inline std::size_t layer_index_at(const WaterColumn& column, double depth) {
  return layer_index_at(column.boundaries(), depth);
}

/// Mackenzie (1981) sound speed in m/s. Temperature in deg C, salinity in
/// PSU, depth in metres.
inline double sound_speed(double temperature, double salinity, double depth) {
  detail::require_domain(temperature, limits::kMinTemperature,
                         limits::kMaxTemperature, "temperature");
  detail::require_domain(salinity, limits::kMinSalinity, limits::kMaxSalinity,
                         "salinity");
  if (!(depth >= 0.0) || !std::isfinite(depth)) {
    throw DomainError("depth = " + std::to_string(depth) + " must be >= 0");
  }
  const double t = temperature;
  const double ds = salinity - 35.0;
  const double d = depth;
  return 1448.96 + 4.591 * t - 5.304e-2 * t * t + 2.374e-4 * t * t * t +
         1.340 * ds + 1.630e-2 * d + 1.675e-7 * d * d - 1.025e-2 * t * ds -
         7.139e-13 * t * d * d * d;
}

/// Ainslie & McColm (1998) absorption in dB/km. Frequency in kHz, depth in
/// metres (converted to km for the pressure terms).
inline double absorption_coeff(double frequency_khz, double temperature,
                               double salinity, double ph, double depth) {
  if (!(frequency_khz > 0.0) || !std::isfinite(frequency_khz)) {
    throw DomainError("frequency = " + std::to_string(frequency_khz) +
                      " kHz must be > 0");
  }
  detail::require_domain(temperature, limits::kMinTemperature,
                         limits::kMaxTemperature, "temperature");
  detail::require_domain(salinity, limits::kMinSalinity, limits::kMaxSalinity,
                         "salinity");
  detail::require_domain(ph, limits::kMinPh, limits::kMaxPh, "ph");
  if (!(depth >= 0.0) || !std::isfinite(depth)) {
    throw DomainError("depth = " + std::to_string(depth) + " must be >= 0");
  }
  const double f2 = frequency_khz * frequency_khz;
  const double t = temperature;
  const double z = depth / 1000.0;

  // boric acid relaxation
  const double f_boric = 0.78 * std::sqrt(salinity / 35.0) * std::exp(t / 26.0);
  const double boric = 0.106 * f_boric * f2 / (f_boric * f_boric + f2) *
                       std::exp((ph - 8.0) / 0.56);
  // magnesium sulphate relaxation
  const double f_mg = 42.0 * std::exp(t / 17.0);
  const double mgso4 = 0.52 * (1.0 + t / 43.0) * (salinity / 35.0) * f_mg * f2 /
                       (f_mg * f_mg + f2) * std::exp(-z / 6.0);
  // pure water viscosity
  const double water = 0.00049 * f2 * std::exp(-(t / 27.0 + z / 17.0));
  return boric + mgso4 + water;
}

/// Per-layer sound speed and absorption evaluated at each layer mid-depth.
inline std::vector<LayerAcoustics> acoustics_profile(const WaterColumn& column,
                                                     double carrier_khz) {
  std::vector<LayerAcoustics> out;
  out.reserve(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) {
    const Layer& l = column[i];
    const double z = column.mid_depth(i);
    out.push_back({sound_speed(l.temperature, l.salinity, z),
                   absorption_coeff(carrier_khz, l.temperature, l.salinity,
                                    l.ph, z)});
  }
  return out;
}

/// Piecewise-constant acoustic medium: interface depths plus one
/// LayerAcoustics per layer, all at a single carrier frequency. This is what
/// the propagation and multilateration code consumes.
class AcousticProfile {
 public:
  AcousticProfile(const WaterColumn& column, double carrier_khz)
      : boundaries_(column.boundaries()),
        layers_(acoustics_profile(column, carrier_khz)),
        carrier_khz_(carrier_khz) {
    finish();
  }

  /// Direct construction for synthetic media (tests, what-if studies).
  AcousticProfile(const std::vector<double>& thicknesses,
                  std::vector<LayerAcoustics> layers, double carrier_khz = 0.0)
      : layers_(std::move(layers)), carrier_khz_(carrier_khz) {
    if (thicknesses.empty() || thicknesses.size() != layers_.size()) {
      throw ValidationError(
          "acoustic profile needs one thickness per layer and at least one "
          "layer");
    }
    boundaries_.push_back(0.0);
    for (std::size_t i = 0; i < thicknesses.size(); ++i) {
      if (!(thicknesses[i] > 0.0)) {
        throw ValidationError("layer[" + std::to_string(i) +
                              "].thickness must be > 0");
      }
      if (!(layers_[i].sound_speed > 0.0) || !(layers_[i].absorption >= 0.0)) {
        throw ValidationError("layer[" + std::to_string(i) +
                              "] needs sound_speed > 0 and absorption >= 0");
      }
      boundaries_.push_back(boundaries_.back() + thicknesses[i]);
    }
    finish();
  }

  static AcousticProfile homogeneous(double depth, double sound_speed,
                                     double absorption = 0.0) {
    return AcousticProfile({depth}, {{sound_speed, absorption}});
  }

  std::size_t size() const { return layers_.size(); }
  const std::vector<double>& boundaries() const { return boundaries_; }
  const std::vector<LayerAcoustics>& layers() const { return layers_; }
  const LayerAcoustics& operator[](std::size_t i) const { return layers_[i]; }
  double total_depth() const { return boundaries_.back(); }
  double carrier_khz() const { return carrier_khz_; }
  double max_sound_speed() const { return max_speed_; }

  double speed(std::size_t i) const { return layers_[i].sound_speed; }
  std::size_t index_at(double depth) const {
    return layer_index_at(boundaries_, depth);
  }

 private:
  void finish() {
    max_speed_ = 0.0;
    for (const auto& l : layers_) max_speed_ = std::max(max_speed_, l.sound_speed);
  }

  std::vector<double> boundaries_;
  std::vector<LayerAcoustics> layers_;
  double carrier_khz_ = 0.0;
  double max_speed_ = 0.0;
};

}  // namespace uwloc
