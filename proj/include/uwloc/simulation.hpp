#pragma once

// End-to-end pipeline: trajectory -> pings -> GA fix -> Kalman fusion.
//
// Every random draw comes from a stream seeded by derive_seed(master, {tag,
// epoch, anchor}), so any epoch can be reproduced in isolation (the CLI's
// `localize --epoch k` relies on this) and outputs never depend on the order
// streams are consumed.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uwloc/environment.hpp"
#include "uwloc/fusion.hpp"
#include "uwloc/geodesy.hpp"
#include "uwloc/multilateration.hpp"
#include "uwloc/propagation.hpp"
#include "uwloc/random.hpp"
#include "uwloc/scenario.hpp"

namespace uwloc {

namespace stream {
inline constexpr std::uint64_t kGps = 1;
inline constexpr std::uint64_t kPing = 2;
inline constexpr std::uint64_t kPressure = 3;
inline constexpr std::uint64_t kGa = 4;
}  // namespace stream

/// Piecewise-linear position at time t, clamped to the end waypoints.
inline Enu interpolate(const std::vector<Waypoint>& trajectory, double t) {
  if (t <= trajectory.front().t) return trajectory.front().position;
  if (t >= trajectory.back().t) return trajectory.back().position;
  std::size_t i = 1;
  while (trajectory[i].t < t) ++i;
  const Waypoint& a = trajectory[i - 1];
  const Waypoint& b = trajectory[i];
  const double u = (t - a.t) / (b.t - a.t);
  return a.position + (b.position - a.position) * u;
}

/// Everything one epoch observes before localisation.
struct EpochObservation {
  std::size_t index = 0;
  double timestamp = 0.0;
  Enu truth;
  std::vector<Anchor> noisy_anchors;  // GPS-perturbed, as the solver sees them
  std::vector<PingResult> pings;      // one per anchor
  std::vector<PingMeasurement> measurements;
  double measured_depth = 0.0;        // from the synthesised pressure reading

  std::size_t detections() const { return measurements.size(); }
};

struct EpochRecord {
  double timestamp = 0.0;
  Enu truth;
  std::size_t n_detections = 0;
  std::optional<PositionEstimate> raw;  // empty on fix-gap epochs
  EkfState fused;
  std::optional<double> raw_error;
  double fused_error = 0.0;
};

struct AxisRmse {
  double east = 0.0;
  double north = 0.0;
  double up = 0.0;
  double total = 0.0;
};

struct RunSummary {
  std::size_t n_epochs = 0;
  std::size_t n_fixes = 0;
  std::size_t n_pings = 0;
  std::size_t n_detections = 0;
  double detection_rate = 0.0;
  // Computed over epochs that produced a GA fix; empty when there were none.
  std::optional<AxisRmse> raw_rmse;
  std::optional<AxisRmse> fused_rmse;
  std::optional<double> raw_max_error;
  std::optional<double> fused_max_error;
  /// Over every epoch, fix or not.
  std::optional<double> fused_rmse_all_epochs;
  GeodeticCoord enu_origin;
  std::uint64_t master_seed = 0;
  std::uint64_t ga_seed = 0;
};

struct RunResult {
  std::vector<EpochRecord> records;
  RunSummary summary;
};

/// Scenario plus the derived media and frames the pipeline works in.
class Simulator {
 public:
  explicit Simulator(Scenario scenario)
      : scenario_(std::move(scenario)),
        column_(scenario_.water_column),
        profile_(column_, scenario_.carrier_frequency),
        origin_(scenario_.origin()) {
    validate(scenario_);
    for (const auto& a : scenario_.anchors) {
      Enu p = geodetic_to_enu(a.position, origin_);
      // hydrophones ride at the surface; earth curvature and antenna height
      // are folded onto the flat layered model
      p.up = std::clamp(p.up, -column_.total_depth(), 0.0);
      anchor_truth_.push_back({a.id, p});
    }
    const double t0 = scenario_.trajectory.front().t;
    const double t1 = scenario_.trajectory.back().t;
    const double slack = 1e-9 * std::max(1.0, std::abs(t1));
    for (std::size_t k = 0;; ++k) {
      const double t = t0 + static_cast<double>(k) * scenario_.ping_interval;
      if (t > t1 + slack) break;
      epoch_times_.push_back(t);
    }
  }

  const Scenario& scenario() const { return scenario_; }
  const WaterColumn& column() const { return column_; }
  const AcousticProfile& profile() const { return profile_; }
  const GeodeticCoord& origin() const { return origin_; }
  const std::vector<Anchor>& anchors() const { return anchor_truth_; }
  const std::vector<double>& epoch_times() const { return epoch_times_; }
  std::size_t epoch_count() const { return epoch_times_.size(); }

  FitnessContext fitness_context() const {
    FitnessContext ctx;
    ctx.profile = &profile_;
    ctx.path_model = scenario_.channel.path_model;
    return ctx;
  }

  GaConfig ga_config_for(std::size_t epoch) const {
    GaConfig g = scenario_.ga;
    g.seed = derive_seed(scenario_.ga.seed, {stream::kGa, epoch});
    return g;
  }

  EpochObservation observe(std::size_t epoch) const {
    if (epoch >= epoch_times_.size()) {
      throw InputError("epoch " + std::to_string(epoch) + " out of range (scenario has " +
                       std::to_string(epoch_times_.size()) + " epochs)");
    }
    const std::uint64_t master = scenario_.seed;
    EpochObservation obs;
    obs.index = epoch;
    obs.timestamp = epoch_times_[epoch];
    obs.truth = interpolate(scenario_.trajectory, obs.timestamp);

    const Enu& gps_sigma = scenario_.gps_noise_sigma;
    for (std::size_t i = 0; i < anchor_truth_.size(); ++i) {
      const Anchor& a = anchor_truth_[i];
      Rng gps(derive_seed(master, {stream::kGps, epoch, i}));
      Anchor noisy = a;
      noisy.position.east += gaussian(gps, gps_sigma.east);
      noisy.position.north += gaussian(gps, gps_sigma.north);
      noisy.position.up += gaussian(gps, gps_sigma.up);
      obs.noisy_anchors.push_back(noisy);

      Rng ping(derive_seed(master, {stream::kPing, epoch, i}));
      PingResult r = simulate_ping(profile_, scenario_.channel, obs.truth, a.position, a.id,
                                   ping, obs.timestamp);
      if (r.measurement) obs.measurements.push_back(*r.measurement);
      obs.pings.push_back(std::move(r));
    }

    Rng pressure(derive_seed(master, {stream::kPressure, epoch}));
    const double density = scenario_.ekf.water_density;
    const double noisy_depth = obs.truth.depth() + gaussian(pressure, scenario_.ekf.depth_sigma);
    const double pa = std::max(depth_to_pressure(noisy_depth, density),
                               seawater::kAtmosphericPressure);
    obs.measured_depth = pressure_to_depth({pa, obs.timestamp}, density);
    return obs;
  }

  bool can_localize(const EpochObservation& obs) const {
    std::set<std::string> ids;
    for (const auto& m : obs.measurements) ids.insert(m.anchor_id);
    return ids.size() >= 4;
  }

  PositionEstimate localize(const EpochObservation& obs,
                            const GenerationCallback& on_generation = {}) const {
    return ga_localize(obs.measurements, obs.noisy_anchors, ga_config_for(obs.index),
                       fitness_context(), on_generation);
  }

  double fix_variance(const PositionEstimate& est) const {
    const EkfConfig& e = scenario_.ekf;
    double sigma = e.fix_sigma;
    if (e.fix_covariance == FixCovariance::kDispersion) {
      sigma = std::max(sigma, e.fix_dispersion_scale * est.population_dispersion);
    }
    return sigma * sigma;
  }

  RunResult run() const {
    RunResult out;
    const EkfConfig& e = scenario_.ekf;
    std::optional<EkfState> state;

    for (std::size_t k = 0; k < epoch_times_.size(); ++k) {
      const EpochObservation obs = observe(k);
      EpochRecord rec;
      rec.timestamp = obs.timestamp;
      rec.truth = obs.truth;
      rec.n_detections = obs.detections();
      out.summary.n_pings += obs.pings.size();
      out.summary.n_detections += obs.detections();

      if (!state) {
        state = make_initial_state({0.0, 0.0, -obs.measured_depth}, e.initial_position_sigma,
                                   e.initial_velocity_sigma, obs.timestamp);
      } else {
        state = ekf_predict(*state, obs.timestamp - state->timestamp, e.accel_psd);
      }

      if (can_localize(obs)) {
        rec.raw = localize(obs);
        rec.raw_error = distance(rec.raw->position, obs.truth);
        state = ekf_update_fix(*state, rec.raw->position, fix_variance(*rec.raw), obs.timestamp);
      }
      state = ekf_update_depth(*state, obs.measured_depth, e.depth_sigma * e.depth_sigma);

      rec.fused = *state;
      rec.fused_error = distance(state->position(), obs.truth);
      out.records.push_back(rec);
    }
    out.summary = summarize(out.records, out.summary.n_pings, out.summary.n_detections);
    return out;
  }

  RunSummary summarize(const std::vector<EpochRecord>& records, std::size_t n_pings,
                       std::size_t n_detections) const {
    RunSummary s;
    s.n_epochs = records.size();
    s.n_pings = n_pings;
    s.n_detections = n_detections;
    s.detection_rate = n_pings > 0 ? static_cast<double>(n_detections) / n_pings : 0.0;
    s.enu_origin = origin_;
    s.master_seed = scenario_.seed;
    s.ga_seed = scenario_.ga.seed;

    AxisRmse raw, fused;
    double raw_max = 0.0, fused_max = 0.0, fused_all = 0.0;
    for (const auto& r : records) {
      const Enu f = r.fused.position() - r.truth;
      fused_all += f.east * f.east + f.north * f.north + f.up * f.up;
      if (!r.raw) continue;
      ++s.n_fixes;
      const Enu d = r.raw->position - r.truth;
      raw.east += d.east * d.east;
      raw.north += d.north * d.north;
      raw.up += d.up * d.up;
      fused.east += f.east * f.east;
      fused.north += f.north * f.north;
      fused.up += f.up * f.up;
      raw_max = std::max(raw_max, *r.raw_error);
      fused_max = std::max(fused_max, r.fused_error);
    }
    auto finish = [&](AxisRmse a) {
      const double n = static_cast<double>(s.n_fixes);
      a.total = std::sqrt((a.east + a.north + a.up) / n);
      a.east = std::sqrt(a.east / n);
      a.north = std::sqrt(a.north / n);
      a.up = std::sqrt(a.up / n);
      return a;
    };
    if (s.n_fixes > 0) {
      s.raw_rmse = finish(raw);
      s.fused_rmse = finish(fused);
      s.raw_max_error = raw_max;
      s.fused_max_error = fused_max;
    }
    if (!records.empty()) {
      s.fused_rmse_all_epochs = std::sqrt(fused_all / static_cast<double>(records.size()));
    }
    return s;
  }

 private:
  Scenario scenario_;
  WaterColumn column_;
  AcousticProfile profile_;
  GeodeticCoord origin_;
  std::vector<Anchor> anchor_truth_;
  std::vector<double> epoch_times_;
};

inline RunResult run_simulation(const Scenario& scenario) {
  return Simulator(scenario).run();
}

}  // namespace uwloc
