#pragma once

// Scenario documents: strict JSON parsing, validation and echo.
//
// Every object is parsed through a KeyReader that records which keys were
// consumed; anything left over is rejected with its full dotted path.

#include <Eigen/Core>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "uwloc/environment.hpp"
#include "uwloc/errors.hpp"
#include "uwloc/fusion.hpp"
#include "uwloc/geodesy.hpp"
#include "uwloc/multilateration.hpp"
#include "uwloc/propagation.hpp"

namespace uwloc {

using Json = nlohmann::json;

struct GeodeticAnchor {
  std::string id;
  GeodeticCoord position;  // radians internally, degrees in the file
};

struct Waypoint {
  double t = 0.0;
  Enu position;
};

enum class FixCovariance { kDispersion, kFixed };

struct EkfConfig {
  Eigen::Vector3d accel_psd{0.01, 0.01, 0.01};  // m^2/s^3 per axis
  double initial_position_sigma = 100.0;        // m
  double initial_velocity_sigma = 1.0;          // m/s
  FixCovariance fix_covariance = FixCovariance::kDispersion;
  /// Fixed-mode sigma, and the floor in dispersion mode (m).
  double fix_sigma = 2.0;
  double fix_dispersion_scale = 1.0;
  double depth_sigma = 0.1;  // m, pressure noise expressed as depth
  double water_density = seawater::kDensity;
};

struct Scenario {
  std::vector<Layer> water_column;
  double carrier_frequency = 12.0;  // kHz
  ChannelConfig channel;
  std::vector<GeodeticAnchor> anchors;
  Enu gps_noise_sigma{0.0, 0.0, 0.0};
  std::optional<GeodeticCoord> enu_origin;
  std::vector<Waypoint> trajectory;
  double ping_interval = 1.0;  // s
  GaConfig ga;
  bool ga_seed_given = false;
  bool search_bounds_given = false;
  EkfConfig ekf;
  std::uint64_t seed = 1;

  /// Origin actually used: the explicit one, else the first anchor.
  GeodeticCoord origin() const {
    return enu_origin ? *enu_origin : anchors.front().position;
  }
};

namespace detail {

/// Typed access to one JSON object with unknown-key detection.
class KeyReader {
 public:
  KeyReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(where() + " must be an object");
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& raw(const std::string& key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ValidationError("missing required key \"" + key_path(key) + "\"");
    return *it;
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) throw ValidationError(key_path(key) + " must be a number");
    return v.get<double>();
  }
  void number(const std::string& key, double& out) {
    if (has(key)) out = number(key);
  }

  std::uint64_t unsigned_integer(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_unsigned()) {
      throw ValidationError(key_path(key) + " must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  void count(const std::string& key, std::size_t& out) {
    if (has(key)) out = static_cast<std::size_t>(unsigned_integer(key));
  }

  std::string string(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_string()) throw ValidationError(key_path(key) + " must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_boolean()) throw ValidationError(key_path(key) + " must be true or false");
    return v.get<bool>();
  }

  const Json& array(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) throw ValidationError(key_path(key) + " must be an array");
    return v;
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
        throw ValidationError("unknown key \"" + key_path(it.key()) + "\"");
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "scenario" : path_; }

  const Json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

inline Enu read_enu(const Json& j, const std::string& path) {
  KeyReader r(j, path);
  Enu p{r.number("east"), r.number("north"), r.number("up")};
  r.finish();
  return p;
}

inline GeodeticCoord read_geodetic(KeyReader& r) {
  const double lat = r.number("latitude_deg");
  const double lon = r.number("longitude_deg");
  double h = 0.0;
  r.number("height_m", h);
  if (!(lat >= -90.0 && lat <= 90.0)) {
    throw ValidationError(r.key_path("latitude_deg") + " outside [-90, 90]");
  }
  if (!(lon > -180.0 && lon <= 180.0)) {
    throw ValidationError(r.key_path("longitude_deg") + " outside (-180, 180]");
  }
  return geodetic_from_degrees(lat, lon, h);
}

inline void read_ga(const Json& j, Scenario& s) {
  KeyReader r(j, "ga");
  GaConfig& g = s.ga;
  r.count("population_size", g.population_size);
  r.count("generations", g.generations);
  r.count("tournament_size", g.tournament_size);
  r.number("crossover_rate", g.crossover_rate);
  r.number("mutation_rate", g.mutation_rate);
  r.number("mutation_sigma_initial", g.mutation_sigma_initial);
  r.number("mutation_sigma_decay", g.mutation_sigma_decay);
  r.count("elite_count", g.elite_count);
  if (r.has("search_bounds")) {
    KeyReader b(r.raw("search_bounds"), "ga.search_bounds");
    g.search_bounds.min = read_enu(b.raw("min"), "ga.search_bounds.min");
    g.search_bounds.max = read_enu(b.raw("max"), "ga.search_bounds.max");
    b.finish();
    s.search_bounds_given = true;
  }
  if (r.has("fitness_mode")) g.fitness_mode = fitness_mode_from_string(r.string("fitness_mode"));
  if (r.has("seed")) {
    g.seed = r.unsigned_integer("seed");
    s.ga_seed_given = true;
  }
  r.number("stop_fitness", g.stop_fitness);
  r.count("stagnation_limit", g.stagnation_limit);
  r.number("gdop_warning_threshold", g.gdop_warning_threshold);
  if (r.has("snr_weighting")) g.snr_weighting = r.boolean("snr_weighting");
  r.finish();
}

inline void read_ekf(const Json& j, EkfConfig& e) {
  KeyReader r(j, "ekf");
  if (r.has("accel_psd")) {
    const Json& v = r.raw("accel_psd");
    if (v.is_number()) {
      e.accel_psd.setConstant(v.get<double>());
    } else if (v.is_array() && v.size() == 3 &&
               std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); })) {
      e.accel_psd = Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    } else {
      throw ValidationError("ekf.accel_psd must be a number or an array of 3 numbers");
    }
  }
  r.number("initial_position_sigma", e.initial_position_sigma);
  r.number("initial_velocity_sigma", e.initial_velocity_sigma);
  if (r.has("fix_covariance")) {
    const std::string mode = r.string("fix_covariance");
    if (mode == "dispersion") {
      e.fix_covariance = FixCovariance::kDispersion;
    } else if (mode == "fixed") {
      e.fix_covariance = FixCovariance::kFixed;
    } else {
      throw ValidationError("ekf.fix_covariance must be \"dispersion\" or \"fixed\"");
    }
  }
  r.number("fix_sigma", e.fix_sigma);
  r.number("fix_dispersion_scale", e.fix_dispersion_scale);
  r.number("depth_sigma", e.depth_sigma);
  r.number("water_density", e.water_density);
  r.finish();
}

inline std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

/// Default search box: anchor footprint padded by half its span (at least
/// 100 m), full column depth.
inline Bounds default_search_bounds(const std::vector<Enu>& anchors, double total_depth) {
  Enu lo = anchors.front(), hi = anchors.front();
  for (const auto& a : anchors) {
    lo.east = std::min(lo.east, a.east);
    lo.north = std::min(lo.north, a.north);
    hi.east = std::max(hi.east, a.east);
    hi.north = std::max(hi.north, a.north);
  }
  const double pad = std::max(100.0, 0.5 * std::max(hi.east - lo.east, hi.north - lo.north));
  return {{lo.east - pad, lo.north - pad, -total_depth}, {hi.east + pad, hi.north + pad, 0.0}};
}

}  // namespace detail

/// Checks every cross-field invariant. Throws ValidationError naming the key.
inline void validate(const Scenario& s) {
  const WaterColumn column(s.water_column);
  if (!(s.carrier_frequency > 0.0)) throw ValidationError("carrier_frequency must be > 0");
  validate(s.channel);
  if (s.anchors.size() < 4) throw ValidationError("at least 4 anchors are required");
  for (std::size_t i = 0; i < s.anchors.size(); ++i) {
    for (std::size_t j = i + 1; j < s.anchors.size(); ++j) {
      if (s.anchors[i].id == s.anchors[j].id) {
        throw ValidationError("anchors[" + std::to_string(j) + "].id \"" + s.anchors[j].id +
                              "\" is not unique");
      }
    }
  }
  if (!(s.gps_noise_sigma.east >= 0.0 && s.gps_noise_sigma.north >= 0.0 &&
        s.gps_noise_sigma.up >= 0.0)) {
    throw ValidationError("gps_noise_sigma components must be >= 0");
  }
  if (s.trajectory.empty()) throw ValidationError("trajectory needs at least one waypoint");
  for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
    const Waypoint& w = s.trajectory[i];
    if (i > 0 && !(w.t > s.trajectory[i - 1].t)) {
      throw ValidationError("trajectory[" + std::to_string(i) +
                            "].t must be strictly increasing");
    }
    const double depth = w.position.depth();
    if (!(depth >= 0.0 && depth <= column.total_depth())) {
      throw ValidationError("trajectory[" + std::to_string(i) +
                            "].up must lie within the water column");
    }
  }
  if (!(s.ping_interval > 0.0)) throw ValidationError("ping_interval must be > 0");
  validate(s.ga);
  if (s.ga.search_bounds.min.up < -column.total_depth()) {
    throw ValidationError("ga.search_bounds.min.up lies below the water column");
  }
  const EkfConfig& e = s.ekf;
  if (!((e.accel_psd.array() >= 0.0).all())) throw ValidationError("ekf.accel_psd must be >= 0");
  if (!(e.initial_position_sigma > 0.0) || !(e.initial_velocity_sigma > 0.0)) {
    throw ValidationError("ekf initial sigmas must be > 0");
  }
  if (!(e.fix_sigma > 0.0)) throw ValidationError("ekf.fix_sigma must be > 0");
  if (!(e.fix_dispersion_scale >= 0.0)) {
    throw ValidationError("ekf.fix_dispersion_scale must be >= 0");
  }
  if (!(e.depth_sigma > 0.0)) throw ValidationError("ekf.depth_sigma must be > 0");
  if (!(e.water_density > 0.0)) throw ValidationError("ekf.water_density must be > 0");
}

inline Scenario parse_scenario(const Json& root) {
  Scenario s;
  detail::KeyReader r(root, "");

  const Json& layers = r.array("water_column");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    detail::KeyReader lr(layers[i], "water_column[" + std::to_string(i) + "]");
    Layer l{lr.number("thickness"), lr.number("temperature"), lr.number("salinity"),
            lr.number("ph")};
    lr.finish();
    s.water_column.push_back(l);
  }
  r.number("carrier_frequency", s.carrier_frequency);

  if (r.has("channel")) {
    detail::KeyReader c(r.raw("channel"), "channel");
    c.number("source_level", s.channel.source_level);
    c.number("noise_level", s.channel.noise_level);
    c.number("detection_threshold", s.channel.detection_threshold);
    c.number("tof_noise_sigma", s.channel.tof_noise_sigma);
    if (c.has("path_model")) s.channel.path_model = path_model_from_string(c.string("path_model"));
    c.finish();
  }

  const Json& anchors = r.array("anchors");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    detail::KeyReader ar(anchors[i], "anchors[" + std::to_string(i) + "]");
    GeodeticAnchor a;
    a.id = ar.has("id") ? ar.string("id") : "A" + std::to_string(i);
    a.position = detail::read_geodetic(ar);
    ar.finish();
    s.anchors.push_back(a);
  }
  if (r.has("gps_noise_sigma")) {
    s.gps_noise_sigma = detail::read_enu(r.raw("gps_noise_sigma"), "gps_noise_sigma");
  }
  if (r.has("enu_origin")) {
    detail::KeyReader o(r.raw("enu_origin"), "enu_origin");
    s.enu_origin = detail::read_geodetic(o);
    o.finish();
  }

  const Json& traj = r.array("trajectory");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    detail::KeyReader w(traj[i], "trajectory[" + std::to_string(i) + "]");
    Waypoint wp;
    wp.t = w.number("t");
    wp.position = {w.number("east"), w.number("north"), w.number("up")};
    w.finish();
    s.trajectory.push_back(wp);
  }
  r.number("ping_interval", s.ping_interval);
  if (r.has("ga")) detail::read_ga(r.raw("ga"), s);
  if (r.has("ekf")) detail::read_ekf(r.raw("ekf"), s.ekf);
  if (r.has("seed")) s.seed = r.unsigned_integer("seed");
  r.finish();

  // Defaults that depend on other fields.
  const WaterColumn column(s.water_column);
  if (s.anchors.size() >= 4 && !s.search_bounds_given) {
    std::vector<Enu> enu;
    for (const auto& a : s.anchors) enu.push_back(geodetic_to_enu(a.position, s.origin()));
    s.ga.search_bounds = detail::default_search_bounds(enu, column.total_depth());
  }
  if (!s.ga_seed_given) s.ga.seed = s.seed;

  validate(s);
  return s;
}

inline Scenario parse_scenario_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("scenario parse error at " + detail::line_context(text, e.byte) +
                          ": " + e.what());
  }
  return parse_scenario(root);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open scenario file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

namespace detail {
inline Json enu_json(const Enu& p) {
  return {{"east", p.east}, {"north", p.north}, {"up", p.up}};
}
inline Json geodetic_json(const GeodeticCoord& g) {
  return {{"latitude_deg", rad_to_deg(g.latitude)},
          {"longitude_deg", rad_to_deg(g.longitude)},
          {"height_m", g.height}};
}
}  // namespace detail

/// Fully-resolved scenario (defaults filled) in the same schema it was read
/// from; parse_scenario(to_json(s)) reproduces s.
inline Json to_json(const Scenario& s) {
  Json j;
  Json layers = Json::array();
  for (const auto& l : s.water_column) {
    layers.push_back({{"thickness", l.thickness},
                      {"temperature", l.temperature},
                      {"salinity", l.salinity},
                      {"ph", l.ph}});
  }
  j["water_column"] = layers;
  j["carrier_frequency"] = s.carrier_frequency;
  j["channel"] = {{"source_level", s.channel.source_level},
                  {"noise_level", s.channel.noise_level},
                  {"detection_threshold", s.channel.detection_threshold},
                  {"tof_noise_sigma", s.channel.tof_noise_sigma},
                  {"path_model", to_string(s.channel.path_model)}};
  Json anchors = Json::array();
  for (const auto& a : s.anchors) {
    Json aj = detail::geodetic_json(a.position);
    aj["id"] = a.id;
    anchors.push_back(aj);
  }
  j["anchors"] = anchors;
  j["gps_noise_sigma"] = detail::enu_json(s.gps_noise_sigma);
  j["enu_origin"] = detail::geodetic_json(s.origin());
  Json traj = Json::array();
  for (const auto& w : s.trajectory) {
    traj.push_back({{"t", w.t},
                    {"east", w.position.east},
                    {"north", w.position.north},
                    {"up", w.position.up}});
  }
  j["trajectory"] = traj;
  j["ping_interval"] = s.ping_interval;
  const GaConfig& g = s.ga;
  j["ga"] = {{"population_size", g.population_size},
             {"generations", g.generations},
             {"tournament_size", g.tournament_size},
             {"crossover_rate", g.crossover_rate},
             {"mutation_rate", g.mutation_rate},
             {"mutation_sigma_initial", g.mutation_sigma_initial},
             {"mutation_sigma_decay", g.mutation_sigma_decay},
             {"elite_count", g.elite_count},
             {"search_bounds",
              {{"min", detail::enu_json(g.search_bounds.min)},
               {"max", detail::enu_json(g.search_bounds.max)}}},
             {"fitness_mode", to_string(g.fitness_mode)},
             {"seed", g.seed},
             {"stop_fitness", g.stop_fitness},
             {"stagnation_limit", g.stagnation_limit},
             {"gdop_warning_threshold", g.gdop_warning_threshold},
             {"snr_weighting", g.snr_weighting}};
  const EkfConfig& e = s.ekf;
  j["ekf"] = {{"accel_psd", {e.accel_psd(0), e.accel_psd(1), e.accel_psd(2)}},
              {"initial_position_sigma", e.initial_position_sigma},
              {"initial_velocity_sigma", e.initial_velocity_sigma},
              {"fix_covariance",
               e.fix_covariance == FixCovariance::kDispersion ? "dispersion" : "fixed"},
              {"fix_sigma", e.fix_sigma},
              {"fix_dispersion_scale", e.fix_dispersion_scale},
              {"depth_sigma", e.depth_sigma},
              {"water_density", e.water_density}};
  j["seed"] = s.seed;
  return j;
}

}  // namespace uwloc
