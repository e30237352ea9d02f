#pragma once

// Run artefacts: epochs.csv, summary.json and scenario.json.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "uwloc/errors.hpp"
#include "uwloc/scenario.hpp"
#include "uwloc/simulation.hpp"

namespace uwloc {

inline constexpr const char* kEpochsCsvHeader =
    "t,true_e,true_n,true_u,est_e,est_n,est_u,fused_e,fused_n,fused_u,raw_err,fused_err,"
    "n_detections";

/// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string epochs_csv(const std::vector<EpochRecord>& records) {
  std::string out = kEpochsCsvHeader;
  out += '\n';
  auto put = [&out](double v) {
    out += format_double(v);
    out += ',';
  };
  for (const auto& r : records) {
    put(r.timestamp);
    put(r.truth.east);
    put(r.truth.north);
    put(r.truth.up);
    if (r.raw) {
      put(r.raw->position.east);
      put(r.raw->position.north);
      put(r.raw->position.up);
    } else {
      out += ",,,";  // fix gap
    }
    const Enu f = r.fused.position();
    put(f.east);
    put(f.north);
    put(f.up);
    if (r.raw_error) {
      put(*r.raw_error);
    } else {
      out += ',';
    }
    put(r.fused_error);
    out += std::to_string(r.n_detections);
    out += '\n';
  }
  return out;
}

inline Json summary_json(const RunSummary& s) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  auto rmse = [](const std::optional<AxisRmse>& a) -> Json {
    if (!a) return Json(nullptr);
    return {{"east", a->east}, {"north", a->north}, {"up", a->up}, {"total", a->total}};
  };
  Json j;
  j["n_epochs"] = s.n_epochs;
  j["n_fixes"] = s.n_fixes;
  j["n_pings"] = s.n_pings;
  j["n_detections"] = s.n_detections;
  j["detection_rate"] = s.detection_rate;
  j["raw_rmse"] = rmse(s.raw_rmse);
  j["fused_rmse"] = rmse(s.fused_rmse);
  j["raw_max_error"] = opt(s.raw_max_error);
  j["fused_max_error"] = opt(s.fused_max_error);
  j["fused_rmse_all_epochs"] = opt(s.fused_rmse_all_epochs);
  j["enu_origin"] = {{"latitude_deg", rad_to_deg(s.enu_origin.latitude)},
                     {"longitude_deg", rad_to_deg(s.enu_origin.longitude)},
                     {"height_m", s.enu_origin.height}};
  j["seeds"] = {{"master", s.master_seed},
                {"ga", s.ga_seed},
                {"derivation", "splitmix64 chain over (seed, stream tag, epoch, anchor)"}};
  return j;
}

namespace detail {
inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw Error("failed writing " + path.string());
}
}  // namespace detail

/// Writes epochs.csv, summary.json and scenario.json into out_dir (created
/// if needed).
inline void write_outputs(const std::vector<EpochRecord>& records, const RunSummary& summary,
                          const Scenario& scenario, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
  detail::write_file(out_dir / "epochs.csv", epochs_csv(records));
  detail::write_file(out_dir / "summary.json", summary_json(summary).dump(2) + "\n");
  detail::write_file(out_dir / "scenario.json", to_json(scenario).dump(2) + "\n");
}

}  // namespace uwloc
