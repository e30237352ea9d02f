// uwloc: scenario-driven command line front end.
//
//   uwloc profile  <scenario>
//   uwloc ping     <scenario> --src e,n,u --dst e,n,u
//   uwloc localize <scenario> --epoch k
//   uwloc run      <scenario> --out <dir> [--seed N]
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uwloc/uwloc.hpp"

namespace {

using uwloc::format_double;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

uwloc::Enu parse_triple(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw uwloc::ValidationError(std::string(flag) + ": \"" + item + "\" is not a number");
    }
  }
  if (v.size() != 3) {
    throw uwloc::ValidationError(std::string(flag) + " expects e,n,u (three numbers)");
  }
  return {v[0], v[1], v[2]};
}

std::string fmt_enu(const uwloc::Enu& p) {
  return format_double(p.east) + "," + format_double(p.north) + "," + format_double(p.up);
}

void cmd_profile(const std::string& path) {
  const uwloc::Scenario s = uwloc::load_scenario(path);
  const uwloc::WaterColumn column(s.water_column);
  const auto acoustics = uwloc::acoustics_profile(column, s.carrier_frequency);
  std::cout << "# carrier_frequency_khz " << format_double(s.carrier_frequency) << "\n";
  std::cout << "layer,top_m,bottom_m,mid_depth_m,temperature_c,salinity_psu,ph,"
               "sound_speed_mps,absorption_db_per_km\n";
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto& l = column[i];
    std::cout << i << ',' << format_double(column.boundaries()[i]) << ','
              << format_double(column.boundaries()[i + 1]) << ','
              << format_double(column.mid_depth(i)) << ',' << format_double(l.temperature)
              << ',' << format_double(l.salinity) << ',' << format_double(l.ph) << ','
              << format_double(acoustics[i].sound_speed) << ','
              << format_double(acoustics[i].absorption) << '\n';
  }
}

void cmd_ping(const std::string& path, const std::string& src, const std::string& dst) {
  const uwloc::Scenario s = uwloc::load_scenario(path);
  const uwloc::Enu source = parse_triple(src, "--src");
  const uwloc::Enu receiver = parse_triple(dst, "--dst");
  const uwloc::WaterColumn column(s.water_column);
  const uwloc::AcousticProfile profile(column, s.carrier_frequency);

  const uwloc::RayPath ray = uwloc::trace(profile, s.channel.path_model, source, receiver);
  const uwloc::LinkBudget budget =
      uwloc::link_budget(ray, profile, s.channel.source_level, s.channel.noise_level);
  std::cout << "path_model " << uwloc::to_string(s.channel.path_model) << "\n"
            << "source " << fmt_enu(source) << "\n"
            << "receiver " << fmt_enu(receiver) << "\n"
            << "tof_s " << format_double(ray.tof) << "\n"
            << "path_length_m " << format_double(ray.total_length) << "\n"
            << "horizontal_range_m " << format_double(ray.horizontal_range) << "\n"
            << "ray_parameter_s_per_m " << format_double(ray.ray_parameter) << "\n"
            << "source_level_db " << format_double(budget.source_level) << "\n"
            << "transmission_loss_db " << format_double(budget.transmission_loss) << "\n"
            << "noise_level_db " << format_double(budget.noise_level) << "\n"
            << "snr_db " << format_double(budget.snr) << "\n"
            << "detected " << (budget.snr >= s.channel.detection_threshold ? "yes" : "no")
            << "\n";
  std::cout << "segment,layer,length_m,grazing_angle_rad,horizontal_m\n";
  for (std::size_t i = 0; i < ray.segments.size(); ++i) {
    const auto& seg = ray.segments[i];
    std::cout << i << ',' << seg.layer << ',' << format_double(seg.length) << ','
              << format_double(seg.grazing_angle) << ',' << format_double(seg.horizontal)
              << '\n';
  }
}

void cmd_localize(const std::string& path, std::size_t epoch) {
  const uwloc::Simulator sim(uwloc::load_scenario(path));
  const uwloc::EpochObservation obs = sim.observe(epoch);
  std::cout << "epoch " << epoch << " t " << format_double(obs.timestamp) << "\n"
            << "truth " << fmt_enu(obs.truth) << "\n";
  for (std::size_t i = 0; i < obs.pings.size(); ++i) {
    const auto& p = obs.pings[i];
    std::cout << "anchor " << obs.noisy_anchors[i].id << " gps "
              << fmt_enu(obs.noisy_anchors[i].position) << " " << uwloc::to_string(p.status);
    if (p.measurement) std::cout << " tof " << format_double(p.measurement->tof_measured);
    if (!std::isnan(p.snr)) std::cout << " snr " << format_double(p.snr);
    std::cout << "\n";
  }
  if (!sim.can_localize(obs)) {
    std::cout << "fix-gap: " << obs.detections() << " detections, need 4\n";
    return;
  }
  std::cout << "generation,best_fitness,best_e,best_n,best_u,sigma\n";
  const uwloc::PositionEstimate est = sim.localize(obs, [](const uwloc::GenerationReport& r) {
    std::cout << r.generation << ',' << format_double(r.best_fitness) << ','
              << fmt_enu(r.best_position) << ',' << format_double(r.sigma) << '\n';
  });
  std::cout << "estimate " << fmt_enu(est.position) << "\n"
            << "best_fitness " << format_double(est.best_fitness) << "\n"
            << "population_dispersion_m " << format_double(est.population_dispersion) << "\n"
            << "generations_run " << est.generations_run << "\n"
            << "error_m " << format_double(uwloc::distance(est.position, obs.truth)) << "\n";
  if (est.dispersion_warning) std::cout << "warning: dispersion exceeds gdop threshold\n";
}

void cmd_run(const std::string& path, const std::string& out_dir,
             std::optional<std::uint64_t> seed) {
  uwloc::Scenario s = uwloc::load_scenario(path);
  if (seed) {
    s.seed = *seed;
    if (!s.ga_seed_given) s.ga.seed = *seed;
  }
  const uwloc::RunResult result = uwloc::run_simulation(s);
  uwloc::write_outputs(result.records, result.summary, s, out_dir);
  const auto& sm = result.summary;
  std::cout << "epochs " << sm.n_epochs << " fixes " << sm.n_fixes << " detection_rate "
            << format_double(sm.detection_rate) << "\n";
  if (sm.raw_rmse) {
    std::cout << "raw_rmse_m " << format_double(sm.raw_rmse->total) << " fused_rmse_m "
              << format_double(sm.fused_rmse->total) << "\n";
  }
  std::cout << "wrote " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Underwater acoustic propagation and GA multilateration simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string src, dst, out_dir;
  std::size_t epoch = 0;
  std::optional<std::uint64_t> seed;

  auto* profile = app.add_subcommand("profile", "Print per-layer sound speed and absorption");
  profile->add_option("scenario", scenario, "Scenario file")->required();

  auto* ping = app.add_subcommand("ping", "Trace one path and print TOF, TL and SNR");
  ping->add_option("scenario", scenario, "Scenario file")->required();
  ping->add_option("--src", src, "Source position e,n,u (m)")->required();
  ping->add_option("--dst", dst, "Receiver position e,n,u (m)")->required();

  auto* localize = app.add_subcommand("localize", "Solve one epoch with a verbose GA trace");
  localize->add_option("scenario", scenario, "Scenario file")->required();
  localize->add_option("--epoch", epoch, "Epoch index")->required();

  auto* run = app.add_subcommand("run", "Run the full pipeline and write outputs");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*profile) {
      cmd_profile(scenario);
    } else if (*ping) {
      cmd_ping(scenario, src, dst);
    } else if (*localize) {
      cmd_localize(scenario, epoch);
    } else if (*run) {
      cmd_run(scenario, out_dir, seed);
    }
  } catch (const uwloc::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
