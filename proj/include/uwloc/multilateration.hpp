#pragma once

// Beacon localisation from one-way travel times to surface anchors with a
// real-coded genetic algorithm.
//
// Evolution loop: evaluate -> elitism copy -> tournament selection ->
// BLX-0.5 blend crossover -> per-coordinate Gaussian mutation with
// geometrically decaying sigma -> clamp to the search box. All random draws
// happen in that sequential loop, in a fixed order, so a (inputs, seed) pair
// always reproduces the same estimate bit for bit.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "uwloc/environment.hpp"
#include "uwloc/errors.hpp"
#include "uwloc/geometry.hpp"
#include "uwloc/propagation.hpp"
#include "uwloc/random.hpp"

namespace uwloc {

struct Anchor {
  std::string id;
  Enu position;
};

enum class FitnessMode { kTofResidual, kRangeResidual };

inline const char* to_string(FitnessMode m) {
  return m == FitnessMode::kTofResidual ? "tof_residual" : "range_residual";
}

inline FitnessMode fitness_mode_from_string(const std::string& s) {
  if (s == "tof_residual") return FitnessMode::kTofResidual;
  if (s == "range_residual") return FitnessMode::kRangeResidual;
  throw ValidationError(
      "fitness_mode must be \"tof_residual\" or \"range_residual\", got \"" + s +
      "\"");
}

/// Axis-aligned ENU search box.
struct Bounds {
  Enu min;
  Enu max;

  bool contains(const Enu& p) const {
    return p.east >= min.east && p.east <= max.east && p.north >= min.north &&
           p.north <= max.north && p.up >= min.up && p.up <= max.up;
  }
  double largest_extent() const {
    return std::max({max.east - min.east, max.north - min.north, max.up - min.up});
  }
};

/// Penalty added per term when a candidate has no direct path to an anchor.
inline constexpr double kNoPathPenalty = 1e6;

struct GaConfig {
  std::size_t population_size = 200;
  std::size_t generations = 300;
  std::size_t tournament_size = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.3;
  /// Metres; non-positive means 10 % of the largest search-box extent.
  double mutation_sigma_initial = 0.0;
  double mutation_sigma_decay = 0.98;
  std::size_t elite_count = 1;
  Bounds search_bounds{{-500.0, -500.0, -200.0}, {500.0, 500.0, 0.0}};
  FitnessMode fitness_mode = FitnessMode::kTofResidual;
  std::uint64_t seed = 42;

  /// Stop once the best fitness drops below this value.
  double stop_fitness = 1e-12;
  /// Stop after this many generations without strict improvement.
  std::size_t stagnation_limit = 100;
  /// Population dispersion (m) above which the fix is flagged as poorly
  /// conditioned.
  double gdop_warning_threshold = 1.0;
  /// Weight residual terms by relative linear SNR.
  bool snr_weighting = false;

  double initial_sigma() const {
    return mutation_sigma_initial > 0.0 ? mutation_sigma_initial
                                        : 0.1 * search_bounds.largest_extent();
  }
};

inline void validate(const GaConfig& c) {
  if (c.population_size < 4) {
    throw ValidationError("ga.population_size must be >= 4");
  }
  if (c.tournament_size < 1) throw ValidationError("ga.tournament_size must be >= 1");
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) {
    throw ValidationError("ga.crossover_rate must be in [0, 1]");
  }
  if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) {
    throw ValidationError("ga.mutation_rate must be in [0, 1]");
  }
  if (c.elite_count >= c.population_size) {
    throw ValidationError("ga.elite_count must be < population_size");
  }
  if (!(c.mutation_sigma_decay > 0.0) || !std::isfinite(c.mutation_sigma_decay)) {
    throw ValidationError("ga.mutation_sigma_decay must be > 0");
  }
  if (!std::isfinite(c.mutation_sigma_initial)) {
    throw ValidationError("ga.mutation_sigma_initial must be finite");
  }
  const Bounds& b = c.search_bounds;
  if (!(b.min.east < b.max.east && b.min.north < b.max.north &&
        b.min.up < b.max.up)) {
    throw ValidationError("ga.search_bounds must have min < max on every axis");
  }
  if (b.max.up > 0.0) {
    throw ValidationError("ga.search_bounds max up must be <= 0 (underwater)");
  }
}

struct PositionEstimate {
  Enu position;
  double best_fitness = 0.0;           // s^2 or m^2 depending on mode
  double population_dispersion = 0.0;  // m
  std::size_t generations_run = 0;
  bool dispersion_warning = false;
};

/// Medium and path model the objective evaluates travel times in.
struct FitnessContext {
  const AcousticProfile* profile = nullptr;
  PathModel path_model = PathModel::kRefracted;
  /// range_residual mode: depth assumed when converting TOF to range. When
  /// unset, the candidate's own depth is used.
  std::optional<double> assumed_target_depth;
  bool snr_weighting = false;
};

/// TOF times the thickness-weighted harmonic-mean sound speed between the
/// two depths. A zero-thickness interval uses the local layer speed.
inline double range_from_tof(double tof, const AcousticProfile& profile,
                             double anchor_depth, double target_depth) {
  if (!(tof > 0.0) || !std::isfinite(tof)) {
    throw DomainError("tof must be > 0, got " + std::to_string(tof));
  }
  detail::require_in_column(profile, anchor_depth, "anchor");
  detail::require_in_column(profile, target_depth, "target");
  const double top = std::min(anchor_depth, target_depth);
  const double bottom = std::max(anchor_depth, target_depth);
  if (bottom == top) return tof * profile.speed(profile.index_at(top));

  const auto& b = profile.boundaries();
  double slowness = 0.0;
  for (std::size_t i = profile.index_at(top); i < profile.size(); ++i) {
    const double lo = std::max(top, b[i]);
    const double hi = std::min(bottom, b[i + 1]);
    if (hi > lo) slowness += (hi - lo) / profile.speed(i);
    if (b[i + 1] >= bottom) break;
  }
  return tof * (bottom - top) / slowness;
}

/// Pre-resolved least-squares objective over a fixed measurement set.
class Objective {
 public:
  Objective(const std::vector<PingMeasurement>& measurements,
            const std::vector<Anchor>& anchors, FitnessMode mode,
            const FitnessContext& ctx)
      : mode_(mode), ctx_(ctx) {
    if (ctx_.profile == nullptr) throw InputError("fitness context has no profile");
    std::unordered_map<std::string, const Anchor*> by_id;
    for (const auto& a : anchors) {
      if (!by_id.emplace(a.id, &a).second) {
        throw InputError("duplicate anchor id \"" + a.id + "\"");
      }
    }
    const double bottom = ctx_.profile->total_depth();
    double mean_linear_snr = 0.0;
    for (const auto& m : measurements) {
      auto it = by_id.find(m.anchor_id);
      if (it == by_id.end()) {
        throw InputError("measurement references unknown anchor \"" +
                         m.anchor_id + "\"");
      }
      if (!(m.tof_measured > 0.0)) {
        throw InputError("measurement tof must be > 0");
      }
      Term t;
      t.anchor = it->second->position;
      // hydrophones float at the surface: keep noisy GPS heights in the column
      t.anchor.up = std::clamp(t.anchor.up, -bottom, 0.0);
      t.tof = m.tof_measured;
      t.weight = std::pow(10.0, m.snr / 10.0);
      mean_linear_snr += t.weight;
      if (mode_ == FitnessMode::kRangeResidual && ctx_.assumed_target_depth) {
        t.range = range_from_tof(t.tof, *ctx_.profile, t.anchor.depth(),
                                 *ctx_.assumed_target_depth);
      }
      terms_.push_back(t);
    }
    mean_linear_snr /= static_cast<double>(std::max<std::size_t>(1, terms_.size()));
    for (auto& t : terms_) {
      t.weight = ctx_.snr_weighting ? t.weight / mean_linear_snr : 1.0;
    }
  }

  std::size_t size() const { return terms_.size(); }

  double operator()(const Enu& candidate) const {
    const AcousticProfile& profile = *ctx_.profile;
    const double depth = candidate.depth();
    if (!(depth >= 0.0 && depth <= profile.total_depth())) {
      return kNoPathPenalty * static_cast<double>(terms_.size());
    }
    double sum = 0.0;
    for (const Term& t : terms_) {
      double r = 0.0;
      if (mode_ == FitnessMode::kTofResidual) {
        try {
          r = travel_time(profile, ctx_.path_model, candidate, t.anchor) - t.tof;
        } catch (const NoDirectPathError&) {
          sum += t.weight * kNoPathPenalty;
          continue;
        }
      } else {
        const double range =
            ctx_.assumed_target_depth
                ? t.range
                : range_from_tof(t.tof, profile, t.anchor.depth(), depth);
        r = distance(candidate, t.anchor) - range;
      }
      sum += t.weight * r * r;
    }
    return sum;
  }

 private:
  struct Term {
    Enu anchor;
    double tof = 0.0;
    double range = 0.0;
    double weight = 1.0;
  };

  FitnessMode mode_;
  FitnessContext ctx_;
  std::vector<Term> terms_;
};

/// Sum of squared residuals of `candidate` against every measurement.
inline double fitness(const Enu& candidate,
                      const std::vector<PingMeasurement>& measurements,
                      const std::vector<Anchor>& anchors, FitnessMode mode,
                      const FitnessContext& ctx) {
  return Objective(measurements, anchors, mode, ctx)(candidate);
}

using Individual = Enu;

namespace detail {

inline double& axis(Enu& p, int i) {
  return i == 0 ? p.east : (i == 1 ? p.north : p.up);
}
inline double axis(const Enu& p, int i) {
  return i == 0 ? p.east : (i == 1 ? p.north : p.up);
}

/// Indices ordered by (fitness, index).
inline std::vector<std::size_t> rank_order(const std::vector<double>& fit) {
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
  return order;
}

template <class URBG>
std::size_t tournament(const std::vector<double>& fit, std::size_t size,
                       URBG& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, fit.size() - 1);
  std::size_t best = pick(rng);
  for (std::size_t k = 1; k < size; ++k) {
    const std::size_t c = pick(rng);
    if (fit[c] < fit[best] || (fit[c] == fit[best] && c < best)) best = c;
  }
  return best;
}

inline Enu clamp_to(const Enu& p, const Bounds& b) {
  return {std::clamp(p.east, b.min.east, b.max.east),
          std::clamp(p.north, b.min.north, b.max.north),
          std::clamp(p.up, b.min.up, b.max.up)};
}

}  // namespace detail

/// One generation step. Elites are copied verbatim (best first); each other
/// slot is filled by two tournaments, BLX-0.5 crossover with probability
/// crossover_rate (otherwise a clone of the first parent), then per-axis
/// Gaussian mutation with probability mutation_rate, then clamping.
/// Accepts elite_count == population size (pure copy), unlike GaConfig
/// validation which requires at least one offspring slot.
template <class URBG>
std::vector<Individual> evolve_generation(const std::vector<Individual>& population,
                                          const std::vector<double>& fitness_values,
                                          const GaConfig& config, double sigma,
                                          URBG& rng) {
  if (population.size() != fitness_values.size()) {
    throw InputError("population and fitness sizes differ");
  }
  const std::size_t n = population.size();
  std::vector<Individual> next;
  next.reserve(n);

  const auto order = detail::rank_order(fitness_values);
  const std::size_t elites = std::min(config.elite_count, n);
  for (std::size_t i = 0; i < elites; ++i) next.push_back(population[order[i]]);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (next.size() < n) {
    const Enu& a = population[detail::tournament(fitness_values, config.tournament_size, rng)];
    const Enu& b = population[detail::tournament(fitness_values, config.tournament_size, rng)];
    Enu child = a;
    if (unit(rng) < config.crossover_rate) {
      for (int k = 0; k < 3; ++k) {
        const double lo = std::min(detail::axis(a, k), detail::axis(b, k));
        const double hi = std::max(detail::axis(a, k), detail::axis(b, k));
        const double spread = 0.5 * (hi - lo);
        detail::axis(child, k) = lo - spread + unit(rng) * (hi - lo + 2.0 * spread);
      }
    }
    for (int k = 0; k < 3; ++k) {
      if (unit(rng) < config.mutation_rate) {
        detail::axis(child, k) += gaussian(rng, sigma);
      }
    }
    next.push_back(detail::clamp_to(child, config.search_bounds));
  }
  return next;
}

/// Per-generation progress report for verbose tracing.
struct GenerationReport {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  Enu best_position;
  double sigma = 0.0;
};

using GenerationCallback = std::function<void(const GenerationReport&)>;

/// RMS distance of the best decile (at least one individual) from `best`.
inline double elite_decile_dispersion(const std::vector<Individual>& population,
                                      const std::vector<double>& fit,
                                      const Enu& best) {
  const auto order = detail::rank_order(fit);
  const std::size_t k = std::max<std::size_t>(1, population.size() / 10);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = distance(population[order[i]], best);
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(k));
}

inline PositionEstimate ga_localize(const std::vector<PingMeasurement>& measurements,
                                    const std::vector<Anchor>& anchors,
                                    const GaConfig& config,
                                    const FitnessContext& ctx,
                                    const GenerationCallback& on_generation = {}) {
  validate(config);
  if (measurements.empty()) throw InputError("no measurements to localise from");
  if (ctx.profile == nullptr) throw InputError("fitness context has no profile");
  if (config.search_bounds.min.up < -ctx.profile->total_depth()) {
    throw ValidationError("ga.search_bounds extend below the water column");
  }
  std::set<std::string> distinct;
  for (const auto& m : measurements) distinct.insert(m.anchor_id);
  FitnessContext objective_ctx = ctx;
  objective_ctx.snr_weighting = ctx.snr_weighting || config.snr_weighting;
  const Objective objective(measurements, anchors, config.fitness_mode, objective_ctx);
  if (distinct.size() < 4) {
    throw UnderdeterminedError("need measurements from at least 4 distinct anchors, got " +
                               std::to_string(distinct.size()));
  }

  Rng rng(config.seed);
  const Bounds& box = config.search_bounds;
  std::vector<Individual> population(config.population_size);
  {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (auto& ind : population) {
      ind.east = box.min.east + unit(rng) * (box.max.east - box.min.east);
      ind.north = box.min.north + unit(rng) * (box.max.north - box.min.north);
      ind.up = box.min.up + unit(rng) * (box.max.up - box.min.up);
    }
  }

  std::vector<double> fit(population.size());
  auto evaluate = [&] {
    for (std::size_t i = 0; i < population.size(); ++i) fit[i] = objective(population[i]);
  };
  evaluate();

  auto best_index = [&] {
    return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  };
  std::size_t bi = best_index();
  Enu best = population[bi];
  double best_fit = fit[bi];

  double sigma = config.initial_sigma();
  std::size_t stagnant = 0;
  std::size_t gen = 0;
  if (on_generation) on_generation({0, best_fit, best, sigma});
  while (gen < config.generations && best_fit >= config.stop_fitness &&
         stagnant < config.stagnation_limit) {
    population = evolve_generation(population, fit, config, sigma, rng);
    sigma *= config.mutation_sigma_decay;
    evaluate();
    ++gen;
    bi = best_index();
    if (fit[bi] < best_fit) {
      best_fit = fit[bi];
      best = population[bi];
      stagnant = 0;
    } else {
      ++stagnant;
    }
    if (on_generation) on_generation({gen, best_fit, best, sigma});
  }

  PositionEstimate est;
  est.position = best;
  est.best_fitness = best_fit;
  est.population_dispersion = elite_decile_dispersion(population, fit, best);
  est.generations_run = gen;
  est.dispersion_warning = est.population_dispersion > config.gdop_warning_threshold;
  return est;
}

}  // namespace uwloc
