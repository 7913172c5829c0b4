#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "confheat/points.hpp"

namespace confheat::process {

using points::Configuration;

/// Discretized Brownian paths (variance 2 per unit time per coordinate) of
/// the unfolded particles of one configuration.
struct PathBundle {
  int dim = 0;
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::size_t particles = 0;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  std::vector<double> times;      // steps + 1 entries, last one == horizon
  std::vector<double> positions;  // [step][particle][coord]

  std::span<const double> position(std::size_t step, std::size_t particle) const {
    return {positions.data() + (step * particles + particle) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

inline constexpr std::uint64_t kMaxPathSteps = 100'000'000;

/// The final step is shortened when horizon is not a multiple of dt.
/// `frozen` zeroes every increment.
PathBundle simulate_paths(const Configuration& gamma, double horizon, double dt, std::uint64_t seed,
                          std::uint32_t replica, bool frozen = false);

/// Columns replica, particle, step, time, x0, x1, ...
void write_paths_csv(const PathBundle& bundle, std::ostream& out, bool header = true);

struct BnPathReport {
  int n = 0;
  std::vector<double> values;  // B_n at each grid time
  double max_increment = 0.0;
  bool lipschitz_ok = true;  // |ΔB_n| ≤ Σ_k |Δω_k| / n at every step
};

BnPathReport bn_continuity_report(const PathBundle& bundle, int n);

struct BnRefinementReport {
  int n = 0;
  double dt_coarse = 0.0, dt_fine = 0.0;
  double median_coarse = 0.0, median_fine = 0.0;
  std::size_t replicas = 0;
  bool lipschitz_ok = true;
  bool pass = false;
};

BnRefinementReport bn_refinement(const Configuration& gamma, double horizon, double dt_coarse, double dt_fine, int n,
                                 std::size_t replicas, std::uint64_t seed, unsigned threads = 1);

struct OscillationReport {
  int dim = 0;
  double delta = 0.0;
  double r = 0.0;
  std::size_t steps = 0;
  std::size_t replicas = 0;
  double empirical = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // 2 τ(δ, r/4)
  bool pass = false;
};

/// Probability that a Brownian path on [a, b] sampled at `steps` + 1 grid
/// times has two grid positions more than r apart.
OscillationReport oscillation_check(std::span<const double> start, double a, double b, double r,
                                    std::size_t replicas, std::uint64_t seed, std::size_t steps = 64,
                                    unsigned threads = 1);

struct CollisionRow {
  double epsilon = 0.0;
  double fraction = 0.0;
  double std_error = 0.0;
};

struct CollisionReport {
  int dim = 0;
  double horizon = 0.0;
  double dt = 0.0;
  std::size_t replicas = 0;
  std::vector<CollisionRow> rows;  // grid-based minimum pairwise distance
  bool strictly_decreasing = false;
  // d = 1 only: some pair changes order on [0, T], grid sign changes plus
  // Brownian-bridge crossings between grid times.
  double crossing_fraction = 0.0;
  double crossing_std_error = 0.0;
};

CollisionReport collision_report(const Configuration& gamma, double horizon, double dt,
                                 std::span<const double> epsilon_list, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads = 1);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MarginalReport {
  double horizon = 0.0;
  std::size_t replicas = 0;
  KsResult ks;
  double variance = 0.0;  // per coordinate, ω(T) − ω(0)
  double variance_se = 0.0;
  double cross_correlation = 0.0;  // first coordinates of particles 0 and 1, if present
  double cross_correlation_se = 0.0;
};

/// Compares displacement norms of simulate_paths at `horizon` with diffuse.
MarginalReport marginal_check(const Configuration& gamma, double horizon, double dt, std::size_t replicas,
                              std::uint64_t seed, unsigned threads = 1);

}  // namespace confheat::process
