#include "confheat/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "confheat/error.hpp"
#include "confheat/geometry.hpp"
#include "confheat/kernel.hpp"
#include "confheat/parallel.hpp"
#include "confheat/rng.hpp"

namespace confheat::process {

namespace {

std::vector<double> time_grid(double horizon, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("simulate_paths: dt must be positive");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw InputError("simulate_paths: horizon must be >= dt");
  const double raw = std::ceil(horizon / dt * (1.0 - 1e-12));
  if (raw > static_cast<double>(kMaxPathSteps)) throw CapacityError("simulate_paths: step count exceeds 1e8");
  const auto steps = static_cast<std::size_t>(raw);
  std::vector<double> times(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) times[k] = static_cast<double>(k) * dt;
  times[steps] = horizon;
  return times;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return m;
}

struct Proportion {
  double p = 0.0;
  double se = 0.0;
};

Proportion proportion(std::size_t hits, std::size_t n) {
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

}  // namespace

PathBundle simulate_paths(const Configuration& gamma, double horizon, double dt, std::uint64_t seed,
                          std::uint32_t replica, bool frozen) {
  PathBundle out;
  out.times = time_grid(horizon, dt);
  out.dim = gamma.dim();
  out.dt = dt;
  out.horizon = horizon;
  out.steps = out.times.size() - 1;
  out.seed = seed;
  out.replica = replica;
  const PointSet start = gamma.particles();
  out.particles = start.size();
  if (static_cast<double>(out.steps) * static_cast<double>(out.particles) > static_cast<double>(kMaxPathSteps)) {
    throw CapacityError("simulate_paths: particle-steps exceed 1e8");
  }
  const auto d = static_cast<std::size_t>(out.dim);
  const std::size_t stride = out.particles * d;
  out.positions.assign((out.steps + 1) * stride, 0.0);
  std::copy(start.coords().begin(), start.coords().end(), out.positions.begin());
  for (std::size_t p = 0; p < out.particles; ++p) {
    RandomStream rng(seed, replica, static_cast<std::uint32_t>(p), StreamTag::kPath);
    for (std::size_t k = 0; k < out.steps; ++k) {
      const double sd = std::sqrt(2.0 * (out.times[k + 1] - out.times[k]));
      const double* prev = out.positions.data() + k * stride + p * d;
      double* next = out.positions.data() + (k + 1) * stride + p * d;
      for (std::size_t c = 0; c < d; ++c) next[c] = prev[c] + (frozen ? 0.0 : sd * rng.normal());
    }
  }
  return out;
}

void write_paths_csv(const PathBundle& bundle, std::ostream& out, bool header) {
  if (header) {
    out << "replica,particle,step,time";
    for (int c = 0; c < bundle.dim; ++c) out << ",x" << c;
    out << "\r\n";
  }
  const auto old_precision = out.precision(17);
  for (std::size_t p = 0; p < bundle.particles; ++p) {
    for (std::size_t k = 0; k <= bundle.steps; ++k) {
      out << bundle.replica << ',' << p << ',' << k << ',' << bundle.times[k];
      for (double v : bundle.position(k, p)) out << ',' << v;
      out << "\r\n";
    }
  }
  out.precision(old_precision);
}

BnPathReport bn_continuity_report(const PathBundle& bundle, int n) {
  if (n < 1) throw InputError("bn_continuity_report: n must be >= 1");
  BnPathReport out;
  out.n = n;
  out.values.resize(bundle.steps + 1);
  for (std::size_t k = 0; k <= bundle.steps; ++k) {
    double s = 0.0;
    for (std::size_t p = 0; p < bundle.particles; ++p) s += std::exp(-norm(bundle.position(k, p)) / n);
    out.values[k] = s;
  }
  for (std::size_t k = 0; k < bundle.steps; ++k) {
    const double inc = std::abs(out.values[k + 1] - out.values[k]);
    out.max_increment = std::max(out.max_increment, inc);
    double moved = 0.0;
    for (std::size_t p = 0; p < bundle.particles; ++p) moved += distance(bundle.position(k + 1, p), bundle.position(k, p));
    if (inc > moved / n + 1e-12 * (1.0 + moved)) out.lipschitz_ok = false;
  }
  return out;
}

BnRefinementReport bn_refinement(const Configuration& gamma, double horizon, double dt_coarse, double dt_fine, int n,
                                 std::size_t replicas, std::uint64_t seed, unsigned threads) {
  if (!(dt_fine < dt_coarse)) throw InputError("bn_refinement: dt_fine must be smaller than dt_coarse");
  if (replicas == 0) throw InputError("bn_refinement: replicas must be positive");
  std::vector<double> coarse(replicas), fine(replicas);
  std::vector<char> ok(replicas, 1);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    const BnPathReport c = bn_continuity_report(simulate_paths(gamma, horizon, dt_coarse, seed, rep), n);
    const BnPathReport f = bn_continuity_report(simulate_paths(gamma, horizon, dt_fine, seed, rep), n);
    coarse[r] = c.max_increment;
    fine[r] = f.max_increment;
    ok[r] = c.lipschitz_ok && f.lipschitz_ok;
  });
  BnRefinementReport out;
  out.n = n;
  out.dt_coarse = dt_coarse;
  out.dt_fine = dt_fine;
  out.replicas = replicas;
  out.median_coarse = median(coarse);
  out.median_fine = median(fine);
  out.lipschitz_ok = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  out.pass = out.lipschitz_ok && out.median_fine < out.median_coarse;
  return out;
}

OscillationReport oscillation_check(std::span<const double> start, double a, double b, double r,
                                    std::size_t replicas, std::uint64_t seed, std::size_t steps, unsigned threads) {
  if (start.empty()) throw InputError("oscillation_check: empty start point");
  require_finite_point(start, static_cast<int>(start.size()), "oscillation_check");
  if (!(a >= 0.0) || !(b > a)) throw InputError("oscillation_check: need 0 <= a < b");
  if (!(r > 0.0)) throw InputError("oscillation_check: r must be positive");
  if (steps < 64) throw InputError("oscillation_check: need at least 64 sub-steps");
  if (replicas < 2) throw InputError("oscillation_check: need at least 2 replicas");
  const std::size_t d = start.size();
  const double delta = b - a;
  const double step_sd = std::sqrt(2.0 * delta / static_cast<double>(steps));
  const double r2 = r * r;
  std::vector<char> hit(replicas, 0);
  parallel_for(replicas, threads, [&](std::size_t rep) {
    RandomStream rng(seed, static_cast<std::uint32_t>(rep), 0, StreamTag::kPath);
    std::vector<double> path((steps + 1) * d);
    const double sd_a = std::sqrt(2.0 * a);
    for (std::size_t c = 0; c < d; ++c) path[c] = start[c] + (a > 0.0 ? sd_a * rng.normal() : 0.0);
    double max_from_first2 = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
      double dist2 = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        path[k * d + c] = path[(k - 1) * d + c] + step_sd * rng.normal();
        const double dx = path[k * d + c] - path[c];
        dist2 += dx * dx;
      }
      max_from_first2 = std::max(max_from_first2, dist2);
    }
    // diameter lies in [M, 2M] with M the largest distance from the first point
    if (max_from_first2 > r2) {
      hit[rep] = 1;
      return;
    }
    if (4.0 * max_from_first2 <= r2) return;
    for (std::size_t i = 1; i <= steps && !hit[rep]; ++i) {
      for (std::size_t j = i + 1; j <= steps; ++j) {
        if (squared_distance(std::span<const double>(path.data() + i * d, d),
                             std::span<const double>(path.data() + j * d, d)) > r2) {
          hit[rep] = 1;
          break;
        }
      }
    }
  });
  const auto hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
  const Proportion pr = proportion(hits, replicas);
  OscillationReport out;
  out.dim = static_cast<int>(d);
  out.delta = delta;
  out.r = r;
  out.steps = steps;
  out.replicas = replicas;
  out.empirical = pr.p;
  out.std_error = pr.se;
  out.bound = 2.0 * kernel::tau(out.dim, delta, 0.25 * r);
  out.pass = out.empirical <= out.bound + 4.0 * out.std_error;
  return out;
}

CollisionReport collision_report(const Configuration& gamma, double horizon, double dt,
                                 std::span<const double> epsilon_list, std::size_t replicas, std::uint64_t seed,
                                 unsigned threads) {
  if (gamma.particle_count() < 2) throw InputError("collision_report: need at least 2 particles");
  if (epsilon_list.empty()) throw InputError("collision_report: empty epsilon list");
  for (std::size_t k = 0; k < epsilon_list.size(); ++k) {
    if (!(epsilon_list[k] > 0.0)) throw InputError("collision_report: epsilon values must be positive");
    if (k > 0 && !(epsilon_list[k] < epsilon_list[k - 1])) {
      throw InputError("collision_report: epsilon list must be decreasing");
    }
  }
  if (replicas < 2) throw InputError("collision_report: need at least 2 replicas");
  const int dim = gamma.dim();
  std::vector<double> min_dist(replicas);
  std::vector<char> crossed(replicas, 0);
  parallel_for(replicas, threads, [&](std::size_t rep) {
    const PathBundle b = simulate_paths(gamma, horizon, dt, seed, static_cast<std::uint32_t>(rep));
    double best2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= b.steps; ++k) {
      for (std::size_t i = 0; i < b.particles; ++i) {
        for (std::size_t j = i + 1; j < b.particles; ++j) {
          best2 = std::min(best2, squared_distance(b.position(k, i), b.position(k, j)));
        }
      }
    }
    min_dist[rep] = std::sqrt(best2);
    if (dim != 1) return;
    std::uint32_t pair = 0;
    for (std::size_t i = 0; i < b.particles && !crossed[rep]; ++i) {
      for (std::size_t j = i + 1; j < b.particles && !crossed[rep]; ++j, ++pair) {
        RandomStream rng(seed, static_cast<std::uint32_t>(rep), pair, StreamTag::kBridge);
        for (std::size_t k = 0; k < b.steps; ++k) {
          const double u = b.position(k, i)[0] - b.position(k, j)[0];
          const double v = b.position(k + 1, i)[0] - b.position(k + 1, j)[0];
          if (u == 0.0 || v == 0.0 || (u < 0.0) != (v < 0.0)) {
            crossed[rep] = 1;
            break;
          }
          // difference process has variance rate 4; bridge hits 0 w.p. exp(-|u||v|/(2h))
          const double h = b.times[k + 1] - b.times[k];
          if (rng.uniform() < std::exp(-std::abs(u) * std::abs(v) / (2.0 * h))) {
            crossed[rep] = 1;
            break;
          }
        }
      }
    }
  });
  CollisionReport out;
  out.dim = dim;
  out.horizon = horizon;
  out.dt = dt;
  out.replicas = replicas;
  for (double eps : epsilon_list) {
    const auto hits = static_cast<std::size_t>(
        std::count_if(min_dist.begin(), min_dist.end(), [eps](double m) { return m < eps; }));
    const Proportion pr = proportion(hits, replicas);
    out.rows.push_back({eps, pr.p, pr.se});
  }
  out.strictly_decreasing = true;
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    if (!(out.rows[k].fraction < out.rows[k - 1].fraction)) out.strictly_decreasing = false;
  }
  if (dim == 1) {
    const Proportion pr = proportion(static_cast<std::size_t>(std::count(crossed.begin(), crossed.end(), 1)), replicas);
    out.crossing_fraction = pr.p;
    out.crossing_std_error = pr.se;
  }
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InputError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  KsResult out{d, 1.0};
  if (lambda < 0.2) return out;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k, sign = -sign) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
  }
  out.p_value = std::clamp(2.0 * sum, 0.0, 1.0);
  return out;
}

MarginalReport marginal_check(const Configuration& gamma, double horizon, double dt, std::size_t replicas,
                              std::uint64_t seed, unsigned threads) {
  if (gamma.particle_count() == 0) throw InputError("marginal_check: empty configuration");
  if (replicas < 2) throw InputError("marginal_check: need at least 2 replicas");
  const PointSet start = gamma.particles();
  const std::size_t np = start.size();
  std::vector<double> path_norms(replicas * np), diffuse_norms(replicas * np), first(replicas), second(replicas);
  parallel_for(replicas, threads, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    const PathBundle b = simulate_paths(gamma, horizon, dt, seed, rep);
    const PointSet moved = points::diffuse(gamma, horizon, seed, rep).particles();
    for (std::size_t p = 0; p < np; ++p) {
      path_norms[r * np + p] = distance(b.position(b.steps, p), start[p]);
      diffuse_norms[r * np + p] = distance(moved[p], start[p]);
    }
    first[r] = b.position(b.steps, 0)[0] - start[0][0];
    second[r] = np > 1 ? b.position(b.steps, 1)[0] - start[1][0] : 0.0;
  });
  MarginalReport out;
  out.horizon = horizon;
  out.replicas = replicas;
  out.ks = ks_two_sample(path_norms, diffuse_norms);
  const double n = static_cast<double>(replicas);
  double s2 = 0.0, s4 = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t r = 0; r < replicas; ++r) {
    s2 += first[r] * first[r];
    s4 += first[r] * first[r] * first[r] * first[r];
    sxy += first[r] * second[r];
    syy += second[r] * second[r];
  }
  // displacements have known mean 0
  out.variance = s2 / n;
  out.variance_se = std::sqrt(std::max(0.0, s4 / n - out.variance * out.variance) / n);
  if (np > 1 && s2 > 0.0 && syy > 0.0) {
    out.cross_correlation = sxy / std::sqrt(s2 * syy);
    out.cross_correlation_se = 1.0 / std::sqrt(n);
  }
  return out;
}

}  // namespace confheat::process
