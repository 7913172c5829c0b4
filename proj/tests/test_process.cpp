#include <cmath>
#include <sstream>
#include <vector>

#include "confheat/error.hpp"
#include "confheat/process.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace confheat;
using namespace confheat::process;
using points::Configuration;

TEST_CASE("empty configuration yields an empty bundle") {
  const PathBundle b = simulate_paths(Configuration(2, 1.0), 1.0, 0.1, 1, 0);
  CHECK(b.particles == 0);
  CHECK(b.positions.empty());
  CHECK(b.times.size() == b.steps + 1);
}

TEST_CASE("time grid and frozen paths") {
  Configuration g(2, 2.0);
  g.add({0.5, 0.0}, 2);
  const PathBundle b = simulate_paths(g, 1.0, 0.3, 4, 0, true);
  CHECK(b.steps == 4);
  CHECK(b.times.back() == 1.0);
  CHECK(b.particles == 2);
  for (std::size_t s = 0; s <= b.steps; ++s) CHECK(b.position(s, 1)[0] == 0.5);
  std::ostringstream out;
  write_paths_csv(b, out);
  CHECK(out.str().rfind("replica,particle,step,time,x0,x1", 0) == 0);
  CHECK_THROWS_AS(simulate_paths(g, 1.0, 1e-9, 4, 0), CapacityError);
}

TEST_CASE("paths are reproducible") {
  Configuration g(1, 2.0);
  g.add({0.0});
  g.add({1.0});
  CHECK(simulate_paths(g, 1.0, 0.01, 5, 3).positions == simulate_paths(g, 1.0, 0.01, 5, 3).positions);
  CHECK(simulate_paths(g, 1.0, 0.01, 5, 3).positions != simulate_paths(g, 1.0, 0.01, 5, 4).positions);
}

TEST_CASE("endpoint variance is 2T") {
  Configuration g(1, 1.0);
  g.add({0.0});
  std::vector<double> sq(20000);
  for (std::size_t r = 0; r < sq.size(); ++r) {
    const PathBundle b = simulate_paths(g, 0.7, 0.05, 8, static_cast<std::uint32_t>(r));
    const double x = b.position(b.steps, 0)[0];
    sq[r] = x * x;
  }
  const auto m = oracle::mean_se(sq);
  CHECK(oracle::within(m.mean, m.se, 1.4));
}

TEST_CASE("B_n along paths is Lipschitz in the increments") {
  Configuration g(2, 3.0);
  g.add({0.0, 0.0});
  g.add({1.0, -1.0}, 2);
  const PathBundle b = simulate_paths(g, 1.0, 0.01, 6, 0);
  const BnPathReport r = bn_continuity_report(b, 2);
  CHECK(r.values.size() == b.steps + 1);
  CHECK(r.lipschitz_ok);
  CHECK(r.max_increment > 0.0);
  const BnRefinementReport ref = bn_refinement(g, 1.0, 1e-2, 1e-3, 1, 40, 9, 2);
  CHECK(ref.lipschitz_ok);
  CHECK(ref.median_fine < ref.median_coarse);
}

TEST_CASE("ks two sample") {
  RandomStream rng(31, 0, 0, StreamTag::kAuxiliary);
  std::vector<double> a(4000), b(4000), c(4000);
  for (double& v : a) v = rng.normal();
  for (double& v : b) v = rng.normal();
  for (double& v : c) v = rng.normal() + 0.3;
  CHECK(ks_two_sample(a, b).p_value > 0.001);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample({0.0, 1.0}, {2.0, 3.0}).statistic == doctest::Approx(1.0));
}

TEST_CASE("marginals match the diffusion sampler") {
  Configuration g(2, 2.0);
  g.add({0.0, 0.0});
  g.add({1.0, 0.5});
  const MarginalReport m = marginal_check(g, 0.5, 0.05, 4000, 12, 2);
  CHECK(m.ks.p_value > 0.001);
  CHECK(oracle::within(m.variance, m.variance_se, 1.0));
  CHECK(std::abs(m.cross_correlation) <= 4.0 * m.cross_correlation_se + 1e-12);
}

TEST_CASE("oscillation probability respects the tail bound") {
  const std::vector<double> x0{0.0, 0.0};
  const OscillationReport r = oscillation_check(x0, 0.0, 0.04, 1.0, 20000, 5, 64, 2);
  CHECK(r.pass);
  CHECK(r.empirical <= r.bound + 4.0 * r.std_error);
}

TEST_CASE("collisions") {
  Configuration far(2, 30.0);
  far.add({-20.0, 0.0});
  far.add({20.0, 0.0});
  const std::vector<double> eps{0.1, 0.01};
  const CollisionReport r = collision_report(far, 0.5, 0.01, eps, 200, 3);
  for (const auto& row : r.rows) CHECK(row.fraction == 0.0);

  Configuration pair(1, 2.0);
  pair.add({0.0});
  pair.add({0.5});
  const CollisionReport c = collision_report(pair, 1.0, 1e-3, eps, 4000, 8, 2);
  const double oracle_p = 2.0 * oracle::normal_tail(0.5 / std::sqrt(4.0));
  CHECK(std::abs(c.crossing_fraction - oracle_p) <= 4.0 * c.crossing_std_error + 0.005);
}
