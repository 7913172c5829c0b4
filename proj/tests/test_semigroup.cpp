#include <cmath>
#include <numbers>
#include <vector>

#include "confheat/error.hpp"
#include "confheat/metrics.hpp"
#include "confheat/semigroup.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace confheat;
using namespace confheat::semigroup;
using points::Configuration;

namespace {

Configuration origin(int dim) {
  Configuration g(dim, 1.0);
  g.add(std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  return g;
}

}  // namespace

TEST_CASE("exact exponential route") {
  const ExpFunctional ef(GaussianBump{0.5, 1.0, {}});
  CHECK(apply_exact_exponential(ef, origin(1), 0.5) == doctest::Approx(0.64645).epsilon(1e-5));
  CHECK(apply_exact_exponential(ExpFunctional(GaussianBump{0.0, 1.0, {}}), origin(2), 0.5) == 1.0);
  CHECK(apply_exact_exponential(ef, Configuration(1, 1.0), 0.5) == 1.0);
  CHECK(ef.route() == "closed-form");
}

TEST_CASE("composition of exact routes matches a single step") {
  Configuration g(2, 3.0);
  g.add({0.3, -0.2});
  g.add({1.5, 0.5}, 2);
  for (const ExpFunctional& ef : {ExpFunctional(GaussianBump{0.4, 0.8, {0.2, 0.1}}),
                                  ExpFunctional(SmoothedBox{0.6, 1.0, 0.2})}) {
    const double one = apply_exact_exponential(ef, g, 0.35);
    const double two = apply_exact_exponential_composed(ef, g, 0.2, 0.15);
    CHECK(std::abs(one - two) <= 1e-8);
  }
}

TEST_CASE("smoothed box convolution against quadrature in one dimension") {
  const ExpFunctional ef(SmoothedBox{0.5, 1.0, 0.2});
  const double t = 0.3;
  const double x = 0.4;
  auto integrand = [&](double y) {
    return oracle::heat_density_1d(t, x - y) * ef.phi(std::vector<double>{y});
  };
  const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, 1e-13);
  CHECK(ef.heat_phi(std::vector<double>{x}, t) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("monte carlo application") {
  Configuration g(2, 2.0);
  g.add({0.0, 0.0});
  g.add({1.0, 0.5});
  McOptions opt;
  opt.replicas = 2000;
  opt.seed = 3;
  const auto c = apply_mc([](const Configuration&) { return 1.0; }, g, 0.4, opt);
  CHECK(c.mean == 1.0);
  CHECK(c.std_error == 0.0);

  const auto count = [](const Configuration& h) {
    double n = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
      if (norm(h.position(i)) < 1.0) n += h.multiplicity(i);
    return n;
  };
  const double t = 0.25;
  opt.replicas = 100000;
  const auto est = apply_mc(count, origin(1), t, opt);
  const double exact = 1.0 - 2.0 * oracle::normal_tail(1.0 / std::sqrt(2.0 * t));
  CHECK(oracle::within(est.mean, est.std_error, exact));

  const ExpFunctional ef(GaussianBump{0.5, 1.0, {}});
  const auto mc = apply_mc([&](const Configuration& h) { return ef(h); }, g, 0.5, opt);
  CHECK(oracle::within(mc.mean, mc.std_error, apply_exact_exponential(ef, g, 0.5)));

  opt.threads = 4;
  const auto mc4 = apply_mc([&](const Configuration& h) { return ef(h); }, g, 0.5, opt);
  CHECK(mc4.mean == mc.mean);
  CHECK(mc4.std_error == mc.std_error);

  CHECK_THROWS_AS(apply_mc([](const Configuration&) { return std::nan(""); }, g, 0.5, opt), EvaluationError);
}

TEST_CASE("lift kernel") {
  using namespace harmonic;
  const double s2 = 0.5, t = 0.3;
  const KernelFunction g = KernelFunction::product(GaussianFactor{{0.0}, s2, 1.0}, {1.0, 1.0, 1.0});
  const KernelFunction lifted = lift_kernel(g, t, 1);
  PointSet eta(1);
  eta.push_back(std::vector<double>{0.7});
  const double v = s2 + 2.0 * t;
  CHECK(lifted(eta) == doctest::Approx(std::sqrt(s2 / v) * std::exp(-0.49 / (2.0 * v))).epsilon(1e-12));
  const KernelFunction small = lift_kernel(g, 1e-10, 1);
  CHECK(small(eta) == doctest::Approx(g(eta)).epsilon(1e-8));
  const KernelFunction custom(1.0, {[](const PointSet&) { return 1.0; }});
  CHECK_THROWS_AS(lift_kernel(custom, t, 1), CapabilityError);
}

TEST_CASE("cylinder function generator example") {
  OuterFunction g{OuterFunction::Kind::kLinear, {1.0}};
  const CylinderFunction f(g, {TestFunction{1.0, 1.0 / std::numbers::sqrt2, {}}}, 1);
  CHECK(f.dirichlet_operator_half_laplacian(origin(1)) == doctest::Approx(1.0));
  CHECK(f.dirichlet_operator(origin(1)) == doctest::Approx(2.0));
  CHECK(f(origin(1)) == doctest::Approx(1.0));
}

TEST_CASE("test function derivatives") {
  const TestFunction phi{0.7, 0.9, {0.2, -0.1}};
  const std::vector<double> x{0.5, 0.3};
  std::vector<double> grad(2);
  phi.gradient(x, grad);
  const double h = 1e-5;
  double lap = 0.0;
  for (int k = 0; k < 2; ++k) {
    auto xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    CHECK(grad[k] == doctest::Approx((phi.value(xp) - phi.value(xm)) / (2 * h)).epsilon(1e-6));
    lap += (phi.value(xp) - 2 * phi.value(x) + phi.value(xm)) / (h * h);
  }
  CHECK(phi.laplacian(x) == doctest::Approx(lap).epsilon(1e-4));
}

TEST_CASE("generator residual on a single bump") {
  OuterFunction g{OuterFunction::Kind::kExponential, {0.5}};
  const CylinderFunction f(g, {TestFunction{1.0, 1.2, {}}}, 2);
  McOptions opt;
  opt.replicas = 400000;
  opt.seed = 99;
  opt.threads = 2;
  const std::vector<double> ts{0.1, 0.05, 0.025};
  const GeneratorReport r = generator_residual(f, origin(2), ts, opt);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.ratios.size() == 2);
  for (const auto& row : r.rows) CHECK(row.residual == doctest::Approx(row.quotient - r.generator_value));
  CHECK(r.verdict != Verdict::kFail);
}

TEST_CASE("feller probe") {
  const Configuration g = origin(2);
  const std::vector<Configuration> same(4, g);
  const auto value = [](const Configuration& h) { return static_cast<double>(h.particle_count()); };
  const auto metric = [](const Configuration& a, const Configuration& b) { return metrics::rho(a, b); };
  const FellerReport r = feller_probe(value, g, same, metric);
  for (const auto& p : r.points) {
    CHECK(p.metric_gap == 0.0);
    CHECK(p.value_gap == 0.0);
  }
  CHECK(r.pass);

  const auto shifted = feller_schedule(g, FellerSchedule::kRhoShift, 0, 6);
  REQUIRE(shifted.size() == 6);
  CHECK(metrics::rho(g, shifted[2]) == doctest::Approx(0.125));
  const auto far = feller_schedule(g, FellerSchedule::kAddFar, 0, 4);
  for (int j = 0; j < 4; ++j) CHECK(metrics::d1(g, far[j]).value == doctest::Approx(std::ldexp(1.0, -(j + 1))).epsilon(1e-6));

  const ExpFunctional ef(GaussianBump{0.5, 1.0, {}});
  const auto exact = [&](const Configuration& h) { return apply_exact_exponential(ef, h, 0.5); };
  const FellerReport fr = feller_probe(exact, g, feller_schedule(g, FellerSchedule::kRhoShift, 0, 10), metric);
  CHECK(fr.strictly_decreasing);
  CHECK(fr.pass);

  std::vector<Configuration> bad{shifted[3], shifted[1]};
  CHECK_THROWS_AS(feller_probe(exact, g, bad, metric), InputError);
}
