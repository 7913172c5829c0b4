// Acceptance battery: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

#include "confheat/error.hpp"
#include "confheat/experiment.hpp"
#include "confheat/harmonic.hpp"
#include "confheat/kernel.hpp"
#include "confheat/metrics.hpp"
#include "confheat/parallel.hpp"
#include "confheat/points.hpp"
#include "confheat/process.hpp"
#include "confheat/semigroup.hpp"
#include "oracles.hpp"

using namespace confheat;
using points::Configuration;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Five sites in the plane, the first at the origin.
Configuration reference_configuration() {
  Configuration g(2, 4.0);
  g.add({0.0, 0.0});
  g.add({1.0, 0.5});
  g.add({-1.3, -0.4});
  g.add({2.1, 0.7});
  g.add({-2.6, 0.2});
  return g;
}

// ---------------------------------------------------------------------------

Outcome heat_kernel_identities() {
  Outcome o;
  RandomStream rng(101, 0, 0, StreamTag::kAuxiliary);
  double worst_ck = 0.0, worst_oracle = 0.0, worst_sym = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int dim = 1 + k % 3;
    const double t = 0.05 + 2.0 * rng.uniform();
    const double s = 0.05 + 2.0 * rng.uniform();
    const PointSet xy = oracle::random_points(rng, dim, 2, 1.5);
    const kernel::HeatKernelParams pt{dim, t}, ps{dim, s}, pts{dim, t + s};
    const double direct = kernel::density(pts, xy[0], xy[1]);
    worst_ck = std::max(worst_ck, kernel::chapman_kolmogorov_residual(pt, ps, xy[0], xy[1]) / direct);
    double quad = 1.0;
    for (int c = 0; c < dim; ++c) quad *= oracle::chapman_kolmogorov_1d(t, s, xy[0][c], xy[1][c]);
    worst_oracle = std::max(worst_oracle, std::abs(quad - direct) / direct);
    const double a = kernel::density(pt, xy[0], xy[1]), b = kernel::density(pt, xy[1], xy[0]);
    worst_sym = std::max(worst_sym, std::abs(a - b) / a);
  }
  bool normalized = true;
  for (int dim = 1; dim <= 6; ++dim)
    for (double t : {1e-3, 0.5, 10.0}) normalized = normalized && kernel::tail_mass({dim, t}, 0.0) == 1.0;
  const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) { return kernel::density_at_distance({1, 0.7}, std::abs(x)); },
      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, 1e-14);
  o.require(worst_ck <= 1e-10, fmt("closed-form CK residual %.3g", worst_ck));
  o.require(worst_oracle <= 1e-10, fmt("quadrature CK residual %.3g", worst_oracle));
  o.require(worst_sym == 0.0, fmt("asymmetry %.3g", worst_sym));
  o.require(normalized, "tail_mass(., 0) != 1");
  o.require(std::abs(mass - 1.0) <= 1e-12, fmt("1-d mass %.17g", mass));
  if (o.pass) o.detail = fmt("CK residual %.2g (closed form), %.2g (quadrature), 100 cases", worst_ck, worst_oracle);
  return o;
}

Outcome tail_function() {
  Outcome o;
  struct Combo {
    int dim;
    double t, r;
  };
  const std::vector<Combo> combos{{1, 0.1, 0.5}, {1, 0.5, 1.0}, {1, 1.0, 3.0}, {2, 0.1, 0.5}, {2, 0.25, 1.0},
                                  {2, 1.0, 2.5}, {3, 0.1, 0.7}, {3, 0.5, 1.5}, {3, 2.0, 4.0}, {5, 0.3, 2.0}};
  const std::size_t n = 100'000;
  int inside = 0;
  double worst_z = 0.0;
  for (std::size_t k = 0; k < combos.size(); ++k) {
    const auto [dim, t, r] = combos[k];
    std::vector<double> hit(n);
    parallel_for(n, threads(), [&](std::size_t i) {
      RandomStream rng(202, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(k), StreamTag::kAuxiliary);
      std::vector<double> zero(static_cast<std::size_t>(dim), 0.0);
      hit[i] = norm(kernel::sample_transition({dim, t}, zero, rng)) > r ? 1.0 : 0.0;
    });
    const auto m = oracle::mean_se(hit);
    const double exact = kernel::tail_mass({dim, t}, r);
    o.require(std::abs(exact - oracle::tail_mass(dim, t, r)) <= 1e-13, "tail_mass disagrees with incomplete gamma");
    if (oracle::within(m.mean, m.se, exact)) ++inside;
    worst_z = std::max(worst_z, std::abs(m.mean - exact) / std::max(m.se, 1e-300));
  }
  o.require(inside == static_cast<int>(combos.size()), fmt("%.0f of 10 MC tails within 4 SE", inside));

  std::vector<double> coarse;
  for (double r = 0.0; r <= 20.0; r += 0.5) coarse.push_back(r);
  double worst_ratio = 0.0;
  for (int dim = 1; dim <= 3; ++dim) {
    const kernel::GridPoint g{0.25, 0.0};
    const auto cert = kernel::make_certificate({dim, 0.25}, 0.5, std::nullopt, std::span(&g, 1), 0.25, coarse);
    for (int i = 0; i <= 2000; ++i) {
      const double r = 0.01 * i;
      worst_ratio = std::max(worst_ratio, oracle::tail_mass(dim, 0.25, r) * std::exp(r) / *cert.tail_constant);
    }
  }
  o.require(worst_ratio <= 1.0, fmt("tau / (C e^-r) reaches %.4g", worst_ratio));
  if (o.pass) o.detail = fmt("10/10 tails within 4 SE (max |z| %.2f); certificate ratio max %.3f", worst_z, worst_ratio);
  return o;
}

Outcome rho_metric() {
  Outcome o;
  RandomStream rng(303, 0, 0, StreamTag::kAuxiliary);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int dim = 1 + k % 3;
    const std::size_t n = 1 + oracle::uniform_index(rng, 7);
    const PointSet p = oracle::random_points(rng, dim, n, 3.0);
    const PointSet q = oracle::random_points(rng, dim, n, 3.0);
    const double got = metrics::rho(points::from_particles(p, 0.0), points::from_particles(q, 0.0));
    worst = std::max(worst, std::abs(got - oracle::rho(p, q)));
  }
  double worst_flat = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int dim = 1 + k % 3;
    const int i = 1 + k % 8;
    const PointSet p = oracle::random_points(rng, dim, 2, 7.0);
    Configuration a(dim, 20.0), b(dim, 20.0), m(dim, 20.0);
    a.add(p[0]);
    b.add(p[1]);
    const auto mult = static_cast<std::uint32_t>(1 + k % 3);
    m.add(p[0], mult);
    worst_flat = std::max(worst_flat, std::abs(metrics::flat_metric(a, b, i) - oracle::flat_two_point(p[0], p[1], i)));
    worst_flat = std::max(worst_flat, std::abs(metrics::flat_metric(m, Configuration(dim, 20.0), i) -
                                               oracle::flat_one_point(p[0], i, mult)));
  }
  o.require(worst <= 1e-9, fmt("Hungarian vs brute force %.3g", worst));
  o.require(worst_flat <= 1e-7, fmt("flat metric vs oracle %.3g", worst_flat));
  if (o.pass) o.detail = fmt("Hungarian max error %.2g on 200 instances; flat metric max error %.2g", worst, worst_flat);
  return o;
}

// Symmetric non-product kernel with random coefficients.
harmonic::KernelFunction random_kernel(RandomStream& rng, int order) {
  std::vector<harmonic::KernelFunction::Level> levels;
  const double empty = 2.0 * rng.uniform() - 1.0;
  for (int n = 1; n <= order; ++n) {
    const double a = 2.0 * rng.uniform() - 1.0;
    const double b = rng.uniform();
    levels.push_back([a, b](const PointSet& eta) {
      double s = 0.0, pairs = 0.0;
      for (std::size_t i = 0; i < eta.size(); ++i) {
        s += norm(eta[i]);
        for (std::size_t j = 0; j < i; ++j) pairs += std::cos(distance(eta[i], eta[j]));
      }
      return a * std::exp(-b * s) * (1.0 + 0.5 * pairs);
    });
  }
  return harmonic::KernelFunction(empty, std::move(levels));
}

Outcome k_transform_algebra() {
  Outcome o;
  RandomStream rng(404, 0, 0, StreamTag::kAuxiliary);
  double worst_inv = 0.0, worst_star = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int dim = 1 + k % 2;
    const auto g1 = random_kernel(rng, static_cast<int>(oracle::uniform_index(rng, 7)));
    const auto g2 = random_kernel(rng, static_cast<int>(oracle::uniform_index(rng, 7)));
    const PointSet eta = oracle::random_points(rng, dim, oracle::uniform_index(rng, 7), 1.5);
    const double back =
        harmonic::inverse_k_transform([&](const PointSet& th) { return harmonic::k_transform(g1, th); }, eta);
    worst_inv = std::max(worst_inv, std::abs(back - g1(eta)));
    const double lhs = harmonic::k_transform(harmonic::star_product(g1, g2), eta);
    const double rhs = harmonic::k_transform(g1, eta) * harmonic::k_transform(g2, eta);
    worst_star = std::max(worst_star, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  o.require(worst_inv <= 1e-9, fmt("inverse identity error %.3g", worst_inv));
  o.require(worst_star <= 1e-9, fmt("star product error %.3g", worst_star));
  if (o.pass) o.detail = fmt("inverse error %.2g, star relative error %.2g over 100 instances", worst_inv, worst_star);
  return o;
}

Outcome correlation_functions() {
  Outcome o;
  RandomStream rng(505, 0, 0, StreamTag::kAuxiliary);
  double worst = 0.0;
  int violations = 0;
  for (int k = 0; k < 100; ++k) {
    const int dim = 1 + k % 3;
    const Configuration g = oracle::random_configuration(rng, dim, 1 + oracle::uniform_index(rng, 10), 1.5);
    for (std::size_t n = 1; n <= 5; ++n) {
      const PointSet theta = oracle::random_points(rng, dim, n, 1.5);
      const double e = harmonic::correlation_function_enumeration(g, theta, 0.3);
      const double ie = harmonic::correlation_function_inclusion_exclusion(g, theta, 0.3);
      if (e != 0.0 || ie != 0.0) worst = std::max(worst, std::abs(e - ie) / std::abs(e));
      if (e > harmonic::correlation_bound(g, theta, 0.3) * (1.0 + 1e-12)) ++violations;
    }
  }
  double worst_perm = 0.0;
  for (std::size_t n = 0; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const PointSet x = oracle::random_points(rng, 2, n, 1.0), y = oracle::random_points(rng, 2, n, 1.0);
      std::vector<double> m(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = kernel::density({2, 0.3}, x[i], y[j]);
      const double ref = n == 0 ? 1.0 : oracle::permanent(m, n);
      worst_perm = std::max(worst_perm, std::abs(harmonic::permanent_kernel(x, y, 0.3) - ref) / ref);
    }
  }
  o.require(worst <= 1e-9, fmt("enumeration vs inclusion-exclusion %.3g", worst));
  o.require(violations == 0, fmt("%.0f bound violations", violations));
  o.require(worst_perm <= 1e-10, fmt("Ryser vs naive %.3g", worst_perm));
  if (o.pass) o.detail = fmt("correlation relative error %.2g, 0 bound violations, permanent error %.2g", worst, worst_perm);
  return o;
}

Outcome exponential_functionals() {
  Outcome o;
  using namespace semigroup;
  struct Case {
    std::string name;
    ExpFunctional ef;
    Configuration gamma;
    double t;
  };
  std::vector<Case> cases;
  {
    Configuration g(1, 1.0);
    g.add({0.0});
    cases.push_back({"gaussian-d1", ExpFunctional(GaussianBump{0.5, 1.0, {}}), g, 0.5});
  }
  cases.push_back({"gaussian-d2", ExpFunctional(GaussianBump{0.7, 0.8, {0.5, 0.0}}), reference_configuration(), 0.2});
  cases.push_back({"box-d2", ExpFunctional(SmoothedBox{0.5, 1.0, 0.2}), reference_configuration(), 0.5});
  {
    Configuration g(3, 2.0);
    g.add({0.0, 0.0, 0.0}, 2);
    g.add({1.0, -0.5, 0.3});
    cases.push_back({"gaussian-d3-multiple", ExpFunctional(GaussianBump{0.4, 1.2, {}}), g, 1.0});
  }
  {
    RandomStream rng(606, 0, 0, StreamTag::kAuxiliary);
    cases.push_back({"gaussian-50-points", ExpFunctional(GaussianBump{0.3, 1.5, {}}),
                     oracle::random_configuration(rng, 2, 50, 4.0), 0.3});
  }
  std::string detail;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& c = cases[k];
    const auto est = apply_mc([&](const Configuration& h) { return c.ef(h); }, c.gamma, c.t,
                              {100'000, 600 + k, threads(), {}});
    const double exact = apply_exact_exponential(c.ef, c.gamma, c.t);
    const double z = std::abs(est.mean - exact) / est.std_error;
    o.require(oracle::within(est.mean, est.std_error, exact), c.name + fmt(" off by %.2f SE", z));
    detail += (detail.empty() ? "" : ", ") + c.name + fmt(" z=%.2f", z);
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome poisson_invariance() {
  Outcome o;
  using namespace semigroup;
  const double inner = 1.0, a = 0.5, s = 0.5;
  const auto inside = [inner](std::span<const double> x) { return norm(x) < inner; };
  std::vector<LocalFunctional> fs;
  fs.push_back({"constant", [](const Configuration&) { return 1.0; }, inner, 0.0});
  fs.push_back({"count",
                [=](const Configuration& g) {
                  double n = 0.0;
                  for (std::size_t i = 0; i < g.size(); ++i)
                    if (inside(g.position(i))) n += g.multiplicity(i);
                  return n;
                },
                inner, 1.0});
  fs.push_back({"exponential",
                [=](const Configuration& g) {
                  double v = 1.0;
                  for (std::size_t i = 0; i < g.size(); ++i)
                    if (inside(g.position(i)))
                      v *= std::pow(1.0 - a * std::exp(-squared_norm(g.position(i)) / (2 * s * s)), g.multiplicity(i));
                  return v;
                },
                inner, a});
  std::string detail;
  std::uint64_t seed = 700;
  for (const auto& f : fs) {
    for (double t : {0.1, 0.5}) {
      const InvarianceReport r = invariance_test(f, {7.0, 1.0}, 2, t, 1e-3, {100'000, seed++, threads(), {}});
      o.require(r.pass, f.name + fmt(" t=%.1f diff %.3g se %.3g", t, r.difference, r.std_error));
      detail += (detail.empty() ? "" : ", ") + f.name + fmt("@%.1f z=%.2f", t, std::abs(r.difference) / std::max(r.std_error, 1e-300));
    }
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome semigroup_property() {
  Outcome o;
  using namespace semigroup;
  const Configuration g = reference_configuration();
  const std::vector<ExpFunctional> efs{ExpFunctional(GaussianBump{0.5, 1.0, {}}),
                                       ExpFunctional(GaussianBump{0.8, 0.6, {1.0, 0.5}}),
                                       ExpFunctional(SmoothedBox{0.5, 1.0, 0.2})};
  double worst = 0.0;
  for (const auto& ef : efs)
    for (auto [t, s] : {std::pair{0.3, 0.2}, std::pair{0.05, 1.0}})
      worst = std::max(worst, std::abs(apply_exact_exponential_composed(ef, g, t, s) -
                                       apply_exact_exponential(ef, g, t + s)));
  o.require(worst <= 1e-10, fmt("two-step vs one-step exact residual %.3g", worst));

  const ExpFunctional& ef = efs[0];
  const double t = 0.3, s = 0.2;
  const std::size_t n = 100'000;
  std::vector<double> one(n), two(n);
  const std::uint64_t seed = 808, seed2 = derive_seed(seed, 1);
  parallel_for(n, threads(), [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    two[r] = ef(points::diffuse(points::diffuse(g, t, seed, rep), s, seed2, rep));
    one[r] = ef(points::diffuse(g, t + s, derive_seed(seed, 2), rep));
  });
  const auto m1 = oracle::mean_se(one), m2 = oracle::mean_se(two);
  const double se = std::hypot(m1.se, m2.se);
  o.require(std::abs(m1.mean - m2.mean) <= 4.0 * se, fmt("MC two-step off by %.2f SE", std::abs(m1.mean - m2.mean) / se));
  if (o.pass)
    o.detail = fmt("exact residual %.2g; MC two-step z=%.2f", worst, std::abs(m1.mean - m2.mean) / se);
  return o;
}

experiment::ExperimentConfig config_of(const experiment::Json& doc) {
  const auto v = experiment::validate_document(doc);
  if (!v.ok()) throw InputError("acceptance: invalid built-in config: " + v.errors.front());
  return *v.config;
}

Outcome generator_formula() {
  Outcome o;
  std::string detail;
  for (const char* outer : {"linear", "exponential", "sine"}) {
    experiment::Json doc{{"experiment", "generator"}, {"seed", 909}, {"replicas", 1'000'000},
                         {"params", {{"outer", outer}}}};
    report::Report rep = experiment::run(config_of(doc), threads());
    std::string note;
    if (rep.verdict() == Verdict::kInconclusive) {
      doc["replicas"] = 4'000'000;
      rep = experiment::run(config_of(doc), threads());
      note = " (4x)";
    }
    std::string ratios;
    for (const auto& row : rep.rows())
      if (row.quantity == "residual_ratio") ratios += (ratios.empty() ? "" : "/") + fmt("%.2f", row.estimate);
    o.require(rep.verdict() == Verdict::kPass, std::string(outer) + " " + to_string(rep.verdict()) + note + " ratios " + ratios);
    detail += (detail.empty() ? "" : ", ") + std::string(outer) + note + " ratios " + ratios;
  }
  o.detail = o.pass ? detail : o.detail;
  return o;
}

Outcome kernel_lift() {
  Outcome o;
  using namespace harmonic;
  const int dim = 2;
  const double t = 0.3;
  Configuration gamma(dim, 2.0);
  gamma.add({0.0, 0.0});
  gamma.add({0.6, -0.3});
  gamma.add({-0.8, 0.4});
  gamma.add({0.2, 1.1});
  struct Entry {
    std::string name;
    KernelFunction g;
  };
  const std::vector<Entry> battery{
      {"gaussian", KernelFunction::product(GaussianFactor{{0.0, 0.0}, 0.5, 1.0}, {1.0, 1.0, 0.5, 0.25})},
      {"gaussian-offset", KernelFunction::product(GaussianFactor{{0.5, 0.2}, 0.3, 0.8}, {0.0, 1.0, -1.0})},
      {"box", KernelFunction::product(BoxFactor{dim, 0.7, 0.0}, {0.5, 1.0, 1.0, 1.0, 1.0})},
      {"unit", KernelFunction::product(UnitFactor{}, {1.0, 0.5, 0.25})},
  };
  PointSet grid(dim);
  for (double x = -3.0; x <= 3.0; x += 0.75)
    for (double y = -3.0; y <= 3.0; y += 1.5) grid.push_back(std::vector<double>{x, y});
  std::string detail;
  std::uint64_t seed = 1000;
  for (const auto& [name, g] : battery) {
    const KernelFunction lifted = semigroup::lift_kernel(g, t, dim);
    const auto est = semigroup::apply_mc([&](const Configuration& h) { return k_transform(g, h); }, gamma, t,
                                         {100'000, seed++, threads(), {}});
    const double exact = k_transform(lifted, gamma);
    const bool ok = oracle::within(est.mean, est.std_error, exact);
    // a unit kernel has zero variance; compare exactly then
    const double z = est.std_error > 0.0 ? std::abs(est.mean - exact) / est.std_error : (ok ? 0.0 : INFINITY);
    o.require(ok, name + fmt(" lift off by %.2f SE", z));
    std::string cert = "n/a";
    if (g.factor()) {
      const auto base = product_certificate(*g.factor(), g.coefficients(), 1.0);
      if (base) {
        const auto degraded = semigroup::lifted_certificate(*base, t, dim);
        const CertificateCheck chk = check_d_class(lifted, degraded, grid, 3);
        o.require(chk.pass, name + fmt(" lifted certificate ratio %.3g", chk.worst_ratio));
        cert = fmt("%.2g", chk.worst_ratio);
      }
    }
    detail += (detail.empty() ? "" : ", ") + name + fmt(" z=%.2f", z) + " cert " + cert;
  }
  if (o.pass) o.detail = detail;
  return o;
}

Outcome feller_probes() {
  Outcome o;
  using namespace semigroup;
  const Configuration g = reference_configuration();
  const ExpFunctional ef(GaussianBump{0.5, 1.0, {}});
  const auto value = [&](const Configuration& h) { return apply_exact_exponential(ef, h, 0.5); };
  const Metric rho = [](const Configuration& a, const Configuration& b) { return metrics::rho(a, b); };
  const Metric d1 = [](const Configuration& a, const Configuration& b) { return metrics::d1(a, b).value; };
  std::string detail;
  for (auto [name, sched, metric] : {std::tuple{"rho-shift", FellerSchedule::kRhoShift, rho},
                                     std::tuple{"add-far", FellerSchedule::kAddFar, d1},
                                     std::tuple{"d1-shift", FellerSchedule::kD1Shift, d1}}) {
    const auto perturbed = feller_schedule(g, sched, 0, 10);
    const FellerReport r = feller_probe(value, g, perturbed, metric);
    o.require(r.pass, std::string(name) + fmt(" final/initial %.3g", r.final_over_initial));
    o.require(r.strictly_decreasing, std::string(name) + " value gaps not strictly decreasing");
    detail += (detail.empty() ? "" : ", ") + std::string(name) + fmt(" %.2g", r.final_over_initial);
  }
  if (o.pass) o.detail = "final/initial: " + detail;
  return o;
}

Outcome process_diagnostics() {
  Outcome o;
  const process::MarginalReport m = process::marginal_check(reference_configuration(), 1.0, 0.01, 20'000, 1200, threads());
  o.require(m.ks.p_value > 0.001, fmt("KS p = %.3g", m.ks.p_value));

  struct Osc {
    int dim;
    double delta, r;
  };
  const std::vector<Osc> battery{{1, 0.01, 1.0}, {1, 0.05, 1.0}, {2, 0.01, 1.2},
                                 {2, 0.04, 1.4}, {3, 0.01, 1.4}, {3, 0.02, 2.0}};
  int osc_pass = 0;
  for (std::size_t k = 0; k < battery.size(); ++k) {
    const auto& b = battery[k];
    const std::vector<double> x0(static_cast<std::size_t>(b.dim), 0.0);
    const auto r = process::oscillation_check(x0, 0.0, b.delta, b.r, 100'000, 1300 + k, 64, threads());
    const bool ok = r.empirical <= r.bound + 4.0 * r.std_error;
    o.require(ok, fmt("oscillation d=%.0f delta=%.2f: %.3g > bound", b.dim, b.delta, r.empirical));
    osc_pass += ok ? 1 : 0;
  }

  Configuration two(2, 1.0);
  two.add({-0.25, 0.0});
  two.add({0.25, 0.0});
  const std::vector<double> eps{0.1, 0.01, 0.001};
  const auto c2 = process::collision_report(two, 1.0, 1e-3, eps, 10'000, 1400, threads());
  o.require(c2.strictly_decreasing, "d=2 collision fractions not strictly decreasing");
  o.require(c2.rows.back().fraction < 0.01, fmt("final d=2 collision fraction %.3g", c2.rows.back().fraction));

  Configuration line(1, 1.0);
  line.add({0.0});
  line.add({0.5});
  const auto c1 = process::collision_report(line, 1.0, 1e-3, eps, 10'000, 1500, threads());
  const double ref = 2.0 * oracle::normal_tail(0.5 / std::sqrt(4.0));
  o.require(std::abs(c1.crossing_fraction - ref) <= 4.0 * c1.crossing_std_error,
            fmt("d=1 crossing %.4f vs %.4f (se %.2g)", c1.crossing_fraction, ref, c1.crossing_std_error));
  if (o.pass)
    o.detail = fmt("KS p=%.3f, oscillation 6/6, d=2 final fraction %.2g", m.ks.p_value, c2.rows.back().fraction) +
               fmt(", d=1 crossing %.4f vs %.4f", c1.crossing_fraction, ref);
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::path("determinism");
  fs::create_directories(dir);
  int compared = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(CONFHEAT_CONFIG_DIR))
    if (e.path().extension() == ".json" && e.path().stem() != "invalid") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    experiment::Json doc = experiment::Json::parse(slurp(file));
    const auto replicas = doc.value("replicas", std::uint64_t{10'000});
    doc["replicas"] = std::min<std::uint64_t>(replicas, 2000);
    const auto v = experiment::validate_document(doc);
    if (!v.ok()) {
      o.require(false, file.filename().string() + " invalid");
      continue;
    }
    std::vector<std::string> outputs;
    for (unsigned th : {1u, 4u, 1u}) {
      const std::string prefix = (dir / (file.stem().string() + "-" + std::to_string(outputs.size()))).string();
      experiment::run(*v.config, th).write(prefix);
      outputs.push_back(slurp(prefix + ".csv") + slurp(prefix + ".json"));
    }
    const bool same = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    o.require(same, file.filename().string() + " differs between runs");
    ++compared;
  }
  o.require(compared == 15, fmt("%.0f configs compared", compared));
  if (o.pass) o.detail = fmt("%.0f experiments byte-identical across 3 runs (threads 1, 4, 1)", compared);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{
      heat_kernel_identities, tail_function,      rho_metric,        k_transform_algebra, correlation_functions,
      exponential_functionals, poisson_invariance, semigroup_property, generator_formula, kernel_lift,
      feller_probes,          process_diagnostics, determinism};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
