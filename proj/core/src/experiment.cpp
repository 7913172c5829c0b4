#include "confheat/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "confheat/error.hpp"
#include "confheat/harmonic.hpp"
#include "confheat/kernel.hpp"
#include "confheat/metrics.hpp"
#include "confheat/parallel.hpp"
#include "confheat/points.hpp"
#include "confheat/process.hpp"
#include "confheat/rng.hpp"
#include "confheat/semigroup.hpp"
#include "confheat/special.hpp"

namespace confheat::experiment {

namespace {

using points::Configuration;
using report::Report;
using report::Row;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// parameter checks

using Check = std::function<std::optional<std::string>(const Json&)>;

struct Param {
  std::string name;
  Json fallback;
  Check check;
};

std::string show(const Json& j) { return j.dump(); }

Check number(double lo, double hi, bool lo_open = false, bool hi_open = false) {
  return [=](const Json& j) -> std::optional<std::string> {
    if (!j.is_number()) return "must be a number (got " + show(j) + ")";
    const double v = j.get<double>();
    const bool below = lo_open ? !(v > lo) : !(v >= lo);
    const bool above = hi_open ? !(v < hi) : !(v <= hi);
    if (below || above) {
      std::ostringstream msg;
      msg << "must lie in " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]") << " (got "
          << show(j) << ")";
      return msg.str();
    }
    return std::nullopt;
  };
}

Check positive() { return number(0.0, std::numeric_limits<double>::max(), true); }

Check integer(std::int64_t lo, std::int64_t hi) {
  return [=](const Json& j) -> std::optional<std::string> {
    if (!j.is_number_integer()) return "must be an integer (got " + show(j) + ")";
    const auto v = j.get<std::int64_t>();
    if (v < lo || v > hi) {
      return "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "] (got " + show(j) + ")";
    }
    return std::nullopt;
  };
}

Check choice(std::vector<std::string> options) {
  return [options = std::move(options)](const Json& j) -> std::optional<std::string> {
    if (j.is_string() && std::ranges::find(options, j.get<std::string>()) != options.end()) return std::nullopt;
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
    return "must be one of " + list + " (got " + show(j) + ")";
  };
}

Check nullable(Check inner) {
  return [inner = std::move(inner)](const Json& j) -> std::optional<std::string> {
    if (j.is_null()) return std::nullopt;
    return inner(j);
  };
}

Check number_list(bool decreasing) {
  return [=](const Json& j) -> std::optional<std::string> {
    if (!j.is_array() || j.empty()) return "must be a non-empty array of numbers";
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_number() || !(j[k].get<double>() > 0.0)) return "entries must be positive numbers";
      if (decreasing && k > 0 && !(j[k].get<double>() < j[k - 1].get<double>())) {
        return "entries must be strictly decreasing";
      }
    }
    return std::nullopt;
  };
}

Check array_of_objects(std::vector<Param> fields) {
  return [fields = std::move(fields)](const Json& j) -> std::optional<std::string> {
    if (!j.is_array() || j.empty()) return "must be a non-empty array of objects";
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_object()) return "entry " + std::to_string(k) + " must be an object";
      for (const auto& [key, value] : j[k].items()) {
        if (std::ranges::none_of(fields, [&](const Param& p) { return p.name == key; })) {
          return "entry " + std::to_string(k) + ": unknown key '" + key + "'";
        }
      }
      for (const Param& f : fields) {
        if (!j[k].contains(f.name)) {
          if (f.fallback.is_null()) continue;
          return "entry " + std::to_string(k) + ": missing '" + f.name + "'";
        }
        if (auto e = f.check(j[k][f.name])) return "entry " + std::to_string(k) + "." + f.name + ": " + *e;
      }
    }
    return std::nullopt;
  };
}

// Either a configuration document or a bare list of points.
Configuration parse_configuration(const Json& j, int dim);

Check configuration_check() {
  return [](const Json& j) -> std::optional<std::string> {
    if (j.is_null()) return std::nullopt;
    try {
      parse_configuration(j, 0);
    } catch (const std::exception& e) {
      return std::string("is not a valid configuration: ") + e.what();
    }
    return std::nullopt;
  };
}

Check any() {
  return [](const Json&) -> std::optional<std::string> { return std::nullopt; };
}

// ---------------------------------------------------------------------------
// shared helpers

Configuration parse_configuration(const Json& j, int dim) {
  if (j.is_array()) {
    if (j.empty()) {
      if (dim < 1) throw InputError("empty point list needs a dimension");
      return Configuration(dim, 0.0);
    }
    const int d = static_cast<int>(j[0].size());
    PointSet ps(d);
    for (const auto& p : j) {
      if (!p.is_array() || static_cast<int>(p.size()) != d) throw InputError("points must be arrays of equal length");
      std::vector<double> x;
      for (const auto& c : p) {
        if (!c.is_number()) throw InputError("coordinates must be numbers");
        x.push_back(c.get<double>());
      }
      ps.push_back(x);
    }
    return points::from_particles(ps, 0.0);
  }
  return points::configuration_from_json(nlohmann::json::parse(j.dump()));
}

// Five well-separated sites; the first sits at the origin.
Configuration default_configuration(int dim) {
  static constexpr double first[] = {0.0, 1.0, -1.3, 2.1, -2.6};
  static constexpr double rest[] = {0.0, 0.5, -0.4, 0.7, 0.2};
  PointSet ps(dim);
  for (int k = 0; k < 5; ++k) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    x[0] = first[k];
    for (int c = 1; c < dim; ++c) x[static_cast<std::size_t>(c)] = (c % 2 ? 1.0 : -1.0) * rest[k];
    ps.push_back(x);
  }
  return points::from_particles(ps, 0.0);
}

Configuration configuration_param(const Json& params, const char* key, int dim) {
  const Json& j = params.at(key);
  if (j.is_null()) return default_configuration(dim);
  Configuration c = parse_configuration(j, dim);
  if (c.dim() != dim) throw InputError(std::string("params.") + key + ": dimension differs from params.dim");
  return c;
}

std::vector<double> doubles(const Json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

std::vector<double> center_param(const Json& j, int dim) {
  if (j.is_null()) return {};
  std::vector<double> c = doubles(j);
  if (static_cast<int>(c.size()) != dim) throw InputError("center dimension differs from params.dim");
  return c;
}

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

Stats stats(std::span<const double> v) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (v[i] - mean);
  }
  const double n = static_cast<double>(v.size());
  return {mean, v.size() > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0};
}

Verdict within(double estimate, double se, double reference, double k = 4.0) {
  return std::abs(estimate - reference) <= k * se + 1e-12 * std::max(1.0, std::abs(reference)) ? Verdict::kPass
                                                                                               : Verdict::kFail;
}

Verdict at_most(double value, double bound) { return value <= bound ? Verdict::kPass : Verdict::kFail; }

Row row(std::string quantity, Json inputs, double estimate, double se, double reference, double bound, Verdict v) {
  return Row{std::move(quantity), std::move(inputs), estimate, se, reference, bound, v};
}

Json ordered(std::initializer_list<std::pair<const char*, Json>> items) {
  Json j = Json::object();
  for (const auto& [k, v] : items) j[k] = v;
  return j;
}

int geti(const Json& p, const char* k) { return p.at(k).get<int>(); }
double getd(const Json& p, const char* k) { return p.at(k).get<double>(); }
std::string gets(const Json& p, const char* k) { return p.at(k).get<std::string>(); }

std::uint32_t replica_count(const ExperimentConfig& c) { return static_cast<std::uint32_t>(c.replicas); }

// ---------------------------------------------------------------------------
// experiments

Report run_sample_poisson(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const int n_max = geti(p, "n_max");
  const points::Window window{getd(p, "radius"), getd(p, "intensity")};
  const std::uint32_t reps = replica_count(c);
  std::vector<double> counts(reps), bn(static_cast<std::size_t>(reps) * static_cast<std::size_t>(n_max));
  parallel_for(reps, threads, [&](std::size_t r) {
    const Configuration g = points::sample_poisson(window, dim, c.seed, static_cast<std::uint32_t>(r));
    counts[r] = static_cast<double>(g.particle_count());
    for (int n = 1; n <= n_max; ++n) bn[static_cast<std::size_t>(n - 1) * reps + r] = metrics::b_n(g, n);
  });
  Report rep(c.experiment, c.effective());
  const double expected = window.intensity * window.volume(dim);
  const Stats sc = stats(counts);
  rep.add(row("particle_count", Json::object(), sc.mean, sc.se, expected, kNaN, within(sc.mean, sc.se, expected)));
  for (int n = 1; n <= n_max; ++n) {
    // E Σ_{|x|<R} e^{-|x|/n} = z S_{d-1} n^d Γ(d) P(d, R/n)
    const double nd = std::pow(static_cast<double>(n), dim);
    const double exact = window.intensity * special::unit_sphere_area(dim) * nd * std::tgamma(dim) *
                         special::gamma_p(dim, window.radius / n);
    const Stats s = stats(std::span<const double>(bn.data() + static_cast<std::size_t>(n - 1) * reps, reps));
    rep.add(row("B_n", ordered({{"n", n}}), s.mean, s.se, exact,
                points::truncation_tail_bound(window.radius, n, dim, window.intensity), within(s.mean, s.se, exact)));
  }
  return rep;
}

Report run_diffuse(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const double t = getd(p, "t");
  const Configuration gamma = configuration_param(p, "configuration", dim);
  if (gamma.particle_count() == 0) throw InputError("params.configuration: need at least one particle");
  std::optional<double> pad;
  if (!p.at("pad").is_null()) pad = getd(p, "pad");
  const std::uint32_t reps = replica_count(c);
  const PointSet start = gamma.particles();
  std::vector<double> sq(static_cast<std::size_t>(reps) * static_cast<std::size_t>(dim));
  parallel_for(reps, threads, [&](std::size_t r) {
    const PointSet moved = points::diffuse(gamma, t, c.seed, static_cast<std::uint32_t>(r), pad).particles();
    for (int k = 0; k < dim; ++k) {
      const double dx = moved[0][static_cast<std::size_t>(k)] - start[0][static_cast<std::size_t>(k)];
      sq[static_cast<std::size_t>(k) * reps + r] = dx * dx;
    }
  });
  Report rep(c.experiment, c.effective());
  for (int k = 0; k < dim; ++k) {
    const Stats s = stats(std::span<const double>(sq.data() + static_cast<std::size_t>(k) * reps, reps));
    rep.add(row("displacement_variance", ordered({{"particle", 0}, {"coordinate", k}}), s.mean, s.se, 2.0 * t, kNaN,
                within(s.mean, s.se, 2.0 * t)));
  }
  const double used_pad = pad.value_or(points::default_pad(dim, t));
  rep.note("pad", used_pad);
  rep.note("per_particle_mass_beyond_pad", report::number(kernel::tail_mass({dim, t}, used_pad)));
  return rep;
}

semigroup::ExpFunctional exp_functional(const Json& p, int dim) {
  if (gets(p, "shape") == "gaussian") {
    return semigroup::ExpFunctional(
        semigroup::GaussianBump{getd(p, "a"), getd(p, "s"), center_param(p.at("center"), dim)});
  }
  return semigroup::ExpFunctional(semigroup::SmoothedBox{getd(p, "a"), getd(p, "radius"), getd(p, "width")});
}

Report run_semigroup_exp(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const double t = getd(p, "t");
  const double t2 = getd(p, "t2");
  const Configuration gamma = configuration_param(p, "configuration", dim);
  const semigroup::ExpFunctional ef = exp_functional(p, dim);
  const auto f = [&ef](const Configuration& g) { return ef(g); };
  Report rep(c.experiment, c.effective());
  rep.note("route", ef.route());

  const double exact = semigroup::apply_exact_exponential(ef, gamma, t);
  const semigroup::SemigroupEstimate mc = semigroup::apply_mc(f, gamma, t, {c.replicas, c.seed, threads, {}});
  rep.add(row("exact", ordered({{"t", t}}), exact, 0.0, kNaN, kNaN, Verdict::kPass));
  rep.add(row("mc", ordered({{"t", t}}), mc.mean, mc.std_error, exact, kNaN, within(mc.mean, mc.std_error, exact)));
  rep.note("truncation", mc.truncation_note);
  if (t2 > 0.0) {
    const double one_step = semigroup::apply_exact_exponential(ef, gamma, t + t2);
    const double two_step = semigroup::apply_exact_exponential_composed(ef, gamma, t, t2);
    rep.add(row("exact_two_step", ordered({{"t", t}, {"t2", t2}}), two_step, 0.0, one_step, 1e-10,
                at_most(std::abs(two_step - one_step), 1e-10)));
    const std::uint32_t reps = replica_count(c);
    const std::uint64_t seed2 = derive_seed(c.seed, 1);
    std::vector<double> v(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
      const auto rr = static_cast<std::uint32_t>(r);
      v[r] = ef(points::diffuse(points::diffuse(gamma, t, c.seed, rr), t2, seed2, rr));
    });
    const Stats two = stats(v);
    const semigroup::SemigroupEstimate one =
        semigroup::apply_mc(f, gamma, t + t2, {c.replicas, derive_seed(c.seed, 2), threads, {}});
    const double se = std::hypot(two.se, one.std_error);
    rep.add(row("mc_two_step", ordered({{"t", t}, {"t2", t2}}), two.mean, se, one.mean, kNaN,
                within(two.mean, se, one.mean)));
  }
  return rep;
}

Report run_invariance(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const double inner = getd(p, "inner_radius");
  const double a = getd(p, "a");
  const double s = getd(p, "s");
  const std::string kind = gets(p, "functional");
  semigroup::LocalFunctional lf;
  lf.name = kind;
  lf.inner_radius = inner;
  if (kind == "constant") {
    lf.f = [](const Configuration&) { return 1.0; };
    lf.sensitivity = 0.0;
  } else if (kind == "count") {
    lf.f = [inner](const Configuration& g) {
      double n = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (norm(g.position(i)) < inner) n += g.multiplicity(i);
      }
      return n;
    };
    lf.sensitivity = 1.0;
  } else {
    lf.f = [inner, a, s](const Configuration& g) {
      double v = 1.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = norm(g.position(i));
        if (r < inner) v *= std::pow(1.0 - a * std::exp(-r * r / (2.0 * s * s)), g.multiplicity(i));
      }
      return v;
    };
    lf.sensitivity = a;
  }
  const points::Window outer{getd(p, "outer_radius"), getd(p, "intensity")};
  const semigroup::InvarianceReport r =
      semigroup::invariance_test(lf, outer, dim, getd(p, "t"), getd(p, "tolerance"), {c.replicas, c.seed, threads, {}});
  Report rep(c.experiment, c.effective());
  rep.add(row("mean_before", Json::object(), r.mean_before, kNaN, kNaN, kNaN, Verdict::kPass));
  rep.add(row("mean_after", Json::object(), r.mean_after, kNaN, kNaN, kNaN, Verdict::kPass));
  rep.add(row("paired_difference", Json::object(), r.difference, r.std_error, 0.0, r.leakage_bound,
              r.pass ? Verdict::kPass : Verdict::kFail));
  return rep;
}

semigroup::OuterFunction::Kind outer_kind(const std::string& s) {
  using K = semigroup::OuterFunction::Kind;
  static const std::map<std::string, K> kinds{{"linear", K::kLinear},
                                              {"exponential", K::kExponential},
                                              {"sine", K::kSine},
                                              {"quadratic", K::kQuadratic},
                                              {"product", K::kProduct}};
  return kinds.at(s);
}

semigroup::CylinderFunction cylinder_function(const Json& p, int dim) {
  std::vector<semigroup::TestFunction> inner;
  if (p.at("test_functions").is_null()) {
    std::vector<double> shifted(static_cast<std::size_t>(dim), 0.0);
    shifted[0] = 0.5;
    inner.push_back({1.0, 1.2, {}});
    inner.push_back({0.6, 1.6, shifted});
  } else {
    for (const auto& tf : p.at("test_functions")) {
      inner.push_back({tf.at("a").get<double>(), tf.at("s").get<double>(),
                       center_param(tf.contains("center") ? tf.at("center") : Json(), dim)});
    }
  }
  semigroup::OuterFunction outer{outer_kind(gets(p, "outer")), {}};
  if (p.at("weights").is_null()) {
    for (std::size_t j = 0; j < inner.size(); ++j) outer.weights.push_back(1.0 / static_cast<double>(j + 1));
  } else {
    outer.weights = doubles(p.at("weights"));
  }
  return semigroup::CylinderFunction(std::move(outer), std::move(inner), dim);
}

Report run_generator(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const Configuration gamma = configuration_param(p, "configuration", dim);
  const semigroup::CylinderFunction f = cylinder_function(p, dim);
  const std::vector<double> t_list = doubles(p.at("t_list"));
  const semigroup::GeneratorReport g = semigroup::generator_residual(
      f, gamma, t_list, {c.replicas, c.seed, threads, {}}, getd(p, "ratio_low"), getd(p, "ratio_high"));
  Report rep(c.experiment, c.effective());
  rep.note("generator_value", report::number(g.generator_value));
  rep.note("route", g.route);
  for (const auto& r : g.rows) {
    const Verdict v = r.std_error > 0.5 * std::abs(r.residual) ? Verdict::kInconclusive : Verdict::kPass;
    rep.add(row("difference_quotient", ordered({{"t", r.t}}), r.quotient, r.std_error, g.generator_value, kNaN, v));
  }
  for (std::size_t k = 0; k < g.ratios.size(); ++k) {
    Verdict v = g.ratios[k] >= getd(p, "ratio_low") && g.ratios[k] <= getd(p, "ratio_high") ? Verdict::kPass
                                                                                           : Verdict::kFail;
    if (g.verdict == Verdict::kInconclusive) v = Verdict::kInconclusive;
    rep.add(row("residual_ratio", ordered({{"t", t_list[k]}, {"t_next", t_list[k + 1]}}), g.ratios[k], kNaN, 2.0,
                kNaN, v));
  }
  return rep;
}

Report run_feller(const ExperimentConfig& c, unsigned) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const double t = getd(p, "t");
  const int i_max = geti(p, "i_max");
  const Configuration gamma = configuration_param(p, "configuration", dim);
  const semigroup::ExpFunctional ef(semigroup::GaussianBump{getd(p, "a"), getd(p, "s"), center_param(p.at("center"), dim)});
  const std::string name = gets(p, "schedule");
  const auto schedule = name == "rho-shift" ? semigroup::FellerSchedule::kRhoShift
                        : name == "add-far" ? semigroup::FellerSchedule::kAddFar
                                            : semigroup::FellerSchedule::kD1Shift;
  const auto perturbations =
      semigroup::feller_schedule(gamma, schedule, static_cast<std::size_t>(geti(p, "site")), geti(p, "steps"), i_max);
  semigroup::Metric metric;
  if (schedule == semigroup::FellerSchedule::kRhoShift) {
    metric = [](const Configuration& a, const Configuration& b) { return metrics::rho(a, b); };
  } else {
    metric = [i_max](const Configuration& a, const Configuration& b) { return metrics::d1(a, b, i_max).value; };
  }
  const double ratio = getd(p, "ratio");
  const semigroup::FellerReport r = semigroup::feller_probe(
      [&](const Configuration& g) { return semigroup::apply_exact_exponential(ef, g, t); }, gamma, perturbations,
      metric, ratio, ef.route());
  Report rep(c.experiment, c.effective());
  rep.note("route", r.route);
  for (std::size_t j = 0; j < r.points.size(); ++j) {
    const bool ok = j == 0 || r.points[j].value_gap < r.points[j - 1].value_gap;
    rep.add(row("value_gap", ordered({{"step", j + 1}, {"metric_gap", report::number(r.points[j].metric_gap)}}),
                r.points[j].value_gap, 0.0, kNaN, kNaN, ok ? Verdict::kPass : Verdict::kFail));
  }
  rep.add(row("final_over_initial", Json::object(), r.final_over_initial, 0.0, kNaN, ratio,
              r.pass ? Verdict::kPass : Verdict::kFail));
  return rep;
}

std::pair<Configuration, Configuration> two_configurations(const Json& p) {
  const int dim = geti(p, "dim");
  Configuration a, b;
  if (p.at("a").is_null()) {
    a = default_configuration(dim);
  } else {
    a = configuration_param(p, "a", dim);
  }
  if (p.at("b").is_null()) {
    const PointSet pa = default_configuration(dim).particles();
    PointSet pb(dim);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      std::vector<double> x(pa[i].begin(), pa[i].end());
      x[0] += 0.25 * static_cast<double>(i % 3) - 0.2;
      pb.push_back(x);
    }
    b = points::from_particles(pb, 0.0);
  } else {
    b = configuration_param(p, "b", dim);
  }
  return {a, b};
}

Report run_rho(const ExperimentConfig& c, unsigned) {
  const auto [a, b] = two_configurations(c.params);
  const double ab = metrics::rho(a, b);
  const double ba = metrics::rho(b, a);
  const bool symmetric = (std::isinf(ab) && std::isinf(ba)) || std::abs(ab - ba) <= 1e-12 * (1.0 + ab);
  Report rep(c.experiment, c.effective());
  rep.add(row("rho", ordered({{"particles_a", a.particle_count()}, {"particles_b", b.particle_count()}}), ab, 0.0,
              ba, kNaN, symmetric ? Verdict::kPass : Verdict::kFail));
  return rep;
}

Report run_flat_metric(const ExperimentConfig& c, unsigned) {
  const Json& p = c.params;
  const int i_max = geti(p, "i_max");
  const int n_max = geti(p, "n_max");
  const auto [a, b] = two_configurations(p);
  Report rep(c.experiment, c.effective());
  auto sym = [](double x, double y) {
    return std::abs(x - y) <= 1e-9 * (1.0 + std::abs(x)) ? Verdict::kPass : Verdict::kFail;
  };
  for (int i = 1; i <= i_max; ++i) {
    const double ab = metrics::flat_metric(a, b, i);
    rep.add(row("d_K_i", ordered({{"i", i}}), ab, 0.0, metrics::flat_metric(b, a, i), kNaN, sym(ab, metrics::flat_metric(b, a, i))));
  }
  const metrics::MetricValue dk = metrics::flat_metric_series(a, b, i_max);
  const metrics::MetricValue d1 = metrics::d1(a, b, i_max);
  const metrics::MetricValue dinf = metrics::d_infty(a, b, i_max, n_max);
  rep.add(row("d_K", ordered({{"i_max", i_max}}), dk.value, 0.0, metrics::flat_metric_series(b, a, i_max).value,
              dk.truncation_error, sym(dk.value, metrics::flat_metric_series(b, a, i_max).value)));
  rep.add(row("d_1", ordered({{"i_max", i_max}}), d1.value, 0.0, metrics::d1(b, a, i_max).value, d1.truncation_error,
              sym(d1.value, metrics::d1(b, a, i_max).value)));
  rep.add(row("d_infty", ordered({{"i_max", i_max}, {"n_max", n_max}}), dinf.value, 0.0,
              metrics::d_infty(b, a, i_max, n_max).value, dinf.truncation_error,
              sym(dinf.value, metrics::d_infty(b, a, i_max, n_max).value)));
  return rep;
}

PointSet random_points(RandomStream& rng, int dim, std::size_t n, double half_width) {
  PointSet ps(dim);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : x) v = half_width * (2.0 * rng.uniform() - 1.0);
    ps.push_back(x);
  }
  return ps;
}

// Symmetric random level: c_n (Σ_k cos(w·x_k + b)) Π_k e^{-|x_k|²/4}.
harmonic::KernelFunction random_kernel(RandomStream& rng, int dim, int order) {
  std::vector<harmonic::KernelFunction::Level> levels;
  for (int n = 1; n <= order; ++n) {
    const double c = 2.0 * rng.uniform() - 1.0;
    const double b = 6.283185307179586 * rng.uniform();
    std::vector<double> w(static_cast<std::size_t>(dim));
    for (double& v : w) v = rng.normal();
    levels.push_back([c, b, w](const PointSet& eta) {
      double sum = 0.0, prod = 1.0;
      for (std::size_t k = 0; k < eta.size(); ++k) {
        double dot = b;
        for (std::size_t j = 0; j < w.size(); ++j) dot += w[j] * eta[k][j];
        sum += std::cos(dot);
        prod *= std::exp(-0.25 * squared_norm(eta[k]));
      }
      return c * sum * prod;
    });
  }
  return harmonic::KernelFunction(2.0 * rng.uniform() - 1.0, std::move(levels));
}

Report run_ktransform(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const int max_order = geti(p, "max_order");
  const int max_points = geti(p, "max_points");
  const double tol = getd(p, "tolerance");
  const auto instances = static_cast<std::size_t>(geti(p, "instances"));
  std::vector<double> inv_err(instances), star_err(instances);
  parallel_for(instances, threads, [&](std::size_t k) {
    RandomStream rng(c.seed, static_cast<std::uint32_t>(k), 0, StreamTag::kAuxiliary);
    const auto order = static_cast<int>(rng() % static_cast<std::uint32_t>(max_order + 1));
    const auto size = static_cast<std::size_t>(rng() % static_cast<std::uint32_t>(max_points + 1));
    const harmonic::KernelFunction g1 = random_kernel(rng, dim, order);
    const harmonic::KernelFunction g2 =
        random_kernel(rng, dim, static_cast<int>(rng() % static_cast<std::uint32_t>(max_order + 1)));
    const PointSet eta = random_points(rng, dim, size, 1.5);
    const double back = harmonic::inverse_k_transform([&](const PointSet& th) { return harmonic::k_transform(g1, th); },
                                                      eta);
    const double direct = g1(eta);
    inv_err[k] = std::abs(back - direct) / std::max(1.0, std::abs(direct));
    const double lhs = harmonic::k_transform(harmonic::star_product(g1, g2), eta);
    const double rhs = harmonic::k_transform(g1, eta) * harmonic::k_transform(g2, eta);
    star_err[k] = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
  });
  const double max_inv = *std::max_element(inv_err.begin(), inv_err.end());
  const double max_star = *std::max_element(star_err.begin(), star_err.end());
  Report rep(c.experiment, c.effective());
  rep.add(row("max_inverse_error", ordered({{"instances", instances}}), max_inv, 0.0, 0.0, tol, at_most(max_inv, tol)));
  rep.add(row("max_star_relative_error", ordered({{"instances", instances}}), max_star, 0.0, 0.0, tol,
              at_most(max_star, tol)));
  return rep;
}

Report run_correlation(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const int n_max = geti(p, "n_max");
  const auto size = static_cast<std::size_t>(geti(p, "gamma_size"));
  const double t = getd(p, "t");
  const double tol = getd(p, "tolerance");
  const auto instances = static_cast<std::size_t>(geti(p, "instances"));
  const auto levels = static_cast<std::size_t>(n_max);
  std::vector<double> err(instances * levels), violations(instances * levels);
  parallel_for(instances, threads, [&](std::size_t k) {
    RandomStream rng(c.seed, static_cast<std::uint32_t>(k), 1, StreamTag::kAuxiliary);
    const Configuration gamma = points::from_particles(random_points(rng, dim, size, 1.5), 0.0);
    for (std::size_t n = 1; n <= levels; ++n) {
      const PointSet theta = random_points(rng, dim, n, 1.5);
      const double e = harmonic::correlation_function_enumeration(gamma, theta, t);
      const double ie = harmonic::correlation_function_inclusion_exclusion(gamma, theta, t);
      const double bound = harmonic::correlation_bound(gamma, theta, t);
      err[k * levels + n - 1] = std::abs(e - ie) / std::max(std::abs(e), std::numeric_limits<double>::min());
      if (e == 0.0 && ie == 0.0) err[k * levels + n - 1] = 0.0;
      violations[k * levels + n - 1] = e > bound * (1.0 + 1e-12) ? 1.0 : 0.0;
    }
  });
  Report rep(c.experiment, c.effective());
  for (std::size_t n = 1; n <= levels; ++n) {
    double worst = 0.0, count = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
      worst = std::max(worst, err[k * levels + n - 1]);
      count += violations[k * levels + n - 1];
    }
    rep.add(row("enumeration_vs_inclusion_exclusion", ordered({{"n", n}}), worst, 0.0, 0.0, tol, at_most(worst, tol)));
    rep.add(row("bound_violations", ordered({{"n", n}}), count, 0.0, 0.0, 0.0, at_most(count, 0.0)));
  }
  return rep;
}

Report run_permanent(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const auto n_max = static_cast<std::size_t>(geti(p, "n_max"));
  const double t = getd(p, "t");
  const double tol = getd(p, "tolerance");
  const auto instances = static_cast<std::size_t>(geti(p, "instances"));
  std::vector<double> err(instances * n_max);
  parallel_for(instances, threads, [&](std::size_t k) {
    RandomStream rng(c.seed, static_cast<std::uint32_t>(k), 2, StreamTag::kAuxiliary);
    for (std::size_t n = 1; n <= n_max; ++n) {
      const PointSet eta = random_points(rng, dim, n, 1.0);
      const PointSet theta = random_points(rng, dim, n, 1.0);
      const double ryser = harmonic::permanent_kernel(eta, theta, t);
      // n! term sum
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double naive = 0.0;
      do {
        double prod = 1.0;
        for (std::size_t i = 0; i < n; ++i) prod *= kernel::density({dim, t}, eta[i], theta[perm[i]]);
        naive += prod;
      } while (std::next_permutation(perm.begin(), perm.end()));
      err[k * n_max + n - 1] = std::abs(ryser - naive) / std::max(naive, std::numeric_limits<double>::min());
    }
  });
  Report rep(c.experiment, c.effective());
  for (std::size_t n = 1; n <= n_max; ++n) {
    double worst = 0.0;
    for (std::size_t k = 0; k < instances; ++k) worst = std::max(worst, err[k * n_max + n - 1]);
    rep.add(row("ryser_vs_naive", ordered({{"n", n}}), worst, 0.0, 0.0, tol, at_most(worst, tol)));
  }
  return rep;
}

Report run_process(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const double horizon = getd(p, "horizon");
  const double dt = getd(p, "dt");
  const int n = geti(p, "n");
  const Configuration gamma = configuration_param(p, "configuration", dim);
  Report rep(c.experiment, c.effective());
  const process::MarginalReport m = process::marginal_check(gamma, horizon, dt, c.replicas, c.seed, threads);
  rep.add(row("ks_p_value", ordered({{"horizon", horizon}, {"dt", dt}}), m.ks.p_value, 0.0, kNaN, 0.001,
              m.ks.p_value > 0.001 ? Verdict::kPass : Verdict::kFail));
  rep.add(row("displacement_variance", ordered({{"horizon", horizon}}), m.variance, m.variance_se, 2.0 * horizon, kNaN,
              within(m.variance, m.variance_se, 2.0 * horizon)));
  if (gamma.particle_count() > 1) {
    rep.add(row("cross_correlation", Json::object(), m.cross_correlation, m.cross_correlation_se, 0.0, kNaN,
                within(m.cross_correlation, m.cross_correlation_se, 0.0)));
  }
  const process::BnRefinementReport b =
      process::bn_refinement(gamma, horizon, getd(p, "dt_coarse"), getd(p, "dt_fine"), n,
                             static_cast<std::size_t>(geti(p, "refinement_replicas")), derive_seed(c.seed, 1), threads);
  rep.add(row("bn_median_max_increment", ordered({{"n", n}, {"dt_fine", b.dt_fine}, {"dt_coarse", b.dt_coarse}}),
              b.median_fine, 0.0, b.median_coarse, kNaN, b.pass ? Verdict::kPass : Verdict::kFail));
  const process::BnPathReport frozen =
      process::bn_continuity_report(process::simulate_paths(gamma, horizon, dt, c.seed, 0, true), n);
  rep.add(row("frozen_max_increment", ordered({{"n", n}}), frozen.max_increment, 0.0, 0.0, 0.0,
              at_most(frozen.max_increment, 0.0)));
  return rep;
}

Report run_oscillation(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const auto steps = static_cast<std::size_t>(geti(p, "steps"));
  const double a = getd(p, "a");
  Report rep(c.experiment, c.effective());
  std::uint32_t k = 0;
  for (const auto& e : p.at("battery")) {
    const int dim = e.at("dim").get<int>();
    const double delta = e.at("delta").get<double>();
    const double r = e.at("r").get<double>();
    const std::vector<double> start(static_cast<std::size_t>(dim), 0.0);
    const process::OscillationReport o =
        process::oscillation_check(start, a, a + delta, r, c.replicas, derive_seed(c.seed, k++), steps, threads);
    rep.add(row("oscillation_probability", ordered({{"dim", dim}, {"delta", delta}, {"r", r}}), o.empirical,
                o.std_error, kNaN, o.bound, o.pass ? Verdict::kPass : Verdict::kFail));
  }
  return rep;
}

Report run_collision(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  const int dim = geti(p, "dim");
  const double horizon = getd(p, "horizon");
  Configuration gamma;
  if (p.at("configuration").is_null()) {
    PointSet ps(dim);
    std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
    ps.push_back(x);
    x[0] = getd(p, "separation");
    ps.push_back(x);
    gamma = points::from_particles(ps, 0.0);
  } else {
    gamma = configuration_param(p, "configuration", dim);
  }
  const std::vector<double> eps = doubles(p.at("epsilons"));
  const process::CollisionReport r =
      process::collision_report(gamma, horizon, getd(p, "dt"), eps, c.replicas, c.seed, threads);
  Report rep(c.experiment, c.effective());
  rep.note("detection", "grid minimum of pairwise distances");
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    Verdict v = Verdict::kPass;
    if (dim >= 2 && k > 0) {
      const double prev = r.rows[k - 1].fraction, cur = r.rows[k].fraction;
      v = cur < prev || (cur == 0.0 && prev == 0.0) ? Verdict::kPass : Verdict::kFail;
    }
    rep.add(row("min_distance_below_epsilon", ordered({{"epsilon", r.rows[k].epsilon}}), r.rows[k].fraction,
                r.rows[k].std_error, kNaN, kNaN, v));
  }
  if (dim >= 2) {
    const double last = r.rows.back().fraction;
    rep.add(row("final_fraction", ordered({{"epsilon", r.rows.back().epsilon}}), last, r.rows.back().std_error, kNaN,
                getd(p, "final_max"), at_most(last, getd(p, "final_max"))));
  } else {
    double reference = kNaN;
    Verdict v = Verdict::kPass;
    if (gamma.particle_count() == 2) {
      const PointSet ps = gamma.particles();
      reference = 2.0 * special::normal_tail(std::abs(ps[0][0] - ps[1][0]) / std::sqrt(4.0 * horizon));
      v = within(r.crossing_fraction, r.crossing_std_error, reference);
    }
    rep.add(row("crossing_fraction", ordered({{"horizon", horizon}}), r.crossing_fraction, r.crossing_std_error,
                reference, kNaN, v));
  }
  return rep;
}

Report run_tail_tau(const ExperimentConfig& c, unsigned threads) {
  const Json& p = c.params;
  Report rep(c.experiment, c.effective());
  const std::uint32_t reps = replica_count(c);
  std::uint32_t k = 0;
  for (const auto& e : p.at("combos")) {
    const int dim = e.at("dim").get<int>();
    const double t = e.at("t").get<double>();
    const double r = e.at("r").get<double>();
    std::vector<double> hit(reps);
    const double sd = std::sqrt(2.0 * t);
    parallel_for(reps, threads, [&](std::size_t s) {
      RandomStream rng(c.seed, static_cast<std::uint32_t>(s), k, StreamTag::kAuxiliary);
      double len2 = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double z = sd * rng.normal();
        len2 += z * z;
      }
      hit[s] = len2 > r * r ? 1.0 : 0.0;
    });
    ++k;
    const Stats st = stats(hit);
    const double exact = kernel::tail_mass({dim, t}, r);
    rep.add(row("tail_mass", ordered({{"dim", dim}, {"t", t}, {"r", r}}), st.mean, st.se, exact, kNaN,
                within(st.mean, st.se, exact)));
  }
  const double delta = getd(p, "delta");
  const double r_max = getd(p, "r_max");
  std::vector<double> coarse, fine;
  for (int i = 0; i * 0.5 <= r_max; ++i) coarse.push_back(0.5 * i);
  for (int i = 0; i * 0.01 <= r_max + 1e-12; ++i) fine.push_back(0.01 * i);
  for (const auto& d : p.at("certificate_dims")) {
    const int dim = d.get<int>();
    const kernel::GridPoint g{delta, 0.0};
    const kernel::BoundCertificate cert =
        kernel::make_certificate({dim, delta}, 0.5, std::nullopt, std::span(&g, 1), delta, coarse);
    double worst = 0.0;
    for (double r : fine) worst = std::max(worst, kernel::tau(dim, delta, r) * std::exp(r) / *cert.tail_constant);
    rep.add(row("tau_over_certificate", ordered({{"dim", dim}, {"delta", delta}, {"r_max", r_max}}), worst, 0.0, kNaN,
                1.0, at_most(worst, 1.0)));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// registry

struct Spec {
  std::vector<Param> params;
  std::function<Report(const ExperimentConfig&, unsigned)> run;
};

Param dim_param(int fallback = 2) { return {"dim", fallback, integer(1, 6)}; }
Param config_param(const char* name = "configuration") { return {name, nullptr, configuration_check()}; }

const std::map<std::string, Spec>& registry() {
  static const std::map<std::string, Spec> specs = [] {
    std::map<std::string, Spec> m;
    const Check t_check = positive();
    m["sample-poisson"] = {{dim_param(),
                            {"radius", 5.0, positive()},
                            {"intensity", 1.0, positive()},
                            {"n_max", 20, integer(1, 1000)}},
                           run_sample_poisson};
    m["diffuse"] = {{dim_param(), {"t", 0.5, t_check}, config_param(), {"pad", nullptr, nullable(number(0.0, 1e9))}},
                    run_diffuse};
    m["semigroup-exp"] = {{dim_param(),
                           {"shape", "gaussian", choice({"gaussian", "box"})},
                           {"a", 0.5, number(0.0, 1.0, false, true)},
                           {"s", 1.0, positive()},
                           {"center", nullptr, nullable(number_list(false))},
                           {"radius", 1.0, positive()},
                           {"width", 0.2, positive()},
                           {"t", 0.5, t_check},
                           {"t2", 0.0, number(0.0, 1e9)},
                           config_param()},
                          run_semigroup_exp};
    m["invariance"] = {{dim_param(),
                        {"functional", "exponential", choice({"constant", "count", "exponential"})},
                        {"intensity", 1.0, positive()},
                        {"t", 0.1, t_check},
                        {"inner_radius", 1.0, positive()},
                        {"outer_radius", 4.0, positive()},
                        {"tolerance", 1e-3, positive()},
                        {"a", 0.5, number(0.0, 1.0, false, true)},
                        {"s", 0.5, positive()}},
                       run_invariance};
    m["generator"] = {{dim_param(),
                       {"outer", "linear", choice({"linear", "exponential", "sine", "quadratic", "product"})},
                       {"weights", nullptr, nullable(any())},
                       {"test_functions", nullptr,
                        nullable(array_of_objects({{"a", 1.0, number(-1e6, 1e6)},
                                                   {"s", 1.0, positive()},
                                                   {"center", nullptr, nullable(any())}}))},
                       config_param(),
                       {"t_list", Json::array({0.1, 0.05, 0.025}), number_list(true)},
                       {"ratio_low", 1.5, positive()},
                       {"ratio_high", 3.0, positive()}},
                      run_generator};
    m["feller"] = {{dim_param(),
                    {"schedule", "rho-shift", choice({"rho-shift", "add-far", "d1-shift"})},
                    {"site", 0, integer(0, 1'000'000)},
                    {"steps", 10, integer(1, 30)},
                    {"a", 0.5, number(0.0, 1.0, false, true)},
                    {"s", 1.0, positive()},
                    {"center", nullptr, nullable(number_list(false))},
                    {"t", 0.5, t_check},
                    {"i_max", 20, integer(1, 64)},
                    {"ratio", 1e-3, number(0.0, 1.0, true)},
                    config_param()},
                   run_feller};
    m["rho"] = {{dim_param(), config_param("a"), config_param("b")}, run_rho};
    m["flat-metric"] = {
        {dim_param(), config_param("a"), config_param("b"), {"i_max", 20, integer(1, 64)}, {"n_max", 20, integer(1, 64)}},
        run_flat_metric};
    m["ktransform"] = {{dim_param(),
                        {"instances", 100, integer(1, 100'000)},
                        {"max_order", 6, integer(0, 6)},
                        {"max_points", 6, integer(0, 6)},
                        {"tolerance", 1e-9, positive()}},
                       run_ktransform};
    m["correlation"] = {{dim_param(),
                         {"instances", 50, integer(1, 100'000)},
                         {"gamma_size", 10, integer(1, 10)},
                         {"n_max", 5, integer(1, 5)},
                         {"t", 0.3, t_check},
                         {"tolerance", 1e-9, positive()}},
                        run_correlation};
    m["permanent"] = {{dim_param(),
                       {"instances", 50, integer(1, 100'000)},
                       {"n_max", 6, integer(1, 8)},
                       {"t", 0.3, t_check},
                       {"tolerance", 1e-10, positive()}},
                      run_permanent};
    m["process"] = {{dim_param(),
                     config_param(),
                     {"horizon", 1.0, t_check},
                     {"dt", 0.01, t_check},
                     {"n", 1, integer(1, 1000)},
                     {"dt_coarse", 1e-2, t_check},
                     {"dt_fine", 1e-3, t_check},
                     {"refinement_replicas", 100, integer(1, 1'000'000)}},
                    run_process};
    const Json battery = Json::array({ordered({{"dim", 1}, {"delta", 0.01}, {"r", 1.0}}),
                                      ordered({{"dim", 1}, {"delta", 0.05}, {"r", 1.0}}),
                                      ordered({{"dim", 2}, {"delta", 0.01}, {"r", 1.2}}),
                                      ordered({{"dim", 2}, {"delta", 0.04}, {"r", 1.4}}),
                                      ordered({{"dim", 3}, {"delta", 0.01}, {"r", 1.4}}),
                                      ordered({{"dim", 3}, {"delta", 0.02}, {"r", 2.0}})});
    m["oscillation"] = {{{"battery", battery,
                          array_of_objects({{"dim", 1, integer(1, 6)}, {"delta", 0.01, positive()}, {"r", 1.0, positive()}})},
                         {"a", 0.0, number(0.0, 1e9)},
                         {"steps", 64, integer(64, 100'000)}},
                        run_oscillation};
    m["collision"] = {{dim_param(),
                       config_param(),
                       {"separation", 0.5, positive()},
                       {"horizon", 1.0, t_check},
                       {"dt", 1e-3, t_check},
                       {"epsilons", Json::array({0.1, 0.01, 0.001}), number_list(true)},
                       {"final_max", 0.01, positive()}},
                      run_collision};
    const Json combos = Json::array({ordered({{"dim", 1}, {"t", 0.1}, {"r", 0.5}}),
                                     ordered({{"dim", 1}, {"t", 1.0}, {"r", 2.0}}),
                                     ordered({{"dim", 1}, {"t", 0.25}, {"r", 0.1}}),
                                     ordered({{"dim", 2}, {"t", 0.1}, {"r", 0.5}}),
                                     ordered({{"dim", 2}, {"t", 0.5}, {"r", 1.5}}),
                                     ordered({{"dim", 2}, {"t", 1.0}, {"r", 4.0}}),
                                     ordered({{"dim", 3}, {"t", 0.1}, {"r", 0.6}}),
                                     ordered({{"dim", 3}, {"t", 0.25}, {"r", 1.0}}),
                                     ordered({{"dim", 3}, {"t", 1.0}, {"r", 3.0}}),
                                     ordered({{"dim", 5}, {"t", 0.5}, {"r", 2.5}})});
    m["tail-tau"] = {{{"combos", combos,
                       array_of_objects({{"dim", 1, integer(1, 10)}, {"t", 0.1, positive()}, {"r", 0.5, number(0.0, 1e9)}})},
                      {"delta", 0.25, positive()},
                      {"r_max", 20.0, positive()},
                      {"certificate_dims", Json::array({1, 2, 3}), any()}},
                     run_tail_tau};
    return m;
  }();
  return specs;
}

void cross_checks(const std::string& name, const Json& p, std::vector<std::string>& errors) {
  const int dim = p.contains("dim") && p["dim"].is_number_integer() ? p["dim"].get<int>() : 0;
  for (const char* key : {"configuration", "a", "b"}) {
    if (!p.contains(key) || p[key].is_null() || (std::string(key) != "configuration" && !(name == "rho" || name == "flat-metric"))) {
      continue;
    }
    try {
      if (dim > 0 && parse_configuration(p[key], dim).dim() != dim) {
        errors.push_back(std::string("params.") + key + ": dimension differs from params.dim");
      }
    } catch (const std::exception&) {
      // already reported by the field check
    }
  }
  if (p.contains("center") && p["center"].is_array() && dim > 0 && static_cast<int>(p["center"].size()) != dim) {
    errors.push_back("params.center: must have params.dim entries");
  }
  if (name == "invariance" && p["outer_radius"].is_number() && p["inner_radius"].is_number() &&
      !(p["outer_radius"].get<double>() > p["inner_radius"].get<double>())) {
    errors.push_back("params.outer_radius: must exceed params.inner_radius");
  }
  if (name == "process" && p["dt_fine"].is_number() && p["dt_coarse"].is_number() &&
      !(p["dt_fine"].get<double>() < p["dt_coarse"].get<double>())) {
    errors.push_back("params.dt_fine: must be smaller than params.dt_coarse");
  }
  for (const char* key : {"horizon"}) {
    if (p.contains(key) && p.contains("dt") && p[key].is_number() && p["dt"].is_number() &&
        p[key].get<double>() < p["dt"].get<double>()) {
      errors.push_back("params.horizon: must be >= params.dt");
    }
  }
  if (name == "generator" && p["weights"].is_array()) {
    const std::size_t n = p["test_functions"].is_array() ? p["test_functions"].size() : 2;
    if (p["weights"].size() != n) errors.push_back("params.weights: need one weight per test function");
    for (const auto& w : p["weights"]) {
      if (!w.is_number()) errors.push_back("params.weights: entries must be numbers");
    }
  }
  if (name == "tail-tau" && p["certificate_dims"].is_array()) {
    for (const auto& d : p["certificate_dims"]) {
      if (!d.is_number_integer() || d.get<int>() < 1 || d.get<int>() > 10) {
        errors.push_back("params.certificate_dims: entries must be integers in [1, 10]");
        break;
      }
    }
  } else if (name == "tail-tau") {
    errors.push_back("params.certificate_dims: must be an array");
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"sample-poisson", "diffuse",     "semigroup-exp", "invariance",
                                                 "generator",      "feller",      "rho",           "flat-metric",
                                                 "ktransform",     "correlation", "permanent",     "process",
                                                 "oscillation",    "collision",   "tail-tau"};
  return names;
}

Json ExperimentConfig::effective() const {
  Json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["replicas"] = replicas;
  j["params"] = params;
  return j;
}

Validation validate_config(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    return {std::nullopt, {std::string("syntax error: ") + e.what()}};
  }
  return validate_document(doc);
}

Validation validate_document(const Json& doc) {
  Validation out;
  auto& errors = out.errors;
  if (!doc.is_object()) return {std::nullopt, {"config must be a JSON object"}};
  for (const auto& [key, value] : doc.items()) {
    if (key != "experiment" && key != "params" && key != "seed" && key != "replicas" && key != "output") {
      errors.push_back(key + ": unknown key");
    }
  }
  ExperimentConfig cfg;
  const Spec* spec = nullptr;
  if (!doc.contains("experiment")) {
    errors.push_back("experiment: missing");
  } else if (!doc["experiment"].is_string() || !registry().contains(doc["experiment"].get<std::string>())) {
    errors.push_back("experiment: unknown experiment " + doc["experiment"].dump());
  } else {
    cfg.experiment = doc["experiment"].get<std::string>();
    spec = &registry().at(cfg.experiment);
  }
  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned() || (doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0)) {
      cfg.seed = doc["seed"].get<std::uint64_t>();
    } else {
      errors.push_back("seed: must be a non-negative 64-bit integer (got " + doc["seed"].dump() + ")");
    }
  }
  if (doc.contains("replicas")) {
    if (auto e = integer(2, 1'000'000'000)(doc["replicas"])) {
      errors.push_back("replicas: " + *e);
    } else {
      cfg.replicas = doc["replicas"].get<std::uint64_t>();
    }
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string() || doc["output"].get<std::string>().empty()) {
      errors.push_back("output: must be a non-empty string");
    } else {
      cfg.output = doc["output"].get<std::string>();
    }
  }
  Json given = doc.contains("params") ? doc["params"] : Json::object();
  if (!given.is_object()) {
    errors.push_back("params: must be an object");
    given = Json::object();
  }
  if (spec != nullptr) {
    for (const auto& [key, value] : given.items()) {
      if (std::ranges::none_of(spec->params, [&](const Param& p) { return p.name == key; })) {
        errors.push_back("params." + key + ": unknown parameter for " + cfg.experiment);
      }
    }
    Json resolved = Json::object();
    for (const Param& p : spec->params) {
      const Json& v = given.contains(p.name) ? given[p.name] : p.fallback;
      if (auto e = p.check(v)) errors.push_back("params." + p.name + ": " + *e);
      resolved[p.name] = v;
    }
    cross_checks(cfg.experiment, resolved, errors);
    cfg.params = std::move(resolved);
  }
  if (errors.empty()) out.config = std::move(cfg);
  return out;
}

void apply_override(Json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) throw InputError("override must look like key=value");
  std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  if (key == "experiment" || key == "seed" || key == "replicas" || key == "output") {
    doc[key] = std::move(value);
    return;
  }
  if (key.starts_with("params.")) key = key.substr(7);
  if (key.empty()) throw InputError("override must name a parameter");
  doc["params"][key] = std::move(value);
}

Report run(const ExperimentConfig& config, unsigned threads) {
  const auto it = registry().find(config.experiment);
  if (it == registry().end()) throw InputError("unknown experiment " + config.experiment);
  return it->second.run(config, threads == 0 ? 1 : threads);
}

int run_experiment(const ExperimentConfig& config, unsigned threads) {
  const Report rep = run(config, threads);
  rep.write(config.output);
  return rep.verdict() == Verdict::kPass ? 0 : 1;
}

}  // namespace confheat::experiment
