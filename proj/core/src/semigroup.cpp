#include "confheat/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "confheat/error.hpp"
#include "confheat/kernel.hpp"
#include "confheat/metrics.hpp"
#include "confheat/parallel.hpp"
#include "confheat/quadrature.hpp"
#include "confheat/special.hpp"

namespace confheat::semigroup {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr double kGaussianCut = 12.0;

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sequential Welford pass: the reduction order is the replica order.
Moments moments(std::span<const double> values) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double delta = values[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (values[i] - mean);
  }
  Moments out{mean, 0.0};
  if (values.size() > 1) {
    out.std_error = std::sqrt(m2 / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  }
  return out;
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double box_profile(const SmoothedBox& box, double y) {
  return logistic((box.radius + y) / box.width) * logistic((box.radius - y) / box.width);
}

double standard_normal_density(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// ∫ f(x + sd z) φ(z) dz over |z| ≤ 12.
double gaussian_smooth(const std::function<double(double)>& f, double x, double sd) {
  return quadrature::integrate_adaptive(
      [&](double z) { return f(x + sd * z) * standard_normal_density(z); }, -kGaussianCut, kGaussianCut,
      kQuadratureTolerance);
}

void validate_exp_shape(const ExpFunctional::Shape& shape) {
  std::visit(
      [](const auto& s) {
        if (!(s.a > 0.0 && s.a < 1.0) && s.a != 0.0) {
          throw InputError("ExpFunctional: amplitude a must lie in [0, 1)");
        }
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GaussianBump>) {
          if (!(s.s > 0.0)) throw InputError("ExpFunctional: bump width must be positive");
        } else {
          if (!(s.radius > 0.0) || !(s.width > 0.0)) {
            throw InputError("ExpFunctional: box radius and smoothing width must be positive");
          }
        }
      },
      shape);
}

double bump_offset2(const GaussianBump& b, std::span<const double> x) {
  if (b.center.empty()) return squared_norm(x);
  if (b.center.size() != x.size()) throw InputError("ExpFunctional: center dimension mismatch");
  return squared_distance(x, b.center);
}

}  // namespace

SemigroupEstimate apply_mc(const Functional& f, const Configuration& gamma, double t, const McOptions& options) {
  if (options.replicas < 2) throw InputError("apply_mc: need at least 2 replicas");
  if (!(t > 0.0)) throw InputError("apply_mc: t must be positive");
  std::vector<double> values(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t r) {
    const Configuration moved = points::diffuse(gamma, t, options.seed, static_cast<std::uint32_t>(r), options.pad);
    const double v = f(moved);
    if (!std::isfinite(v)) {
      throw EvaluationError("apply_mc: functional returned a non-finite value at replica " + std::to_string(r));
    }
    values[r] = v;
  });
  const Moments m = moments(values);
  SemigroupEstimate out;
  out.mean = m.mean;
  out.std_error = m.std_error;
  out.replicas = options.replicas;
  out.seed = options.seed;
  out.route = "mc";
  const double pad = options.pad.value_or(points::default_pad(gamma.dim(), t));
  std::ostringstream note;
  note << "window " << gamma.window_radius() << " -> " << gamma.window_radius() + pad
       << "; per-particle mass beyond pad " << kernel::tail_mass({gamma.dim(), t}, pad);
  out.truncation_note = note.str();
  return out;
}

ExpFunctional::ExpFunctional(Shape shape) : shape_(std::move(shape)) { validate_exp_shape(shape_); }

double ExpFunctional::phi(std::span<const double> x) const {
  if (const auto* b = std::get_if<GaussianBump>(&shape_)) {
    return -b->a * std::exp(-bump_offset2(*b, x) / (2.0 * b->s * b->s));
  }
  const auto& box = std::get<SmoothedBox>(shape_);
  double p = box.a;
  for (double v : x) p *= box_profile(box, v);
  return -p;
}

double ExpFunctional::operator()(const Configuration& gamma) const {
  double value = 1.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    value *= std::pow(1.0 + phi(gamma.position(i)), gamma.multiplicity(i));
  }
  return value;
}

double ExpFunctional::heat_phi(std::span<const double> x, double t) const {
  if (!(t > 0.0)) throw InputError("heat_phi: t must be positive");
  if (const auto* b = std::get_if<GaussianBump>(&shape_)) {
    const double s2 = b->s * b->s;
    const double v = s2 + 2.0 * t;
    const double d = static_cast<double>(x.size());
    return -b->a * std::pow(s2 / v, 0.5 * d) * std::exp(-bump_offset2(*b, x) / (2.0 * v));
  }
  const auto& box = std::get<SmoothedBox>(shape_);
  const double sd = std::sqrt(2.0 * t);
  double p = box.a;
  for (double v : x) p *= gaussian_smooth([&](double y) { return box_profile(box, y); }, v, sd);
  return -p;
}

double ExpFunctional::heat_phi_composed(std::span<const double> x, double t, double s) const {
  if (!(t > 0.0) || !(s > 0.0)) throw InputError("heat_phi_composed: times must be positive");
  if (const auto* b = std::get_if<GaussianBump>(&shape_)) {
    // First step gives a bump of variance s² + 2t and amplitude factor; then convolve again.
    const double d = static_cast<double>(x.size());
    const double s2 = b->s * b->s;
    const double v1 = s2 + 2.0 * t;
    const double a1 = b->a * std::pow(s2 / v1, 0.5 * d);
    const double v2 = v1 + 2.0 * s;
    return -a1 * std::pow(v1 / v2, 0.5 * d) * std::exp(-bump_offset2(*b, x) / (2.0 * v2));
  }
  const auto& box = std::get<SmoothedBox>(shape_);
  const double sd_t = std::sqrt(2.0 * t);
  const double sd_s = std::sqrt(2.0 * s);
  auto once = [&](double y) { return gaussian_smooth([&](double u) { return box_profile(box, u); }, y, sd_t); };
  double p = box.a;
  for (double v : x) p *= gaussian_smooth(once, v, sd_s);
  return -p;
}

std::string ExpFunctional::route() const {
  return std::holds_alternative<GaussianBump>(shape_) ? "closed-form" : "adaptive-quadrature";
}

double apply_exact_exponential(const ExpFunctional& ef, const Configuration& gamma, double t) {
  double value = 1.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    value *= std::pow(1.0 + ef.heat_phi(gamma.position(i), t), gamma.multiplicity(i));
  }
  return value;
}

double apply_exact_exponential_composed(const ExpFunctional& ef, const Configuration& gamma, double t, double s) {
  double value = 1.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    value *= std::pow(1.0 + ef.heat_phi_composed(gamma.position(i), t, s), gamma.multiplicity(i));
  }
  return value;
}

harmonic::DClassCertificate lifted_certificate(const harmonic::DClassCertificate& cert, double t, int dim) {
  const double half = 0.5 * cert.eps;
  const double c_t = kernel::exponential_domination_constant({dim, t}, half);
  const double mass = special::unit_sphere_area(dim) * std::tgamma(static_cast<double>(dim)) / std::pow(half, dim);
  return {cert.c * c_t * mass, half};
}

harmonic::KernelFunction lift_kernel(const harmonic::KernelFunction& g, double t, int dim) {
  if (!(t > 0.0)) throw InputError("lift_kernel: t must be positive");
  if (!g.factor()) throw CapabilityError("lift_kernel: only built-in product kernels can be lifted");
  harmonic::ProductFactor lifted = std::visit(
      [&](const auto& f) -> harmonic::ProductFactor {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, harmonic::UnitFactor>) {
          return f;
        } else if constexpr (std::is_same_v<F, harmonic::GaussianFactor>) {
          const double v = f.width2 + 2.0 * t;
          return harmonic::GaussianFactor{f.center, v, f.amplitude * std::pow(f.width2 / v, 0.5 * dim)};
        } else {
          return harmonic::BoxFactor{f.dim, f.half_width, f.smoothing_t + t};
        }
      },
      *g.factor());
  harmonic::KernelFunction out = harmonic::KernelFunction::product(std::move(lifted), g.coefficients());
  out.d_class = g.d_class ? std::optional(lifted_certificate(*g.d_class, t, dim)) : std::nullopt;
  return out;
}

InvarianceReport invariance_test(const LocalFunctional& f, const points::Window& outer, int dim, double t,
                                 double tolerance, const McOptions& options) {
  outer.validate();
  if (!(t > 0.0)) throw InputError("invariance_test: t must be positive");
  if (options.replicas < 2) throw InputError("invariance_test: need at least 2 replicas");
  const double pad = outer.radius - f.inner_radius;
  if (!(pad > 0.0)) throw ConfigurationError("invariance_test: outer window must be larger than the inner window");
  const points::Window inner{f.inner_radius, outer.intensity};
  InvarianceReport out;
  out.leakage_bound = f.sensitivity * outer.intensity * inner.volume(dim) * kernel::tail_mass({dim, t}, pad);
  if (out.leakage_bound > tolerance) {
    std::ostringstream msg;
    msg << "invariance_test: leakage bound " << out.leakage_bound << " exceeds tolerance " << tolerance
        << " (pad " << pad << " too small)";
    throw ConfigurationError(msg.str());
  }
  std::vector<double> before(options.replicas), after(options.replicas), diff(options.replicas);
  parallel_for(options.replicas, options.threads, [&](std::size_t r) {
    const auto replica = static_cast<std::uint32_t>(r);
    const Configuration gamma = points::sample_poisson(outer, dim, options.seed, replica);
    const Configuration moved = points::diffuse(gamma, t, options.seed, replica);
    before[r] = f.f(gamma);
    after[r] = f.f(moved);
    if (!std::isfinite(before[r]) || !std::isfinite(after[r])) {
      throw EvaluationError("invariance_test: non-finite functional value at replica " + std::to_string(r));
    }
    diff[r] = after[r] - before[r];
  });
  out.mean_before = moments(before).mean;
  out.mean_after = moments(after).mean;
  const Moments d = moments(diff);
  out.difference = d.mean;
  out.std_error = d.std_error;
  out.replicas = options.replicas;
  out.pass = std::abs(out.difference) <= 4.0 * out.std_error + out.leakage_bound;
  return out;
}

// ---------------------------------------------------------------------------

double TestFunction::value(std::span<const double> x) const {
  const double r2 = center.empty() ? squared_norm(x) : squared_distance(x, center);
  return a * std::exp(-r2 / (2.0 * s * s));
}

void TestFunction::gradient(std::span<const double> x, std::span<double> out) const {
  const double v = value(x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double c = center.empty() ? 0.0 : center[k];
    out[k] = -v * (x[k] - c) / (s * s);
  }
}

double TestFunction::laplacian(std::span<const double> x) const {
  const double r2 = center.empty() ? squared_norm(x) : squared_distance(x, center);
  const double s2 = s * s;
  return value(x) * (r2 / (s2 * s2) - static_cast<double>(x.size()) / s2);
}

namespace {

double ridge(std::span<const double> w, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += w[j] * u[j];
  return s;
}

// h, h', h'' of the scalar profile of a ridge kind.
std::array<double, 3> profile(OuterFunction::Kind kind, double z) {
  switch (kind) {
    case OuterFunction::Kind::kLinear: return {z, 1.0, 0.0};
    case OuterFunction::Kind::kExponential: return {std::exp(z), std::exp(z), std::exp(z)};
    case OuterFunction::Kind::kSine: return {std::sin(z), std::cos(z), -std::sin(z)};
    case OuterFunction::Kind::kQuadratic: return {0.5 * z * z, z, 1.0};
    case OuterFunction::Kind::kProduct: break;
  }
  throw InputError("OuterFunction: product kind has no ridge profile");
}

}  // namespace

double OuterFunction::value(std::span<const double> u) const {
  if (kind == Kind::kProduct) {
    double p = 1.0;
    for (double v : u) p *= v;
    return p;
  }
  return profile(kind, ridge(weights, u))[0];
}

void OuterFunction::gradient(std::span<const double> u, std::span<double> out) const {
  if (kind == Kind::kProduct) {
    for (std::size_t j = 0; j < u.size(); ++j) {
      double p = 1.0;
      for (std::size_t k = 0; k < u.size(); ++k) {
        if (k != j) p *= u[k];
      }
      out[j] = p;
    }
    return;
  }
  const double h1 = profile(kind, ridge(weights, u))[1];
  for (std::size_t j = 0; j < u.size(); ++j) out[j] = h1 * weights[j];
}

void OuterFunction::hessian(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = u.size();
  if (kind == Kind::kProduct) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double p = i == j ? 0.0 : 1.0;
        for (std::size_t k = 0; k < n && p != 0.0; ++k) {
          if (k != i && k != j) p *= u[k];
        }
        out[i * n + j] = p;
      }
    }
    return;
  }
  const double h2 = profile(kind, ridge(weights, u))[2];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = h2 * weights[i] * weights[j];
  }
}

namespace {

bool close(double analytic, double numeric) {
  return std::abs(analytic - numeric) <= 1e-5 * std::max(1.0, std::abs(analytic));
}

void check_outer(const OuterFunction& g, std::size_t n) {
  for (double base : {0.3, -0.7, 1.1}) {
    std::vector<double> u(n), grad(n), hess(n * n), gp(n), gm(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = base * (1.0 + 0.25 * static_cast<double>(j));
    g.gradient(u, grad);
    g.hessian(u, hess);
    constexpr double h = 1e-5;
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> up = u, um = u;
      up[j] += h;
      um[j] -= h;
      if (!close(grad[j], (g.value(up) - g.value(um)) / (2 * h))) {
        throw InputError("CylinderFunction: outer gradient disagrees with finite differences");
      }
      g.gradient(up, gp);
      g.gradient(um, gm);
      for (std::size_t i = 0; i < n; ++i) {
        if (!close(hess[i * n + j], (gp[i] - gm[i]) / (2 * h))) {
          throw InputError("CylinderFunction: outer Hessian disagrees with finite differences");
        }
      }
    }
  }
}

void check_inner(const TestFunction& phi, int dim) {
  if (!(phi.s > 0.0)) throw InputError("CylinderFunction: test function width must be positive");
  if (!phi.center.empty() && static_cast<int>(phi.center.size()) != dim) {
    throw InputError("CylinderFunction: test function center has the wrong dimension");
  }
  for (double base : {0.2, -0.45, 0.9}) {
    std::vector<double> x(static_cast<std::size_t>(dim)), grad(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = base * (1.0 - 0.3 * static_cast<double>(k)) * phi.s;
    phi.gradient(x, grad);
    double lap = 0.0;
    constexpr double h1 = 1e-6, h2 = 1e-3;
    for (std::size_t k = 0; k < x.size(); ++k) {
      std::vector<double> xp = x, xm = x, xp2 = x, xm2 = x;
      xp[k] += h1 * phi.s;
      xm[k] -= h1 * phi.s;
      xp2[k] += h2 * phi.s;
      xm2[k] -= h2 * phi.s;
      if (!close(grad[k], (phi.value(xp) - phi.value(xm)) / (2 * h1 * phi.s))) {
        throw InputError("CylinderFunction: test-function gradient disagrees with finite differences");
      }
      lap += (phi.value(xp2) - 2 * phi.value(x) + phi.value(xm2)) / (h2 * h2 * phi.s * phi.s);
    }
    if (!close(phi.laplacian(x), lap)) {
      throw InputError("CylinderFunction: test-function Laplacian disagrees with finite differences");
    }
  }
}

}  // namespace

CylinderFunction::CylinderFunction(OuterFunction outer, std::vector<TestFunction> inner, int dim)
    : outer_(std::move(outer)), inner_(std::move(inner)), dim_(dim) {
  if (inner_.empty()) throw InputError("CylinderFunction: need at least one test function");
  if (dim_ < 1) throw InputError("CylinderFunction: dimension must be >= 1");
  if (outer_.kind != OuterFunction::Kind::kProduct && outer_.weights.size() != inner_.size()) {
    throw InputError("CylinderFunction: outer weights must match the number of test functions");
  }
  check_outer(outer_, inner_.size());
  for (const auto& phi : inner_) check_inner(phi, dim_);
}

double CylinderFunction::operator()(const PointSet& particles) const {
  std::vector<double> u(inner_.size(), 0.0);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (std::size_t j = 0; j < inner_.size(); ++j) u[j] += inner_[j].value(particles[i]);
  }
  return outer_.value(u);
}

double CylinderFunction::operator()(const Configuration& gamma) const { return (*this)(gamma.particles()); }

double CylinderFunction::dirichlet_operator(const Configuration& gamma) const {
  const std::size_t n = inner_.size();
  const PointSet particles = gamma.particles();
  std::vector<double> u(n, 0.0), lap(n, 0.0), cross(n * n, 0.0);
  std::vector<std::vector<double>> grads(n, std::vector<double>(static_cast<std::size_t>(dim_)));
  for (std::size_t p = 0; p < particles.size(); ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      u[j] += inner_[j].value(particles[p]);
      lap[j] += inner_[j].laplacian(particles[p]);
      inner_[j].gradient(particles[p], grads[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double dot = 0.0;
        for (int k = 0; k < dim_; ++k) dot += grads[i][static_cast<std::size_t>(k)] * grads[j][static_cast<std::size_t>(k)];
        cross[i * n + j] += dot;
      }
    }
  }
  std::vector<double> grad(n), hess(n * n);
  outer_.gradient(u, grad);
  outer_.hessian(u, hess);
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) value -= hess[i * n + j] * cross[i * n + j];
    value -= grad[i] * lap[i];
  }
  return value;
}

double CylinderFunction::dirichlet_operator_half_laplacian(const Configuration& gamma) const {
  return 0.5 * dirichlet_operator(gamma);
}

GeneratorReport generator_residual(const CylinderFunction& f, const Configuration& gamma,
                                   std::span<const double> t_list, const McOptions& options, double ratio_low,
                                   double ratio_high) {
  if (t_list.empty()) throw InputError("generator_residual: empty t_list");
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    if (!(t_list[k] > 0.0)) throw InputError("generator_residual: t values must be positive");
    if (k > 0 && !(t_list[k] < t_list[k - 1])) throw InputError("generator_residual: t_list must be decreasing");
  }
  if (options.replicas < 2) throw InputError("generator_residual: need at least 2 replicas");
  if (gamma.dim() != f.dim()) throw InputError("generator_residual: dimension mismatch");

  const PointSet base = gamma.particles();
  const double f0 = f(base);
  const std::size_t nt = t_list.size();
  const std::size_t reps = options.replicas;
  std::vector<double> diffs(nt * reps);
  parallel_for(reps, options.threads, [&](std::size_t r) {
    std::vector<double> xi(base.coords().size());
    for (std::size_t p = 0; p < base.size(); ++p) {
      RandomStream rng(options.seed, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(p), StreamTag::kGenerator);
      for (int k = 0; k < f.dim(); ++k) xi[p * static_cast<std::size_t>(f.dim()) + static_cast<std::size_t>(k)] = rng.normal();
    }
    std::vector<double> plus(xi.size()), minus(xi.size());
    for (std::size_t k = 0; k < nt; ++k) {
      const double sd = std::sqrt(2.0 * t_list[k]);
      for (std::size_t c = 0; c < xi.size(); ++c) {
        plus[c] = base.coords()[c] + sd * xi[c];
        minus[c] = base.coords()[c] - sd * xi[c];
      }
      const double fp = f(PointSet(f.dim(), plus));
      const double fm = f(PointSet(f.dim(), minus));
      diffs[k * reps + r] = 0.5 * (fp + fm) - f0;
    }
  });

  GeneratorReport out;
  out.generator_value = f.dirichlet_operator(gamma);
  bool inconclusive = false;
  for (std::size_t k = 0; k < nt; ++k) {
    const Moments m = moments(std::span<const double>(diffs.data() + k * reps, reps));
    GeneratorRow row;
    row.t = t_list[k];
    row.quotient = -m.mean / t_list[k];
    row.std_error = m.std_error / t_list[k];
    row.residual = row.quotient - out.generator_value;
    if (row.std_error > 0.5 * std::abs(row.residual)) inconclusive = true;
    out.rows.push_back(row);
  }
  bool in_range = true;
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const double ratio = out.rows[k].residual / out.rows[k + 1].residual;
    out.ratios.push_back(ratio);
    if (!(ratio >= ratio_low && ratio <= ratio_high)) in_range = false;
  }
  out.verdict = inconclusive ? Verdict::kInconclusive : (in_range ? Verdict::kPass : Verdict::kFail);
  return out;
}

FellerReport feller_probe(const Functional& semigroup_value, const Configuration& gamma,
                          std::span<const Configuration> perturbations, const Metric& metric, double ratio,
                          std::string route) {
  if (perturbations.empty()) throw InputError("feller_probe: empty perturbation schedule");
  FellerReport out;
  out.route = std::move(route);
  const double base = semigroup_value(gamma);
  for (const Configuration& g : perturbations) {
    out.points.push_back({metric(g, gamma), std::abs(semigroup_value(g) - base)});
  }
  for (std::size_t j = 1; j < out.points.size(); ++j) {
    const double prev = out.points[j - 1].metric_gap;
    const double cur = out.points[j].metric_gap;
    if (!(cur < prev) && !(cur == 0.0 && prev == 0.0)) {
      throw InputError("feller_probe: metric gaps must decrease strictly along the schedule");
    }
  }
  const bool all_zero = std::ranges::all_of(out.points, [](const FellerPoint& p) { return p.value_gap == 0.0; });
  out.strictly_decreasing = true;
  for (std::size_t j = 1; j < out.points.size(); ++j) {
    if (!(out.points[j].value_gap < out.points[j - 1].value_gap)) out.strictly_decreasing = false;
  }
  const double first = out.points.front().value_gap;
  out.final_over_initial = first > 0.0 ? out.points.back().value_gap / first : 0.0;
  out.pass = all_zero || (out.strictly_decreasing && out.points.back().value_gap < ratio * first);
  return out;
}

}  // namespace confheat::semigroup

namespace confheat::semigroup {

namespace {

Configuration shifted(const Configuration& gamma, std::size_t site, double amount) {
  Configuration out(gamma.dim(), gamma.window_radius() + std::abs(amount));
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    std::vector<double> x(gamma.position(i).begin(), gamma.position(i).end());
    if (i == site) {
      // one particle of the site moves, the rest stay
      x[0] += amount;
      out.add(x, 1);
      if (gamma.multiplicity(i) > 1) out.add(gamma.position(i), gamma.multiplicity(i) - 1);
      continue;
    }
    out.add(x, gamma.multiplicity(i));
  }
  return out;
}

Configuration with_far_particle(const Configuration& gamma, double distance) {
  const auto d = static_cast<std::size_t>(gamma.dim());
  std::vector<double> x(d, -distance / std::sqrt(static_cast<double>(d)));
  Configuration out(gamma.dim(), std::max(gamma.window_radius(), distance));
  for (std::size_t i = 0; i < gamma.size(); ++i) out.add(gamma.position(i), gamma.multiplicity(i));
  out.add(x, 1);
  return out;
}

// Root of g(u) = target on [lo, hi] with g(lo) - target and g(hi) - target of opposite sign.
double bisect(const std::function<double(double)>& g, double target, double lo, double hi) {
  const bool increasing = g(hi) > g(lo);
  for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) < target) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<Configuration> feller_schedule(const Configuration& gamma, FellerSchedule schedule, std::size_t site,
                                           int steps, int i_max) {
  if (steps < 1) throw InputError("feller_schedule: steps must be >= 1");
  if (schedule != FellerSchedule::kAddFar && site >= gamma.size()) {
    throw InputError("feller_schedule: site index out of range");
  }
  std::vector<Configuration> out;
  for (int j = 1; j <= steps; ++j) {
    const double target = std::ldexp(1.0, -j);
    switch (schedule) {
      case FellerSchedule::kRhoShift:
        out.push_back(shifted(gamma, site, target));
        break;
      case FellerSchedule::kAddFar: {
        auto gap = [&](double dist) { return metrics::d1(with_far_particle(gamma, dist), gamma, i_max).value; };
        double hi = 1.0;
        while (gap(hi) > target && hi < 1e3) hi *= 2.0;
        if (gap(hi) > target) throw NumericalError("feller_schedule: cannot reach the requested d1 gap");
        out.push_back(with_far_particle(gamma, bisect(gap, target, 0.0, hi)));
        break;
      }
      case FellerSchedule::kD1Shift: {
        auto gap = [&](double amount) { return metrics::d1(shifted(gamma, site, amount), gamma, i_max).value; };
        double hi = target;
        while (gap(hi) < target && hi < 1e3) hi *= 2.0;
        if (gap(hi) < target) throw NumericalError("feller_schedule: cannot reach the requested d1 gap");
        out.push_back(shifted(gamma, site, bisect(gap, target, 0.0, hi)));
        break;
      }
    }
  }
  return out;
}

}  // namespace confheat::semigroup
