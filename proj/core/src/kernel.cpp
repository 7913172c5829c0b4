#include "confheat/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "confheat/error.hpp"
#include "confheat/geometry.hpp"
#include "confheat/special.hpp"

namespace confheat::kernel {

void HeatKernelParams::validate() const {
  if (dim < 1) throw InputError("heat kernel: dimension must be >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("heat kernel: time must be positive and finite");
}

double HeatKernelParams::displacement_sd() const { return std::sqrt(2.0 * t); }

double density_at_distance(const HeatKernelParams& params, double r) {
  params.validate();
  if (!std::isfinite(r)) throw InputError("heat kernel: non-finite distance");
  const double norm = std::pow(4.0 * std::numbers::pi * params.t, -0.5 * params.dim);
  return norm * std::exp(-r * r / (4.0 * params.t));
}

double density(const HeatKernelParams& params, std::span<const double> x, std::span<const double> y) {
  params.validate();
  require_finite_point(x, params.dim, "density");
  require_finite_point(y, params.dim, "density");
  const double norm = std::pow(4.0 * std::numbers::pi * params.t, -0.5 * params.dim);
  return norm * std::exp(-squared_distance(x, y) / (4.0 * params.t));
}

void sample_transition(const HeatKernelParams& params, std::span<const double> x, RandomStream& rng,
                       std::span<double> out) {
  params.validate();
  require_finite_point(x, params.dim, "sample_transition");
  const double sd = params.displacement_sd();
  for (int k = 0; k < params.dim; ++k) out[k] = x[k] + sd * rng.normal();
}

std::vector<double> sample_transition(const HeatKernelParams& params, std::span<const double> x,
                                      RandomStream& rng) {
  std::vector<double> out(static_cast<std::size_t>(params.dim));
  sample_transition(params, x, rng, out);
  return out;
}

double tail_mass(const HeatKernelParams& params, double r) {
  params.validate();
  if (!(r >= 0.0)) throw InputError("tail_mass: radius must be nonnegative");
  if (r == 0.0) return 1.0;
  return special::gamma_q(0.5 * params.dim, r * r / (4.0 * params.t));
}

double tau(int dim, double delta, double r) { return tail_mass({dim, delta}, r); }

BoundReport verify_dominating_bound(const HeatKernelParams& params, std::span<const GridPoint> grid,
                                    const BoundCertificate& cert) {
  params.validate();
  if (grid.empty()) throw InputError("verify_dominating_bound: empty grid");
  if (!(cert.c_t > 0.0) || !(cert.eps_t > 0.0)) {
    throw InputError("verify_dominating_bound: certificate constants must be positive");
  }
  if (cert.theta_t && !(*cert.theta_t > 0.0 && *cert.theta_t < params.t)) {
    throw InputError("verify_dominating_bound: theta_t must lie in (0, t)");
  }
  BoundReport report;
  for (const GridPoint& g : grid) {
    if (!(g.s > 0.0) || !(g.r >= 0.0)) throw InputError("verify_dominating_bound: bad grid point");
    if (cert.theta_t && std::abs(g.s - params.t) >= *cert.theta_t) {
      throw InputError("verify_dominating_bound: grid time " + std::to_string(g.s) +
                       " outside (t - theta_t, t + theta_t)");
    }
    // Compare in log space; exp(-r^{1+ε}) underflows long before the ratio does.
    const double log_p = -0.5 * params.dim * std::log(4.0 * std::numbers::pi * g.s) - g.r * g.r / (4.0 * g.s);
    const double log_bound = std::log(cert.c_t) - std::pow(g.r, 1.0 + cert.eps_t);
    const double ratio = std::exp(log_p - log_bound);
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_point = g;
    }
  }
  report.pass = report.worst_ratio <= 1.0;
  if (cert.tail_constant) {
    report.tail_checked = true;
    for (const GridPoint& g : grid) {
      const double ratio = tau(params.dim, cert.tail_delta, g.r) * std::exp(g.r) / *cert.tail_constant;
      if (ratio > report.tail_worst_ratio) {
        report.tail_worst_ratio = ratio;
        report.tail_worst_r = g.r;
      }
    }
    report.tail_pass = report.tail_worst_ratio <= 1.0;
  }
  return report;
}

BoundCertificate make_certificate(const HeatKernelParams& params, double eps,
                                  std::optional<double> theta, std::span<const GridPoint> grid,
                                  double tail_delta, std::span<const double> tail_r_grid,
                                  double margin) {
  params.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("make_certificate: eps must lie in (0, 1)");
  if (grid.empty()) throw InputError("make_certificate: empty grid");
  if (!(margin >= 1.0)) throw InputError("make_certificate: margin must be >= 1");
  BoundCertificate cert;
  cert.eps_t = eps;
  cert.theta_t = theta;
  double log_sup = -INFINITY;
  for (const GridPoint& g : grid) {
    const double log_p = -0.5 * params.dim * std::log(4.0 * std::numbers::pi * g.s) - g.r * g.r / (4.0 * g.s);
    log_sup = std::max(log_sup, log_p + std::pow(g.r, 1.0 + eps));
  }
  cert.c_t = margin * std::exp(log_sup);
  if (!tail_r_grid.empty()) {
    if (!(tail_delta > 0.0)) throw InputError("make_certificate: tail delta must be positive");
    double sup = 0.0;
    for (double r : tail_r_grid) sup = std::max(sup, tau(params.dim, tail_delta, r) * std::exp(r));
    cert.tail_constant = margin * sup;
    cert.tail_delta = tail_delta;
  }
  return cert;
}

double convolved_density(const HeatKernelParams& params_t, const HeatKernelParams& params_s,
                         std::span<const double> x, std::span<const double> y) {
  params_t.validate();
  params_s.validate();
  if (params_t.dim != params_s.dim) throw InputError("chapman_kolmogorov: dimension mismatch");
  // N(0, 2t) * N(0, 2s) = N(0, 2(t+s)) coordinatewise.
  const double variance = 2.0 * params_t.t + 2.0 * params_s.t;
  const double norm = std::pow(2.0 * std::numbers::pi * variance, -0.5 * params_t.dim);
  return norm * std::exp(-squared_distance(x, y) / (2.0 * variance));
}

double chapman_kolmogorov_residual(const HeatKernelParams& params_t, const HeatKernelParams& params_s,
                                   std::span<const double> x, std::span<const double> y) {
  const double composed = convolved_density(params_t, params_s, x, y);
  const double direct = density({params_t.dim, params_t.t + params_s.t}, x, y);
  return std::abs(composed - direct);
}

double exponential_domination_constant(const HeatKernelParams& params, double eps) {
  params.validate();
  // max_r -r^2/4t + a r at r = 2 a t gives a^2 t.
  const double a = 1.0 + eps;
  return std::pow(4.0 * std::numbers::pi * params.t, -0.5 * params.dim) * std::exp(a * a * params.t);
}

}  // namespace confheat::kernel
