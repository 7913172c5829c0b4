#pragma once

#include <optional>
#include <span>
#include <vector>

#include "confheat/rng.hpp"

/// Gaussian heat kernel on R^d, p(t,x,y) = (4πt)^{-d/2} exp(-|x-y|^2 / 4t),
/// its tail masses and the dominating-bound certificates used by the
/// semigroup and process layers.
namespace confheat::kernel {

struct HeatKernelParams {
  int dim = 1;
  double t = 1.0;

  /// Throws InputError unless dim >= 1 and 0 < t < inf.
  void validate() const;
  /// Per-coordinate standard deviation of a transition, sqrt(2t).
  double displacement_sd() const;
};

double density(const HeatKernelParams& params, std::span<const double> x, std::span<const double> y);

/// Density as a function of r = |x - y|.
double density_at_distance(const HeatKernelParams& params, double r);

/// Writes x + sqrt(2t) ξ into `out`, ξ standard normal in R^d.
void sample_transition(const HeatKernelParams& params, std::span<const double> x, RandomStream& rng,
                       std::span<double> out);
std::vector<double> sample_transition(const HeatKernelParams& params, std::span<const double> x,
                                      RandomStream& rng);

/// Mass of p(t, x, ·) outside B(x, r): Q(d/2, r^2 / 4t).
double tail_mass(const HeatKernelParams& params, double r);

/// τ(δ, r) = sup_{t ≤ δ} sup_x tail mass outside B(x, r). The Gaussian tail is
/// increasing in t, so the supremum is attained at t = δ.
double tau(int dim, double delta, double r);

/// Constants for p(s,x,y) ≤ C_t exp(-|x-y|^{1+ε_t}) on s ∈ (t-ϑ_t, t+ϑ_t) and,
/// optionally, τ(δ̃, r) ≤ C e^{-r}.
struct BoundCertificate {
  double c_t = 1.0;
  double eps_t = 0.5;
  std::optional<double> theta_t;
  std::optional<double> tail_constant;  // C of the exponential tail condition
  double tail_delta = 0.25;             // δ̃
};

struct GridPoint {
  double s;
  double r;
};

struct BoundReport {
  bool pass = true;
  double worst_ratio = 0.0;  // max over the grid of p / bound
  GridPoint worst_point{0.0, 0.0};
  bool tail_checked = false;
  bool tail_pass = true;
  double tail_worst_ratio = 0.0;
  double tail_worst_r = 0.0;
};

/// Checks the kernel bound on every (s, r) pair and, when the certificate
/// carries a tail constant, τ(δ̃, r) ≤ C e^{-r} on the r values of the grid.
BoundReport verify_dominating_bound(const HeatKernelParams& params, std::span<const GridPoint> grid,
                                    const BoundCertificate& cert);

/// Grid search for the smallest constants on the given grids, inflated by
/// `margin` (1.1 = 10% safety). Requires 0 < eps < 1.
BoundCertificate make_certificate(const HeatKernelParams& params, double eps,
                                  std::optional<double> theta, std::span<const GridPoint> grid,
                                  double tail_delta, std::span<const double> tail_r_grid,
                                  double margin = 1.1);

/// |∫ p(t,x,z) p(s,z,y) dz - p(t+s,x,y)| with the convolution evaluated in
/// closed form (variances add).
double chapman_kolmogorov_residual(const HeatKernelParams& params_t, const HeatKernelParams& params_s,
                                   std::span<const double> x, std::span<const double> y);

/// Gaussian-convolution route used by the residual above.
double convolved_density(const HeatKernelParams& params_t, const HeatKernelParams& params_s,
                         std::span<const double> x, std::span<const double> y);

/// sup_r p(t, r) e^{(1+ε) r}: the C_t' with p_t(x,y) ≤ C_t' exp(-(1+ε)|x-y|).
double exponential_domination_constant(const HeatKernelParams& params, double eps);

}  // namespace confheat::kernel
