#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "confheat/geometry.hpp"
#include "confheat/points.hpp"

/// Harmonic analysis on finite configurations: K-transform, its inverse,
/// ⋆-convolution, Lebesgue-Poisson integration, correlation functions of the
/// kernel measures and the permanent kernel R_t.
namespace confheat::harmonic {

/// A finite configuration η ⊂ R^d; pairwise-distinct points.
using FiniteConfiguration = PointSet;

/// |G^(n)(x_1..x_n)| ≤ C^n exp(-(1+ε) Σ |x_k|) for all n ≥ 1.
struct DClassCertificate {
  double c = 1.0;
  double eps = 1.0;
};

/// Per-argument factor a·exp(-|x-c|² / (2 s²)).
struct GaussianFactor {
  std::vector<double> center;
  double width2 = 1.0;  // s²
  double amplitude = 1.0;
};

/// Per-argument factor P(x + sqrt(2 τ) ξ ∈ [-h, h]^d); τ = 0 is the sharp
/// indicator of the cube.
struct BoxFactor {
  int dim = 1;
  double half_width = 1.0;
  double smoothing_t = 0.0;
};

/// Per-argument factor 1.
struct UnitFactor {};

/// Built-in product families: G^(n)(x_1..x_n) = coeff_n Π_k factor(x_k).
using ProductFactor = std::variant<UnitFactor, GaussianFactor, BoxFactor>;

double evaluate_factor(const ProductFactor& factor, std::span<const double> x);

/// Graded symmetric function G = (G^(0), ..., G^(N)) on finite
/// configurations. Arguments are sorted lexicographically before a level is
/// evaluated, so levels see a canonical order and G is symmetric by
/// construction.
class KernelFunction {
 public:
  /// Level evaluator; receives a sorted point set of the level's size.
  using Level = std::function<double(const PointSet&)>;

  KernelFunction() = default;
  /// levels[n-1] evaluates G^(n), n = 1..N.
  KernelFunction(double value_at_empty, std::vector<Level> levels);

  /// coeffs[n] multiplies G^(n); N = coeffs.size() - 1.
  static KernelFunction product(ProductFactor factor, std::vector<double> coeffs);

  int max_order() const { return static_cast<int>(levels_.size()); }
  double value_at_empty() const { return value_at_empty_; }

  /// G(η); zero above max_order.
  double operator()(const PointSet& eta) const;
  /// Same, for arguments the caller guarantees to be sorted.
  double evaluate_sorted(const PointSet& eta) const;

  /// Present for built-in product families only.
  const std::optional<ProductFactor>& factor() const { return factor_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  std::optional<DClassCertificate> d_class;

 private:
  double value_at_empty_ = 0.0;
  std::vector<Level> levels_;
  std::optional<ProductFactor> factor_;
  std::vector<double> coeffs_;
};

/// Certificate for a product family: C = h · max_n |coeff_n|^{1/n} with
/// h = sup_x |factor(x)| e^{(1+ε)|x|}. Gaussian and sharp-box factors only.
std::optional<DClassCertificate> product_certificate(const ProductFactor& factor,
                                                     const std::vector<double>& coeffs, double eps);

struct CertificateCheck {
  bool pass = true;
  double worst_ratio = 0.0;
};

/// Checks |G^(n)| ≤ C^n exp(-(1+ε) Σ|x_k|) on every `order`-subset of grid points (n ≤ max_order).
CertificateCheck check_d_class(const KernelFunction& g, const DClassCertificate& cert, const PointSet& grid,
                               int max_checked_order);

/// Σ_{η ⋐ γ, |η| ≤ N} G(η) by exact subset enumeration. γ must be simple.
/// CapacityError if the number of subsets exceeds 2^30.
double k_transform(const KernelFunction& g, const PointSet& gamma);
double k_transform(const KernelFunction& g, const points::Configuration& gamma);

/// Σ_{θ ⊂ η} (-1)^{|η \ θ|} F(θ). CapacityError for |η| > 25.
double inverse_k_transform(const std::function<double(const PointSet&)>& f, const FiniteConfiguration& eta);

/// Σ over ordered 3-partitions (η1, η2, η3) of η of G1(η1 ∪ η2) G2(η2 ∪ η3).
/// CapacityError for |η| > 12.
double star_convolution(const KernelFunction& g1, const KernelFunction& g2, const FiniteConfiguration& eta);

/// G1 ⋆ G2 as a kernel function of order N1 + N2.
KernelFunction star_product(const KernelFunction& g1, const KernelFunction& g2);

/// How each n-fold integral of lebesgue_poisson_integral is computed.
struct IntegrationSpec {
  int radial_panels = 8;
  int angular = 32;
  int max_quadrature_order = 3;  // n above this uses Monte Carlo
  std::uint64_t mc_samples = 100'000;
  std::uint64_t seed = 0;
};

struct IntegralEstimate {
  double value = 0.0;
  double error_estimate = 0.0;       // quadrature refinement difference + MC standard errors
  double remainder_bound = 0.0;      // bound on the n > n_max part; +inf when unknown
  std::vector<double> level_values;  // (1/n!) ∫ G^(n) dσ^n for n = 0..n_max
  std::vector<std::string> warnings;
};

/// G^(0) + Σ_{n=1}^{n_max} (1/n!) ∫_{B(0,R)^n} G^(n) dσ^n with σ = z·Lebesgue.
IntegralEstimate lebesgue_poisson_integral(const KernelFunction& g, const points::Window& window, int dim,
                                           int n_max, const IntegrationSpec& spec = {});

/// k_t^(n)(θ) = Σ over injective (i_1..i_n) of Π_k p_t(x_{i_k}, y_k), with
/// particles of γ unfolded. Direct enumeration for n ≤ 5, partition
/// inclusion-exclusion above. Returns 0 when n exceeds the particle count.
double correlation_function(const points::Configuration& gamma, const FiniteConfiguration& theta, double t);
double correlation_function_enumeration(const points::Configuration& gamma, const FiniteConfiguration& theta,
                                        double t);
/// Möbius inversion over set partitions of θ: Σ_π Π_{B∈π} (-1)^{|B|-1}(|B|-1)! Σ_x Π_{k∈B} p_t(x, y_k).
/// CapacityError for n > 12.
double correlation_function_inclusion_exclusion(const points::Configuration& gamma,
                                                const FiniteConfiguration& theta, double t);
/// Π_k Σ_{x∈γ} p_t(x, y_k), an upper bound for the correlation function.
double correlation_bound(const points::Configuration& gamma, const FiniteConfiguration& theta, double t);

/// Permanent of a row-major n x n matrix by Ryser's formula with Gray-code
/// column order. CapacityError for n > 24.
double permanent(std::span<const double> matrix, std::size_t n);

/// R_t(η, θ) = per[p_t(x_k, y_l)]; 0 when sizes differ, 1 for (∅, ∅).
double permanent_kernel(const FiniteConfiguration& eta, const FiniteConfiguration& theta, double t);

}  // namespace confheat::harmonic
