#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "confheat/harmonic.hpp"
#include "confheat/points.hpp"
#include "confheat/verdict.hpp"

/// The heat semigroup (P_t F)(γ) = ∫ F dP_{t,γ}: Monte Carlo application, the
/// exact route for exponential functionals and lifted kernels, Poisson
/// invariance, generator residuals and Feller continuity probes.
namespace confheat::semigroup {

using points::Configuration;
using Functional = std::function<double(const Configuration&)>;

struct SemigroupEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  std::string route;
  std::string truncation_note;
};

struct McOptions {
  std::uint64_t replicas = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::optional<double> pad;
};

/// Mean of F over independent diffuse(γ, t) draws; replica r uses substreams
/// (seed, r, particle). Throws EvaluationError naming the first replica whose
/// F value is not finite.
SemigroupEstimate apply_mc(const Functional& f, const Configuration& gamma, double t, const McOptions& options);

/// φ(x) = -a exp(-|x - c|² / 2s²).
struct GaussianBump {
  double a = 0.5;
  double s = 1.0;
  std::vector<double> center;  // empty = origin
};

/// φ(x) = -a Π_k σ((R + x_k)/w) σ((R - x_k)/w), σ the logistic function.
struct SmoothedBox {
  double a = 0.5;
  double radius = 1.0;
  double width = 0.1;
};

/// Exponential functional F(γ) = Π_{x∈γ} (1 + φ(x)) with -1 < -a ≤ φ ≤ 0.
class ExpFunctional {
 public:
  using Shape = std::variant<GaussianBump, SmoothedBox>;

  explicit ExpFunctional(Shape shape);

  const Shape& shape() const { return shape_; }
  double phi(std::span<const double> x) const;
  double operator()(const Configuration& gamma) const;

  /// (p_t * φ)(x): closed form for Gaussian bumps, adaptive quadrature
  /// (absolute tolerance 1e-10 per factor) for smoothed boxes.
  double heat_phi(std::span<const double> x, double t) const;

  /// (p_s * (p_t * φ))(x) computed as two successive convolutions.
  double heat_phi_composed(std::span<const double> x, double t, double s) const;

  /// Name of the route heat_phi takes.
  std::string route() const;

 private:
  Shape shape_;
};

/// Π_{x∈γ} (1 + (p_t * φ)(x)), i.e. exp⟨log(1 + e^{-tH}φ), γ⟩.
double apply_exact_exponential(const ExpFunctional& ef, const Configuration& gamma, double t);

/// Same product with the convolution done in two steps (t then s).
double apply_exact_exponential_composed(const ExpFunctional& ef, const Configuration& gamma, double t, double s);

/// P̃_t G: each argument convolved with the heat kernel. Supports the built-in
/// product families; the D-class certificate (C, ε) becomes
/// (C · C_t' · I, ε/2) with C_t' = sup p_t e^{(1+ε/2)r} and I = ∫ e^{-ε|y|/2} dy.
/// Throws CapabilityError for custom kernels.
harmonic::KernelFunction lift_kernel(const harmonic::KernelFunction& g, double t, int dim);

/// Degraded certificate used by lift_kernel.
harmonic::DClassCertificate lifted_certificate(const harmonic::DClassCertificate& cert, double t, int dim);

/// A functional depending only on points in B(0, inner_radius). `sensitivity`
/// bounds |F(γ ∪ {x}) - F(γ)| for one extra particle in the inner ball.
struct LocalFunctional {
  std::string name;
  Functional f;
  double inner_radius = 1.0;
  double sensitivity = 1.0;
};

struct InvarianceReport {
  double mean_before = 0.0;
  double mean_after = 0.0;
  double difference = 0.0;
  double std_error = 0.0;
  double leakage_bound = 0.0;
  std::uint64_t replicas = 0;
  bool pass = false;
};

/// E_π[F] against E_π[P_t F] by paired sampling on the outer window. The
/// leakage bound sensitivity · z · vol(B_inner) · tail_mass(t, pad) covers
/// particles that would enter from beyond the window. Throws
/// ConfigurationError when that bound exceeds `tolerance`.
InvarianceReport invariance_test(const LocalFunctional& f, const points::Window& outer, int dim, double t,
                                 double tolerance, const McOptions& options);

/// φ(x) = a exp(-|x - c|² / 2s²) with analytic gradient and Laplacian.
struct TestFunction {
  double a = 1.0;
  double s = 1.0;
  std::vector<double> center;

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;
  double laplacian(std::span<const double> x) const;
};

/// g: R^N → R with analytic first and second derivatives.
struct OuterFunction {
  enum class Kind { kLinear, kExponential, kSine, kQuadratic, kProduct };
  Kind kind = Kind::kLinear;
  std::vector<double> weights;  // w for the ridge kinds h(w·u); unused by kProduct

  double value(std::span<const double> u) const;
  void gradient(std::span<const double> u, std::span<double> out) const;
  void hessian(std::span<const double> u, std::span<double> out) const;  // N x N row-major
};

/// F(γ) = g(⟨φ_1, γ⟩, ..., ⟨φ_N, γ⟩).
class CylinderFunction {
 public:
  /// Throws InputError if the analytic derivatives of g or φ_j disagree with
  /// central differences by more than 1e-5 relative at a few probe points.
  CylinderFunction(OuterFunction outer, std::vector<TestFunction> inner, int dim);

  double operator()(const Configuration& gamma) const;
  double operator()(const PointSet& particles) const;

  /// H F for the generator of the implemented kernel (H^X = -Δ):
  /// -Σ_ij ∂i∂j g ⟨∇φ_i·∇φ_j, γ⟩ - Σ_j ∂_j g ⟨Δφ_j, γ⟩.
  double dirichlet_operator(const Configuration& gamma) const;
  /// The same expression with H^X = -Δ/2 (half of the above).
  double dirichlet_operator_half_laplacian(const Configuration& gamma) const;

  int dim() const { return dim_; }
  std::size_t size() const { return inner_.size(); }

 private:
  OuterFunction outer_;
  std::vector<TestFunction> inner_;
  int dim_;
};

struct GeneratorRow {
  double t = 0.0;
  double quotient = 0.0;  // (F(γ) - P_t F(γ)) / t
  double std_error = 0.0;
  double residual = 0.0;  // quotient - H F(γ)
};

using confheat::Verdict;

struct GeneratorReport {
  double generator_value = 0.0;
  std::vector<GeneratorRow> rows;
  std::vector<double> ratios;  // residual(t_k) / residual(t_{k+1})
  Verdict verdict = Verdict::kInconclusive;
  std::string route = "mc-antithetic-common-random-numbers";
};

/// One-sided difference quotients (F - P_t F)/t against H F(γ). Antithetic
/// pairs with common normals across t_list; verdict is inconclusive when a
/// standard error exceeds half its residual, otherwise pass iff every ratio
/// lies in [ratio_low, ratio_high].
GeneratorReport generator_residual(const CylinderFunction& f, const Configuration& gamma,
                                   std::span<const double> t_list, const McOptions& options,
                                   double ratio_low = 1.5, double ratio_high = 3.0);

struct FellerPoint {
  double metric_gap = 0.0;
  double value_gap = 0.0;
};

struct FellerReport {
  std::vector<FellerPoint> points;
  bool strictly_decreasing = false;
  double final_over_initial = 0.0;
  bool pass = false;
  std::string route;
};

using Metric = std::function<double(const Configuration&, const Configuration&)>;

/// Evaluates P_t F (through `semigroup_value`) at γ and along the
/// perturbations. Throws InputError if the metric gaps are not strictly
/// decreasing (an all-zero schedule is accepted). Passes when value gaps
/// strictly decrease and the last is below ratio · first (or all are zero).
FellerReport feller_probe(const Functional& semigroup_value, const Configuration& gamma,
                          std::span<const Configuration> perturbations, const Metric& metric,
                          double ratio = 1e-3, std::string route = "exact");

/// Perturbation families for feller_probe.
///  kRhoShift: site `site` moved by 2^-j along the first axis.
///  kAddFar:   one particle added on the ray -(1,...,1), at the distance where
///             the d1 gap equals 2^-j.
///  kD1Shift:  site `site` moved along the first axis by the amount where the
///             d1 gap equals 2^-j.
enum class FellerSchedule { kRhoShift, kAddFar, kD1Shift };

/// Perturbations for j = 1..steps; d1 targets are solved by bisection.
std::vector<Configuration> feller_schedule(const Configuration& gamma, FellerSchedule schedule, std::size_t site,
                                           int steps, int i_max = 20);

}  // namespace confheat::semigroup
