#include "confheat/harmonic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "confheat/error.hpp"
#include "confheat/kernel.hpp"
#include "confheat/quadrature.hpp"
#include "confheat/rng.hpp"
#include "confheat/special.hpp"

namespace confheat::harmonic {

namespace {

constexpr double kSubsetLimit = 1073741824.0;  // 2^30
constexpr std::size_t kInverseLimit = 25;
constexpr std::size_t kStarLimit = 12;
constexpr std::size_t kPartitionLimit = 12;
constexpr std::size_t kPermanentLimit = 24;
constexpr std::size_t kEnumerationOrder = 5;

PointSet sorted_copy(const PointSet& eta) {
  PointSet out = eta;
  if (!out.is_sorted()) out.sort();
  return out;
}

PointSet canonical_sites(const points::Configuration& gamma) {
  if (!gamma.is_simple()) throw InputError("k_transform: configuration must be simple");
  return points::as_multiset(gamma).sites();
}

double binomial(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

// Calls visit(subset) for every subset of `sorted` with size <= max_size.
template <class Visit>
void for_each_subset(const PointSet& sorted, std::size_t max_size, PointSet& scratch, std::size_t start,
                     Visit& visit) {
  visit(static_cast<const PointSet&>(scratch));
  if (scratch.size() == max_size) return;
  for (std::size_t i = start; i < sorted.size(); ++i) {
    scratch.push_back(sorted[i]);
    for_each_subset(sorted, max_size, scratch, i + 1, visit);
    scratch.pop_back();
  }
}

std::vector<double> transition_matrix(const PointSet& particles, const FiniteConfiguration& theta, double t) {
  const kernel::HeatKernelParams params{theta.dim(), t};
  std::vector<double> m(particles.size() * theta.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (std::size_t k = 0; k < theta.size(); ++k) m[i * theta.size() + k] = kernel::density(params, particles[i], theta[k]);
  }
  return m;
}

void check_theta(const points::Configuration& gamma, const FiniteConfiguration& theta, double t) {
  if (!(t > 0.0)) throw InputError("correlation_function: t must be positive");
  if (theta.empty()) throw InputError("correlation_function: theta must be nonempty");
  if (theta.dim() != gamma.dim()) throw InputError("correlation_function: dimension mismatch");
}

}  // namespace

double evaluate_factor(const ProductFactor& factor, std::span<const double> x) {
  return std::visit(
      [&](const auto& f) -> double {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, UnitFactor>) {
          return 1.0;
        } else if constexpr (std::is_same_v<F, GaussianFactor>) {
          return f.amplitude * std::exp(-squared_distance(x, f.center) / (2.0 * f.width2));
        } else {
          double p = 1.0;
          if (f.smoothing_t == 0.0) {
            for (double v : x) p *= std::abs(v) <= f.half_width ? 1.0 : 0.0;
            return p;
          }
          const double sd = std::sqrt(2.0 * f.smoothing_t);
          for (double v : x) {
            p *= special::normal_tail((-f.half_width - v) / sd) - special::normal_tail((f.half_width - v) / sd);
          }
          return p;
        }
      },
      factor);
}

KernelFunction::KernelFunction(double value_at_empty, std::vector<Level> levels)
    : value_at_empty_(value_at_empty), levels_(std::move(levels)) {}

KernelFunction KernelFunction::product(ProductFactor factor, std::vector<double> coeffs) {
  if (coeffs.empty()) throw InputError("KernelFunction::product: need at least the order-0 coefficient");
  std::vector<Level> levels;
  for (std::size_t n = 1; n < coeffs.size(); ++n) {
    levels.emplace_back([factor, c = coeffs[n]](const PointSet& eta) {
      double p = c;
      for (std::size_t k = 0; k < eta.size() && p != 0.0; ++k) p *= evaluate_factor(factor, eta[k]);
      return p;
    });
  }
  KernelFunction g(coeffs[0], std::move(levels));
  g.d_class = product_certificate(factor, coeffs, 1.0);
  g.factor_ = std::move(factor);
  g.coeffs_ = std::move(coeffs);
  return g;
}

double KernelFunction::operator()(const PointSet& eta) const {
  if (eta.empty()) return value_at_empty_;
  if (eta.size() > levels_.size()) return 0.0;
  return levels_[eta.size() - 1](sorted_copy(eta));
}

double KernelFunction::evaluate_sorted(const PointSet& eta) const {
  if (eta.empty()) return value_at_empty_;
  if (eta.size() > levels_.size()) return 0.0;
  return levels_[eta.size() - 1](eta);
}

std::optional<DClassCertificate> product_certificate(const ProductFactor& factor,
                                                     const std::vector<double>& coeffs, double eps) {
  if (!(eps > 0.0)) throw InputError("product_certificate: eps must be positive");
  double h = 0.0;
  if (const auto* g = std::get_if<GaussianFactor>(&factor)) {
    // |x - c| ≥ | |x| - |c| |, then maximize -(r - m)^2 / 2s^2 + (1+ε) r over r.
    const double a = 1.0 + eps;
    h = std::abs(g->amplitude) * std::exp(a * norm(g->center) + 0.5 * a * a * g->width2);
  } else if (const auto* b = std::get_if<BoxFactor>(&factor); b && b->smoothing_t == 0.0) {
    h = std::exp((1.0 + eps) * b->half_width * std::sqrt(static_cast<double>(b->dim)));
  } else {
    return std::nullopt;
  }
  double root = 0.0;
  for (std::size_t n = 1; n < coeffs.size(); ++n) {
    root = std::max(root, std::pow(std::abs(coeffs[n]), 1.0 / static_cast<double>(n)));
  }
  return DClassCertificate{h * (root > 0.0 ? root : 1.0), eps};
}

CertificateCheck check_d_class(const KernelFunction& g, const DClassCertificate& cert, const PointSet& grid,
                               int max_checked_order) {
  CertificateCheck out;
  PointSet sorted = sorted_copy(grid);
  PointSet scratch(grid.dim());
  const std::size_t max_size = static_cast<std::size_t>(std::min(max_checked_order, g.max_order()));
  auto visit = [&](const PointSet& eta) {
    if (eta.empty()) return;
    double log_bound = static_cast<double>(eta.size()) * std::log(cert.c);
    for (std::size_t k = 0; k < eta.size(); ++k) log_bound -= (1.0 + cert.eps) * norm(eta[k]);
    const double v = std::abs(g.evaluate_sorted(eta));
    if (v == 0.0) return;
    const double ratio = std::exp(std::log(v) - log_bound);
    out.worst_ratio = std::max(out.worst_ratio, ratio);
  };
  for_each_subset(sorted, max_size, scratch, 0, visit);
  out.pass = out.worst_ratio <= 1.0;
  return out;
}

double k_transform(const KernelFunction& g, const PointSet& gamma) {
  PointSet sorted = sorted_copy(gamma);
  if (!sorted.all_distinct()) throw InputError("k_transform: configuration must be simple");
  const std::size_t max_size = std::min<std::size_t>(static_cast<std::size_t>(g.max_order()), sorted.size());
  double count = 0.0;
  for (std::size_t k = 0; k <= max_size; ++k) count += binomial(static_cast<double>(sorted.size()), static_cast<double>(k));
  if (count > kSubsetLimit) {
    throw CapacityError("k_transform: " + std::to_string(count) + " subsets exceed the 2^30 limit");
  }
  double sum = 0.0;
  PointSet scratch(gamma.dim());
  auto visit = [&](const PointSet& eta) { sum += g.evaluate_sorted(eta); };
  for_each_subset(sorted, max_size, scratch, 0, visit);
  return sum;
}

double k_transform(const KernelFunction& g, const points::Configuration& gamma) {
  return k_transform(g, canonical_sites(gamma));
}

double inverse_k_transform(const std::function<double(const PointSet&)>& f, const FiniteConfiguration& eta) {
  if (eta.size() > kInverseLimit) {
    throw CapacityError("inverse_k_transform: |eta| = " + std::to_string(eta.size()) + " exceeds 25");
  }
  const PointSet sorted = sorted_copy(eta);
  const std::size_t n = sorted.size();
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const int removed = static_cast<int>(n) - std::popcount(mask);
    const double sign = removed % 2 == 0 ? 1.0 : -1.0;
    sum += sign * f(sorted.subset(mask));
  }
  return sum;
}

double star_convolution(const KernelFunction& g1, const KernelFunction& g2, const FiniteConfiguration& eta) {
  if (eta.size() > kStarLimit) {
    throw CapacityError("star_convolution: |eta| = " + std::to_string(eta.size()) + " exceeds 12");
  }
  const PointSet sorted = sorted_copy(eta);
  const std::size_t n = sorted.size();
  std::vector<int> part(n, 0);  // 0 → η1, 1 → η2, 2 → η3
  double sum = 0.0;
  PointSet left(eta.dim()), right(eta.dim());
  while (true) {
    left.clear();
    right.clear();
    for (std::size_t k = 0; k < n; ++k) {
      if (part[k] <= 1) left.push_back(sorted[k]);
      if (part[k] >= 1) right.push_back(sorted[k]);
    }
    if (left.size() <= static_cast<std::size_t>(g1.max_order()) &&
        right.size() <= static_cast<std::size_t>(g2.max_order())) {
      sum += g1.evaluate_sorted(left) * g2.evaluate_sorted(right);
    }
    std::size_t k = 0;
    while (k < n && part[k] == 2) part[k++] = 0;
    if (k == n) break;
    ++part[k];
  }
  return sum;
}

KernelFunction star_product(const KernelFunction& g1, const KernelFunction& g2) {
  std::vector<KernelFunction::Level> levels;
  const int order = g1.max_order() + g2.max_order();
  for (int n = 1; n <= order; ++n) {
    levels.emplace_back([g1, g2](const PointSet& eta) { return star_convolution(g1, g2, eta); });
  }
  return KernelFunction(g1.value_at_empty() * g2.value_at_empty(), std::move(levels));
}

IntegralEstimate lebesgue_poisson_integral(const KernelFunction& g, const points::Window& window, int dim,
                                           int n_max, const IntegrationSpec& spec) {
  window.validate();
  if (n_max < 0) throw InputError("lebesgue_poisson_integral: n_max must be >= 0");
  IntegralEstimate out;
  out.value = g.value_at_empty();
  out.level_values.push_back(out.value);
  const int top = std::min(n_max, g.max_order());
  constexpr double kNodeBudget = 2e7;

  std::optional<quadrature::BallRule> fine, coarse;
  if (dim <= 3) {
    fine = quadrature::ball_rule(dim, window.radius, spec.radial_panels, spec.angular);
    coarse = quadrature::ball_rule(dim, window.radius, std::max(1, spec.radial_panels / 2), std::max(4, spec.angular / 2));
  }
  const double volume = window.volume(dim);
  double log_factorial = 0.0;
  for (int n = 1; n <= top; ++n) {
    log_factorial += std::log(static_cast<double>(n));
    const double scale = std::exp(n * std::log(window.intensity) - log_factorial);
    double integral = 0.0, error = 0.0;
    const bool use_quadrature = fine && n <= spec.max_quadrature_order &&
                                std::pow(static_cast<double>(fine->weights.size()), n) <= kNodeBudget;
    if (use_quadrature) {
      auto product_rule = [&](const quadrature::BallRule& rule) {
        const std::size_t q = rule.weights.size();
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        PointSet eta(dim);
        double total = 0.0;
        while (true) {
          eta.clear();
          double w = 1.0;
          for (std::size_t k : idx) {
            eta.push_back(rule.nodes[k]);
            w *= rule.weights[k];
          }
          total += w * g(eta);
          std::size_t pos = 0;
          while (pos < idx.size() && ++idx[pos] == q) idx[pos++] = 0;
          if (pos == idx.size()) break;
        }
        return total;
      };
      integral = product_rule(*fine);
      error = std::abs(integral - product_rule(*coarse));
    } else {
      RandomStream rng(spec.seed, static_cast<std::uint32_t>(n), 0, StreamTag::kAuxiliary);
      double mean = 0.0, m2 = 0.0;
      for (std::uint64_t s = 0; s < spec.mc_samples; ++s) {
        PointSet eta(dim);
        while (eta.size() < static_cast<std::size_t>(n)) {
          // uniform point in the ball
          std::vector<double> x(static_cast<std::size_t>(dim));
          double len2 = 0.0;
          for (double& v : x) {
            v = rng.normal();
            len2 += v * v;
          }
          const double r = window.radius * std::pow(rng.uniform(), 1.0 / dim) / std::sqrt(len2);
          for (double& v : x) v *= r;
          eta.push_back(x);
        }
        const double v = g(eta);
        const double delta = v - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (v - mean);
      }
      const double vn = std::pow(volume, n);
      integral = vn * mean;
      error = spec.mc_samples > 1 ? vn * std::sqrt(m2 / static_cast<double>(spec.mc_samples - 1) /
                                                   static_cast<double>(spec.mc_samples))
                                  : std::numeric_limits<double>::infinity();
    }
    out.level_values.push_back(scale * integral);
    out.value += scale * integral;
    out.error_estimate += scale * error;
  }

  if (n_max >= g.max_order()) {
    out.remainder_bound = 0.0;
  } else if (g.d_class) {
    const double eps = g.d_class->eps;
    const double mass = special::unit_sphere_area(dim) * std::tgamma(static_cast<double>(dim)) /
                        std::pow(1.0 + eps, dim);
    const double lambda = window.intensity * g.d_class->c * mass;
    double term = 1.0, rem = 0.0;
    for (int n = 1; n <= g.max_order(); ++n) {
      term *= lambda / n;
      if (n > n_max) rem += term;
    }
    out.remainder_bound = rem;
  } else {
    out.remainder_bound = std::numeric_limits<double>::infinity();
    out.warnings.push_back("no d-class certificate and n_max < max_order: remainder is unbounded");
  }
  return out;
}

double correlation_function_enumeration(const points::Configuration& gamma, const FiniteConfiguration& theta,
                                        double t) {
  check_theta(gamma, theta, t);
  const PointSet particles = gamma.particles();
  const std::size_t m = particles.size();
  const std::size_t n = theta.size();
  if (n > m) return 0.0;
  const std::vector<double> p = transition_matrix(particles, theta, t);
  std::vector<char> used(m, 0);
  auto recurse = [&](auto&& self, std::size_t k) -> double {
    if (k == n) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (used[i]) continue;
      used[i] = 1;
      s += p[i * n + k] * self(self, k + 1);
      used[i] = 0;
    }
    return s;
  };
  return recurse(recurse, 0);
}

double correlation_function_inclusion_exclusion(const points::Configuration& gamma,
                                                const FiniteConfiguration& theta, double t) {
  check_theta(gamma, theta, t);
  const std::size_t n = theta.size();
  if (n > kPartitionLimit) {
    throw CapacityError("correlation_function: n = " + std::to_string(n) + " exceeds the partition limit 12");
  }
  const PointSet particles = gamma.particles();
  const std::size_t m = particles.size();
  if (n > m) return 0.0;
  const std::vector<double> p = transition_matrix(particles, theta, t);
  const std::size_t full = (std::size_t{1} << n) - 1;
  // block_sum[B] = Σ_x Π_{k∈B} p(x, y_k)
  std::vector<double> block_sum(full + 1, 0.0);
  std::vector<double> prod(full + 1);
  for (std::size_t i = 0; i < m; ++i) {
    prod[0] = 1.0;
    for (std::size_t b = 1; b <= full; ++b) {
      const std::size_t low = static_cast<std::size_t>(std::countr_zero(b));
      prod[b] = prod[b & (b - 1)] * p[i * n + low];
      block_sum[b] += prod[b];
    }
  }
  // Möbius weight of a block of size s: (-1)^{s-1} (s-1)!.
  std::vector<double> mobius(n + 1, 1.0);
  for (std::size_t s = 2; s <= n; ++s) mobius[s] = -mobius[s - 1] * static_cast<double>(s - 1);
  // f(R) = Σ over partitions of R; recursion on the block holding R's lowest element.
  std::vector<double> memo(full + 1, 0.0);
  memo[0] = 1.0;
  for (std::size_t r = 1; r <= full; ++r) {
    const std::size_t low = r & (~r + 1);
    const std::size_t rest = r ^ low;
    double s = 0.0;
    // Enumerate subsets of `rest`, each joined with `low` to form the block.
    for (std::size_t sub = rest;; sub = (sub - 1) & rest) {
      const std::size_t block = sub | low;
      s += mobius[static_cast<std::size_t>(std::popcount(block))] * block_sum[block] * memo[r ^ block];
      if (sub == 0) break;
    }
    memo[r] = s;
  }
  return memo[full];
}

double correlation_function(const points::Configuration& gamma, const FiniteConfiguration& theta, double t) {
  if (theta.size() <= kEnumerationOrder) return correlation_function_enumeration(gamma, theta, t);
  return correlation_function_inclusion_exclusion(gamma, theta, t);
}

double correlation_bound(const points::Configuration& gamma, const FiniteConfiguration& theta, double t) {
  check_theta(gamma, theta, t);
  const PointSet particles = gamma.particles();
  const std::vector<double> p = transition_matrix(particles, theta, t);
  double bound = 1.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < particles.size(); ++i) s += p[i * theta.size() + k];
    bound *= s;
  }
  return bound;
}

double permanent(std::span<const double> a, std::size_t n) {
  if (a.size() != n * n) throw InputError("permanent: matrix must be n x n");
  if (n > kPermanentLimit) throw CapacityError("permanent: n = " + std::to_string(n) + " exceeds 24");
  if (n == 0) return 1.0;
  // Ryser: per A = (-1)^n Σ_{S ≠ ∅} (-1)^{|S|} Π_i Σ_{j∈S} a_ij, S visited in Gray-code order.
  std::vector<double> row_sum(n, 0.0);
  std::uint64_t gray = 0;
  double total = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const auto j = static_cast<std::size_t>(std::countr_zero(k));
    const std::uint64_t bit = std::uint64_t{1} << j;
    const double sign = (gray & bit) ? -1.0 : 1.0;
    gray ^= bit;
    for (std::size_t i = 0; i < n; ++i) row_sum[i] += sign * a[i * n + j];
    double prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= row_sum[i];
    total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
  }
  return (n % 2 == 0) ? total : -total;
}

double permanent_kernel(const FiniteConfiguration& eta, const FiniteConfiguration& theta, double t) {
  if (!(t > 0.0)) throw InputError("permanent_kernel: t must be positive");
  if (eta.size() != theta.size()) return 0.0;
  const std::size_t n = eta.size();
  if (n == 0) return 1.0;
  if (eta.dim() != theta.dim()) throw InputError("permanent_kernel: dimension mismatch");
  if (n > kPermanentLimit) throw CapacityError("permanent_kernel: n = " + std::to_string(n) + " exceeds 24");
  return permanent(transition_matrix(eta, theta, t), n);
}

}  // namespace confheat::harmonic
