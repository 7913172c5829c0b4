#pragma once

#include "confheat/points.hpp"

/// B_n functionals and the configuration distances d_K, d_1, d_∞ and ρ.
namespace confheat::metrics {

using points::Configuration;

/// Distance value with the error bound of any series truncation involved.
struct MetricValue {
  double value = 0.0;  // may be +inf
  double truncation_error = 0.0;
};

inline constexpr int kDefaultIMax = 20;
inline constexpr int kDefaultNMax = 20;

/// Σ_{x∈γ} exp(-|x|/n), counting multiplicity.
double b_n(const Configuration& gamma, int n);

/// d_{K,i}(γ1, γ2): sup of ∫ f d(γ1 - γ2) over 1-Lipschitz f with
/// |f(x)| ≤ max(0, i - |x|), restricted to the union support (exact for
/// point measures by McShane extension). Solved as the dual min-cost-flow LP.
/// Throws NumericalError if the simplex does not reach optimality.
double flat_metric(const Configuration& g1, const Configuration& g2, int i);

/// d_K = Σ_{i ≤ i_max} 2^{-i} d_{K,i} / (1 + d_{K,i}), truncation error 2^{-i_max}.
MetricValue flat_metric_series(const Configuration& g1, const Configuration& g2, int i_max = kDefaultIMax);

/// d_1 = d_K + |B_1(γ1) - B_1(γ2)|.
MetricValue d1(const Configuration& g1, const Configuration& g2, int i_max = kDefaultIMax);

/// d_∞ = d_K + Σ_{n ≤ n_max} 2^{-n} |ΔB_n| / (1 + |ΔB_n|).
MetricValue d_infty(const Configuration& g1, const Configuration& g2, int i_max = kDefaultIMax,
                    int n_max = kDefaultNMax);

/// L²-Wasserstein-type matching distance: +inf when particle counts differ,
/// else min over bijections of (Σ |x_k - y_σ(k)|²)^{1/2} by the Hungarian method.
double rho(const Configuration& g1, const Configuration& g2);

}  // namespace confheat::metrics
