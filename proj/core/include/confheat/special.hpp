#pragma once

namespace confheat::special {

/// Regularized lower incomplete gamma P(a, z) = γ(a, z) / Γ(a).
double gamma_p(double a, double z);

/// Regularized upper incomplete gamma Q(a, z) = Γ(a, z) / Γ(a).
///
/// Series for z < a + 1, Lentz continued fraction otherwise; each branch
/// computes the quantity it is accurate for and the other is 1 - it.
double gamma_q(double a, double z);

/// Standard normal upper tail 1 - Φ(x).
double normal_tail(double x);

/// Volume of the unit ball in R^d.
double unit_ball_volume(int dim);

/// Surface area of the unit sphere S^{d-1}.
double unit_sphere_area(int dim);

}  // namespace confheat::special
