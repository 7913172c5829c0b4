#pragma once

#include <functional>
#include <span>
#include <vector>

#include "confheat/geometry.hpp"

namespace confheat::quadrature {

/// Nodes and weights of a cubature rule on a ball B(0, R) ⊂ R^d, d ≤ 3:
/// composite Gauss-Legendre in the radius (with the r^{d-1} Jacobian),
/// trapezoid in azimuth and Gauss-Legendre in cos(polar angle).
struct BallRule {
  PointSet nodes;
  std::vector<double> weights;
};

/// `radial_panels` panels of 10 Gauss points; `angular` azimuthal points.
/// Throws CapabilityError for d > 3.
BallRule ball_rule(int dim, double radius, int radial_panels, int angular);

/// Adaptive Gauss-Kronrod (15-point) on [a, b]; throws NumericalError if the
/// error estimate exceeds `abs_tol`.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol);

}  // namespace confheat::quadrature
