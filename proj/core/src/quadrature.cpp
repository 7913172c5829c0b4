#include "confheat/quadrature.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "confheat/error.hpp"

namespace confheat::quadrature {

namespace {

// Gauss-Legendre 10-point nodes/weights on [-1, 1].
struct Legendre10 {
  std::vector<double> x;
  std::vector<double> w;
  Legendre10() {
    using rule = boost::math::quadrature::gauss<double, 10>;
    const auto& a = rule::abscissa();
    const auto& wt = rule::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      x.push_back(-a[i]);
      w.push_back(wt[i]);
      x.push_back(a[i]);
      w.push_back(wt[i]);
    }
  }
};

const Legendre10& legendre() {
  static const Legendre10 rule;
  return rule;
}

void composite(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
  const auto& gl = legendre();
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      x.push_back(mid + 0.5 * h * gl.x[i]);
      w.push_back(0.5 * h * gl.w[i]);
    }
  }
}

}  // namespace

BallRule ball_rule(int dim, double radius, int radial_panels, int angular) {
  if (dim < 1) throw InputError("ball_rule: dimension must be >= 1");
  if (dim > 3) throw CapabilityError("ball_rule: product cubature is implemented for d <= 3");
  if (!(radius > 0.0) || radial_panels < 1 || angular < 1) throw InputError("ball_rule: bad resolution");
  BallRule rule{PointSet(dim), {}};
  if (dim == 1) {
    std::vector<double> x, w;
    composite(-radius, radius, 2 * radial_panels, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) {
      rule.nodes.push_back(std::span<const double>(&x[i], 1));
      rule.weights.push_back(w[i]);
    }
    return rule;
  }
  std::vector<double> r, wr;
  composite(0.0, radius, radial_panels, r, wr);
  const double dphi = 2.0 * std::numbers::pi / angular;
  if (dim == 2) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (int a = 0; a < angular; ++a) {
        const double phi = (a + 0.5) * dphi;
        const double p[2] = {r[i] * std::cos(phi), r[i] * std::sin(phi)};
        rule.nodes.push_back(p);
        rule.weights.push_back(wr[i] * r[i] * dphi);
      }
    }
    return rule;
  }
  std::vector<double> mu, wmu;
  composite(-1.0, 1.0, std::max(1, angular / 20), mu, wmu);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double s = std::sqrt(1.0 - mu[k] * mu[k]);
      for (int a = 0; a < angular; ++a) {
        const double phi = (a + 0.5) * dphi;
        const double p[3] = {r[i] * s * std::cos(phi), r[i] * s * std::sin(phi), r[i] * mu[k]};
        rule.nodes.push_back(p);
        rule.weights.push_back(wr[i] * r[i] * r[i] * wmu[k] * dphi);
      }
    }
  }
  return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, 1e-14, &error);
  if (!std::isfinite(value) || error > abs_tol) {
    throw NumericalError("adaptive quadrature: error estimate " + std::to_string(error) +
                         " exceeds tolerance " + std::to_string(abs_tol));
  }
  return value;
}

}  // namespace confheat::quadrature
