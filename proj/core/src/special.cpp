#include "confheat/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "confheat/error.hpp"

namespace confheat::special {

namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// log of z^a e^{-z} / Γ(a), the common prefactor of both expansions.
double log_prefactor(double a, double z) { return a * std::log(z) - z - std::lgamma(a); }

double lower_series(double a, double z) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= z / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) {
      return sum * std::exp(log_prefactor(a, z));
    }
  }
  throw NumericalError("gamma_p: series did not converge");
}

double upper_continued_fraction(double a, double z) {
  // Modified Lentz on Γ(a,z) = e^{-z} z^a / (z + 1 - a - 1(1-a)/(z + 3 - a - ...)).
  double b = z + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) {
      return h * std::exp(log_prefactor(a, z));
    }
  }
  throw NumericalError("gamma_q: continued fraction did not converge");
}

void check_args(double a, double z) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InputError("incomplete gamma: shape must be positive");
  if (!(z >= 0.0)) throw InputError("incomplete gamma: argument must be nonnegative");
}

}  // namespace

double gamma_p(double a, double z) {
  check_args(a, z);
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return 1.0;
  if (z < a + 1.0) return lower_series(a, z);
  return 1.0 - upper_continued_fraction(a, z);
}

double gamma_q(double a, double z) {
  check_args(a, z);
  if (z == 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  if (z < a + 1.0) return 1.0 - lower_series(a, z);
  return upper_continued_fraction(a, z);
}

double normal_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double unit_ball_volume(int dim) {
  const double half = 0.5 * dim;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

}  // namespace confheat::special
