#include "confheat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "confheat/assignment.hpp"
#include "confheat/error.hpp"
#include "confheat/simplex.hpp"

namespace confheat::metrics {

namespace {

void require_same_dim(const Configuration& g1, const Configuration& g2, const char* what) {
  if (g1.dim() != g2.dim()) throw InputError(std::string(what) + ": dimension mismatch");
}

struct SignedMeasure {
  PointSet support;
  std::vector<double> mass;  // γ1({x}) - γ2({x})
};

SignedMeasure difference(const Configuration& g1, const Configuration& g2) {
  const Configuration a = points::as_multiset(g1);
  const Configuration b = points::as_multiset(g2);
  SignedMeasure out{PointSet(g1.dim()), {}};
  // Merge two sorted site lists.
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && lex_less(a.position(i), b.position(j)))) {
      out.support.push_back(a.position(i));
      out.mass.push_back(a.multiplicity(i));
      ++i;
    } else if (i == a.size() || lex_less(b.position(j), a.position(i))) {
      out.support.push_back(b.position(j));
      out.mass.push_back(-static_cast<double>(b.multiplicity(j)));
      ++j;
    } else {
      const double m = static_cast<double>(a.multiplicity(i)) - b.multiplicity(j);
      if (m != 0.0) {
        out.support.push_back(a.position(i));
        out.mass.push_back(m);
      }
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

double b_n(const Configuration& gamma, int n) {
  if (n < 1) throw InputError("b_n: n must be >= 1");
  double s = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    s += gamma.multiplicity(i) * std::exp(-norm(gamma.position(i)) / n);
  }
  return s;
}

double flat_metric(const Configuration& g1, const Configuration& g2, int i) {
  require_same_dim(g1, g2, "flat_metric");
  if (i < 1) throw InputError("flat_metric: i must be >= 1");
  const SignedMeasure nu = difference(g1, g2);
  const std::size_t m = nu.support.size();
  if (m == 0) return 0.0;
  std::vector<double> cap(m);
  for (std::size_t k = 0; k < m; ++k) cap[k] = std::max(0.0, i - norm(nu.support[k]));

  // Dual of  max Σ ν_x f_x  s.t. f_x - f_y ≤ |x-y|, ±f_x ≤ cap_x:
  //   min Σ |x-y| w_xy + Σ cap_x (a_x + b_x)
  //   s.t. Σ_y w_xy - Σ_y w_yx + a_x - b_x = ν_x,  w, a, b ≥ 0.
  lp::StandardFormProgram prog;
  prog.rows = m;
  prog.cols = m * (m - 1) + 2 * m;
  prog.a.assign(prog.rows * prog.cols, 0.0);
  prog.b = nu.mass;
  prog.c.assign(prog.cols, 0.0);
  std::size_t col = 0;
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      if (x == y) continue;
      prog.c[col] = distance(nu.support[x], nu.support[y]);
      prog.a[x * prog.cols + col] = 1.0;
      prog.a[y * prog.cols + col] = -1.0;
      ++col;
    }
  }
  for (std::size_t x = 0; x < m; ++x) {
    prog.c[col] = cap[x];
    prog.a[x * prog.cols + col] = 1.0;
    ++col;
    prog.c[col] = cap[x];
    prog.a[x * prog.cols + col] = -1.0;
    ++col;
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::kOptimal) {
    throw NumericalError(std::string("flat_metric: simplex ended with status ") + lp::to_string(sol.status));
  }
  return std::max(0.0, sol.objective);
}

MetricValue flat_metric_series(const Configuration& g1, const Configuration& g2, int i_max) {
  if (i_max < 1) throw InputError("flat_metric_series: i_max must be >= 1");
  MetricValue out;
  double weight = 1.0;
  for (int i = 1; i <= i_max; ++i) {
    weight *= 0.5;
    const double dk = flat_metric(g1, g2, i);
    out.value += weight * dk / (1.0 + dk);
  }
  out.truncation_error = std::ldexp(1.0, -i_max);
  return out;
}

MetricValue d1(const Configuration& g1, const Configuration& g2, int i_max) {
  MetricValue out = flat_metric_series(g1, g2, i_max);
  out.value += std::abs(b_n(g1, 1) - b_n(g2, 1));
  return out;
}

MetricValue d_infty(const Configuration& g1, const Configuration& g2, int i_max, int n_max) {
  if (n_max < 1) throw InputError("d_infty: n_max must be >= 1");
  MetricValue out = flat_metric_series(g1, g2, i_max);
  double weight = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    weight *= 0.5;
    const double gap = std::abs(b_n(g1, n) - b_n(g2, n));
    out.value += weight * gap / (1.0 + gap);
  }
  out.truncation_error += std::ldexp(1.0, -n_max);
  return out;
}

double rho(const Configuration& g1, const Configuration& g2) {
  require_same_dim(g1, g2, "rho");
  const PointSet x = g1.particles();
  const PointSet y = g2.particles();
  if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
  const std::size_t n = x.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = squared_distance(x[i], y[j]);
  }
  return std::sqrt(assignment::solve(cost, n).cost);
}

}  // namespace confheat::metrics
