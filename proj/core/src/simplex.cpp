#include "confheat/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "confheat/error.hpp"

namespace confheat::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs holds -objective.
  double& cost(std::size_t c) { return at(rows_, c); }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      double* row = &at(r, 0);
      const double* prow = &at(pr, 0);
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Runs Bland pivots over columns [0, allowed_cols). Returns kOptimal or kUnbounded.
Status iterate(Tableau& t, std::vector<std::size_t>& basis, std::size_t allowed_cols, double tol,
               std::size_t max_pivots, std::size_t& pivots) {
  while (true) {
    std::size_t enter = allowed_cols;
    for (std::size_t c = 0; c < allowed_cols; ++c) {
      if (t.cost(c) < -tol) {
        enter = c;
        break;
      }
    }
    if (enter == allowed_cols) return Status::kOptimal;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a > tol) best = std::min(best, t.rhs(r) / a);
    }
    std::size_t leave = t.rows();
    if (best < std::numeric_limits<double>::infinity()) {
      const double slack = tol * (1.0 + std::abs(best));
      for (std::size_t r = 0; r < t.rows(); ++r) {
        const double a = t.at(r, enter);
        if (a <= tol || t.rhs(r) / a > best + slack) continue;
        if (leave == t.rows() || basis[r] < basis[leave]) leave = r;
      }
    }
    if (leave == t.rows()) return Status::kUnbounded;
    if (++pivots > max_pivots) return Status::kIterationLimit;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace

Solution solve(const StandardFormProgram& p, double tol, std::size_t max_pivots) {
  if (p.a.size() != p.rows * p.cols || p.b.size() != p.rows || p.c.size() != p.cols) {
    throw InputError("simplex: inconsistent program dimensions");
  }
  const std::size_t m = p.rows;
  const std::size_t n = p.cols;
  // Columns: structural [0, n), artificial [n, n + m).
  Tableau t(m, n + m);
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = p.b[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign * p.a[r * n + c];
    t.at(r, n + r) = 1.0;
    t.rhs(r) = sign * p.b[r];
    basis[r] = n + r;
  }
  // Phase 1: minimize the sum of artificials.
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += t.at(r, c);
    t.cost(c) = -s;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < m; ++r) total += t.rhs(r);
  t.rhs(m) = -total;

  Solution out;
  Status status = iterate(t, basis, n + m, tol, max_pivots, out.pivots);
  if (status == Status::kIterationLimit) {
    out.status = status;
    return out;
  }
  double scale = 1.0;
  for (double v : p.b) scale = std::max(scale, std::abs(v));
  if (-t.rhs(m) > 1e3 * tol * scale) {
    out.status = Status::kInfeasible;
    return out;
  }
  // Drive zero-level artificials out of the basis where possible.
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::abs(t.at(r, c)) > tol) {
        t.pivot(r, c);
        basis[r] = c;
        break;
      }
    }
  }
  // Phase 2 reduced costs: c_j - c_B^T column_j.
  for (std::size_t c = 0; c <= n + m; ++c) t.cost(c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) t.cost(c) = p.c[c];
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] >= n) continue;
    const double cb = p.c[basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= n + m; ++c) t.cost(c) -= cb * t.at(r, c);
  }
  status = iterate(t, basis, n, tol, max_pivots, out.pivots);
  out.status = status;
  if (status != Status::kOptimal) return out;
  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) out.x[basis[r]] = t.rhs(r);
  }
  double obj = 0.0;
  for (std::size_t c = 0; c < n; ++c) obj += p.c[c] * out.x[c];
  out.objective = obj;
  return out;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

}  // namespace confheat::lp
