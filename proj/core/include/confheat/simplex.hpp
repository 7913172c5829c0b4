#pragma once

#include <cstddef>
#include <vector>

/// Dense two-phase tableau simplex for small standard-form programs.
namespace confheat::lp {

/// minimize c^T x subject to A x = b, x >= 0. A is row-major rows x cols.
struct StandardFormProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct Solution {
  Status status = Status::kIterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t pivots = 0;
};

/// Bland's rule for both entering and leaving variables, so the method
/// terminates on degenerate programs.
Solution solve(const StandardFormProgram& program, double tolerance = 1e-11,
               std::size_t max_pivots = 1'000'000);

const char* to_string(Status status);

}  // namespace confheat::lp
