#include "confheat/assignment.hpp"

#include <algorithm>
#include <limits>

#include "confheat/error.hpp"

namespace confheat::assignment {

Assignment solve(std::span<const double> cost, std::size_t n) {
  if (cost.size() != n * n) throw InputError("assignment: cost matrix must be n x n");
  Assignment out;
  if (n == 0) return out;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  out.match.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.match[owner[j] - 1] = j - 1;
  // Sum the matched entries directly rather than trusting the potentials.
  for (std::size_t i = 0; i < n; ++i) out.cost += cost[i * n + out.match[i]];
  return out;
}

}  // namespace confheat::assignment
