#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace confheat::assignment {

struct Assignment {
  double cost = 0.0;
  /// row i is matched to column match[i].
  std::vector<std::size_t> match;
};

/// Minimum-cost perfect matching on a square row-major cost matrix
/// (Hungarian method with potentials, O(n^3)).
Assignment solve(std::span<const double> cost, std::size_t n);

}  // namespace confheat::assignment
