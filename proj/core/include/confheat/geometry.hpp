#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace confheat {

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> x, std::span<const double> y) {
  return std::sqrt(squared_distance(x, y));
}

inline double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double norm(std::span<const double> x) { return std::sqrt(squared_norm(x)); }

/// Finite list of points in R^d stored contiguously. Used for the finite
/// configurations η, θ of the harmonic-analysis layer and as the unfolded
/// particle list of a Configuration.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(int dim) : dim_(dim) {}
  PointSet(int dim, std::vector<double> coords);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<double> mutable_point(std::size_t i) {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  void push_back(std::span<const double> x);
  void pop_back() { coords_.resize(coords_.size() - static_cast<std::size_t>(dim_)); }
  void reserve(std::size_t n) { coords_.reserve(n * static_cast<std::size_t>(dim_)); }
  void clear() { coords_.clear(); }

  const std::vector<double>& coords() const { return coords_; }

  /// Points drawn by index mask (bit i set = point i kept), order preserved.
  PointSet subset(std::uint64_t mask) const;

  /// Lexicographic sort of the points.
  void sort();
  bool is_sorted() const;
  /// True when no two points coincide.
  bool all_distinct() const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
};

/// Lexicographic comparison of two points of equal dimension.
bool lex_less(std::span<const double> a, std::span<const double> b);

/// Throws InputError when a point has the wrong dimension or a non-finite coordinate.
void require_finite_point(std::span<const double> x, int dim, const char* what);

}  // namespace confheat
