#include "confheat/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "confheat/error.hpp"

namespace confheat {

PointSet::PointSet(int dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ < 1) throw InputError("PointSet: dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw InputError("PointSet: coordinate count is not a multiple of the dimension");
  }
  for (double v : coords_) {
    if (!std::isfinite(v)) throw InputError("PointSet: non-finite coordinate");
  }
}

void PointSet::push_back(std::span<const double> x) {
  require_finite_point(x, dim_, "PointSet::push_back");
  coords_.insert(coords_.end(), x.begin(), x.end());
}

PointSet PointSet::subset(std::uint64_t mask) const {
  PointSet out(dim_);
  for (std::size_t i = 0; i < size(); ++i) {
    if (mask >> i & 1u) out.coords_.insert(out.coords_.end(), (*this)[i].begin(), (*this)[i].end());
  }
  return out;
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void PointSet::sort() {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return lex_less((*this)[i], (*this)[j]); });
  std::vector<double> sorted;
  sorted.reserve(coords_.size());
  for (std::size_t i : order) sorted.insert(sorted.end(), (*this)[i].begin(), (*this)[i].end());
  coords_ = std::move(sorted);
}

bool PointSet::is_sorted() const {
  for (std::size_t i = 1; i < size(); ++i) {
    if (lex_less((*this)[i], (*this)[i - 1])) return false;
  }
  return true;
}

bool PointSet::all_distinct() const {
  PointSet copy = *this;
  copy.sort();
  for (std::size_t i = 1; i < copy.size(); ++i) {
    if (std::ranges::equal(copy[i], copy[i - 1])) return false;
  }
  return true;
}

void require_finite_point(std::span<const double> x, int dim, const char* what) {
  if (static_cast<int>(x.size()) != dim) {
    throw InputError(std::string(what) + ": expected a point of dimension " + std::to_string(dim) +
                     ", got " + std::to_string(x.size()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite coordinate");
  }
}

}  // namespace confheat
