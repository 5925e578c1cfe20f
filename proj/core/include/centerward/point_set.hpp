#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace centerward {

/// Flat storage for n points in R^dim, row-major.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;

  PointSet() = default;
  PointSet(int d, std::size_t n) : dim(d), coords(static_cast<std::size_t>(d) * n, 0.0) {}

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / static_cast<std::size_t>(dim); }
  bool empty() const { return coords.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    assert(i < size());
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<double> operator[](std::size_t i) {
    assert(i < size());
    return {coords.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  void push_back(std::span<const double> p) {
    assert(static_cast<int>(p.size()) == dim);
    coords.insert(coords.end(), p.begin(), p.end());
  }
};

inline double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

}  // namespace centerward
