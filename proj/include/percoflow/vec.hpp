#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace percoflow {

// Points and vectors of R^d with runtime dimension. Coordinates are in O(1)
// lattice units throughout, so absolute tolerances are meaningful.
using Vec = std::vector<double>;

// Absolute tolerance for geometric predicates on O(1) coordinates.
inline constexpr double kGeomTol = 1e-9;

// Tolerance for unit-vector checks.
inline constexpr double kUnitTol = 1e-12;

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double norm1(const Vec& a) {
  double s = 0.0;
  for (double x : a) s += std::abs(x);
  return s;
}

inline Vec add(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

// a + s*b
inline Vec axpy(const Vec& a, double s, const Vec& b) {
  assert(a.size() == b.size());
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

inline Vec normalized(const Vec& a) {
  double n = norm2(a);
  assert(n > 0.0);
  return scaled(a, 1.0 / n);
}

inline bool is_unit(const Vec& a, double tol = kUnitTol) {
  return std::abs(norm2(a) - 1.0) <= tol;
}

inline Vec unit_axis(int dim, int axis) {
  Vec e(dim, 0.0);
  e[axis] = 1.0;
  return e;
}

inline bool approx_eq(const Vec& a, const Vec& b, double tol = kGeomTol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace percoflow
