#pragma once

#include <array>
#include <cmath>

namespace chj {

/// Point / (co)vector on the flat torus [0,1)^dim, dim in {1,2}.
/// One-dimensional data lives in component 0; component 1 stays 0.
using Vec = std::array<double, 2>;

inline constexpr Vec vec1(double x) { return {x, 0.0}; }
inline constexpr Vec vec2(double x, double y) { return {x, y}; }

inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  return (r >= 1.0) ? r - 1.0 : r;
}

inline Vec wrap(Vec x, int dim) {
  for (int d = 0; d < dim; ++d) x[d] = wrap_unit(x[d]);
  return x;
}

/// Shortest representative of a scalar displacement in [-1/2, 1/2).
inline double min_image(double d) {
  d -= std::floor(d + 0.5);
  return d;
}

/// Shortest torus representative of a - b, componentwise in [-1/2, 1/2).
inline Vec displacement(const Vec& a, const Vec& b, int dim) {
  Vec d{0.0, 0.0};
  for (int k = 0; k < dim; ++k) d[k] = min_image(a[k] - b[k]);
  return d;
}

inline double dot(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += a[k] * b[k];
  return s;
}

inline double norm2(const Vec& a, int dim) { return dot(a, a, dim); }
inline double norm(const Vec& a, int dim) { return std::sqrt(norm2(a, dim)); }

inline double torus_dist(const Vec& a, const Vec& b, int dim) {
  return norm(displacement(a, b, dim), dim);
}

inline Vec add(Vec a, const Vec& b, int dim) {
  for (int k = 0; k < dim; ++k) a[k] += b[k];
  return a;
}

inline Vec scale(Vec a, double s, int dim) {
  for (int k = 0; k < dim; ++k) a[k] *= s;
  return a;
}

}  // namespace chj
