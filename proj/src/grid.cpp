#include "chj/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chj {

int TorusGrid::nearest_node(const Vec& x) const {
  int i = static_cast<int>(std::lround(wrap_unit(x[0]) / h)) % n;
  if (dim == 1) return index(i);
  int j = static_cast<int>(std::lround(wrap_unit(x[1]) / h)) % n;
  return index(i, j);
}

GridFunction GridFunction::sample(const TorusGrid& g, const std::function<double(const Vec&)>& f) {
  GridFunction out(g);
  for (int i = 0; i < out.size(); ++i) out[i] = f(g.node(i));
  return out;
}

double GridFunction::min() const { return *std::min_element(values.begin(), values.end()); }
double GridFunction::max() const { return *std::max_element(values.begin(), values.end()); }

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double interpolate(const GridFunction& f, const Vec& x) {
  const TorusGrid& g = f.grid;
  double a = wrap_unit(x[0]) / g.h;
  int i0 = static_cast<int>(std::floor(a));
  double s = a - i0;
  i0 %= g.n;
  if (g.dim == 1) {
    int i1 = (i0 + 1) % g.n;
    return (1.0 - s) * f[i0] + s * f[i1];
  }
  double b = wrap_unit(x[1]) / g.h;
  int j0 = static_cast<int>(std::floor(b));
  double t = b - j0;
  j0 %= g.n;
  int i1 = (i0 + 1) % g.n;
  int j1 = (j0 + 1) % g.n;
  double v00 = f[g.index(i0, j0)], v01 = f[g.index(i0, j1)];
  double v10 = f[g.index(i1, j0)], v11 = f[g.index(i1, j1)];
  return (1.0 - s) * ((1.0 - t) * v00 + t * v01) + s * ((1.0 - t) * v10 + t * v11);
}

DiffOps diff_ops(const GridFunction& f) {
  const TorusGrid& g = f.grid;
  int nn = g.node_count();
  DiffOps out;
  out.dim = g.dim;
  out.forward.assign(static_cast<size_t>(nn) * g.dim, 0.0);
  out.backward.assign(static_cast<size_t>(nn) * g.dim, 0.0);
  out.centered.assign(static_cast<size_t>(nn) * g.dim, 0.0);
  double inv_h = 1.0 / g.h;
  if (g.dim == 1) {
    for (int i = 0; i < nn; ++i) {
      double up = f[(i + 1) % g.n], dn = f[(i - 1 + g.n) % g.n];
      out.forward[i] = (up - f[i]) * inv_h;
      out.backward[i] = (f[i] - dn) * inv_h;
      out.centered[i] = (up - dn) * 0.5 * inv_h;
    }
    return out;
  }
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      int idx = g.index(i, j);
      double c = f[idx];
      double xu = f[g.index(i + 1, j)], xd = f[g.index(i - 1, j)];
      double yu = f[g.index(i, j + 1)], yd = f[g.index(i, j - 1)];
      size_t base = static_cast<size_t>(idx) * 2;
      out.forward[base] = (xu - c) * inv_h;
      out.backward[base] = (c - xd) * inv_h;
      out.centered[base] = (xu - xd) * 0.5 * inv_h;
      out.forward[base + 1] = (yu - c) * inv_h;
      out.backward[base + 1] = (c - yd) * inv_h;
      out.centered[base + 1] = (yu - yd) * 0.5 * inv_h;
    }
  }
  return out;
}

SupMetrics sup_metrics(const GridFunction& f, const GridFunction& g) {
  require(f.grid == g.grid, Errc::GridMismatch, "sup_metrics needs matching grids");
  SupMetrics m;
  m.min_diff = std::numeric_limits<double>::infinity();
  m.max_diff = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < f.size(); ++i) {
    double d = f[i] - g[i];
    m.min_diff = std::min(m.min_diff, d);
    m.max_diff = std::max(m.max_diff, d);
  }
  m.sup_norm_diff = std::max(std::abs(m.min_diff), std::abs(m.max_diff));
  return m;
}

}  // namespace chj
