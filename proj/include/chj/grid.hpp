#pragma once

#include <functional>
#include <vector>

#include "chj/errors.hpp"
#include "chj/torus.hpp"

namespace chj {

/// Uniform periodic grid on [0,1)^dim. Node i sits at i*h, indices wrap mod n.
struct TorusGrid {
  int dim = 1;
  int n = 8;
  double h = 1.0 / 8.0;

  TorusGrid() = default;
  TorusGrid(int dim_, int n_per_dim) : dim(dim_), n(n_per_dim), h(1.0 / n_per_dim) {
    require(dim == 1 || dim == 2, Errc::ConfigError, "grid dim must be 1 or 2");
    require(n >= 8, Errc::ConfigError, "n_per_dim must be >= 8");
  }

  int node_count() const { return dim == 1 ? n : n * n; }

  int index(int i, int j = 0) const {
    i = ((i % n) + n) % n;
    if (dim == 1) return i;
    j = ((j % n) + n) % n;
    return i * n + j;
  }

  Vec node(int idx) const {
    if (dim == 1) return vec1(idx * h);
    return vec2((idx / n) * h, (idx % n) * h);
  }

  /// Grid index of the node nearest to x.
  int nearest_node(const Vec& x) const;

  bool operator==(const TorusGrid& o) const { return dim == o.dim && n == o.n; }
};

/// Real-valued samples on a TorusGrid (houses initial data and evolving profiles).
struct GridFunction {
  TorusGrid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const TorusGrid& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.node_count()), fill) {}

  static GridFunction constant(const TorusGrid& g, double v) { return GridFunction(g, v); }
  static GridFunction sample(const TorusGrid& g, const std::function<double(const Vec&)>& f);

  double& operator[](int i) { return values[static_cast<size_t>(i)]; }
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
  int size() const { return static_cast<int>(values.size()); }

  double min() const;
  double max() const;
  double sup_norm() const;
  bool all_finite() const;
};

/// Periodic multilinear interpolation; exact at nodes.
double interpolate(const GridFunction& f, const Vec& x);

/// Forward, backward and centered periodic differences, per node per dimension.
struct DiffOps {
  int dim = 1;
  std::vector<double> forward;   // node-major, dim-strided
  std::vector<double> backward;
  std::vector<double> centered;

  double fwd(int node, int d) const { return forward[static_cast<size_t>(node) * dim + d]; }
  double bwd(int node, int d) const { return backward[static_cast<size_t>(node) * dim + d]; }
  double ctr(int node, int d) const { return centered[static_cast<size_t>(node) * dim + d]; }

  Vec fwd_vec(int node) const {
    return dim == 1 ? vec1(fwd(node, 0)) : vec2(fwd(node, 0), fwd(node, 1));
  }
  Vec bwd_vec(int node) const {
    return dim == 1 ? vec1(bwd(node, 0)) : vec2(bwd(node, 0), bwd(node, 1));
  }
  Vec ctr_vec(int node) const {
    return dim == 1 ? vec1(ctr(node, 0)) : vec2(ctr(node, 0), ctr(node, 1));
  }
};

DiffOps diff_ops(const GridFunction& f);

struct SupMetrics {
  double sup_norm_diff = 0.0;
  double min_diff = 0.0;
  double max_diff = 0.0;
};

/// Exact pointwise extrema of f - g. Throws GridMismatch on different grids.
SupMetrics sup_metrics(const GridFunction& f, const GridFunction& g);

}  // namespace chj
