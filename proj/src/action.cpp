#include "chj/action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chj {

double wash_time(const TorusGrid& grid, double v_max) {
  return 0.5 * std::sqrt(double(grid.dim)) / v_max;
}

namespace {

struct NodeOffset {
  int di = 0, dj = 0;
  Vec v{0.0, 0.0};  // o*h/dt
};

std::vector<NodeOffset> node_offsets(const TorusGrid& grid, double dt, double v_max) {
  int reach = static_cast<int>(std::floor(v_max * dt / grid.h));
  require(reach >= 2, Errc::CFLViolated, "v_max*dt must reach at least 2h");
  std::vector<NodeOffset> out;
  if (grid.dim == 1) {
    for (int o = -reach; o <= reach; ++o)
      out.push_back({o, 0, vec1(o * grid.h / dt)});
    return out;
  }
  for (int oi = -reach; oi <= reach; ++oi)
    for (int oj = -reach; oj <= reach; ++oj) {
      Vec disp = vec2(oi * grid.h, oj * grid.h);
      if (norm(disp, 2) > v_max * dt) continue;
      out.push_back({oi, oj, scale(disp, 1.0 / dt, 2)});
    }
  return out;
}

ActionField build_field(const HamiltonianModel& model, const TorusGrid& grid, const Vec& x0,
                        double u0, double c, double dt, int n_steps, double v_max,
                        const ActionBuildOptions& opts, bool backward) {
  require(grid.dim == model.dim, Errc::GridMismatch, "grid and model dimension differ");
  require(dt > 0.0, Errc::ConfigError, "dt must be positive");
  require(dt * model.lambda_bound < 0.5, Errc::CFLViolated, "dt*lambda must be below 1/2");
  require(n_steps >= 0, Errc::ConfigError, "n_steps must be nonnegative");
  require(v_max * dt >= 2.0 * grid.h, Errc::CFLViolated, "v_max*dt must reach at least 2h");
  if (opts.check_wash && n_steps > 0)
    require(n_steps * dt >= wash_time(grid, v_max), Errc::PenaltyDominates,
            "field horizon below the seed wash-out time");

  ActionField f;
  f.grid = grid;
  f.x0 = wrap(x0, grid.dim);
  f.u0 = u0;
  f.c = c;
  f.dt = dt;
  f.v_max = v_max;
  f.penalty = opts.penalty_scale * (1.0 + std::abs(u0));
  f.seed_node = grid.nearest_node(f.x0);
  f.backward = backward;

  double off = backward ? -f.penalty : f.penalty;
  GridFunction seed = GridFunction::constant(grid, u0 + off);
  seed[f.seed_node] = u0;
  f.layers.push_back(seed);
  if (n_steps == 0) return f;

  std::vector<NodeOffset> offs = node_offsets(grid, dt, v_max);
  const int nn = grid.node_count();
  const int n = grid.n;
  std::vector<double> vals(offs.size());
  for (int k = 1; k <= n_steps; ++k) {
    const GridFunction& prev = f.layers.back();
    DiffOps dprev = diff_ops(prev);
    GridFunction cur(grid);
    std::vector<int> pred(static_cast<size_t>(nn), -1);
    for (int idx = 0; idx < nn; ++idx) {
      int i = grid.dim == 1 ? idx : idx / n;
      int j = grid.dim == 1 ? 0 : idx % n;
      Vec xi = grid.node(idx);
      double best = backward ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
      int best_src = -1;
      for (size_t oi = 0; oi < offs.size(); ++oi) {
        const NodeOffset& o = offs[oi];
        int src = grid.dim == 1 ? grid.index(i - o.di) : grid.index(i - o.di, j - o.dj);
        double u_prev = prev[src];
        double val;
        if (!backward) {
          // v = (x - y)/dt, L at the source point y
          Vec y = grid.node(src);
          val = u_prev + dt * (model.lagrangian(y, u_prev, o.v) + c);
        } else {
          // v = (y - x)/dt, L at the target point x
          Vec v = scale(o.v, -1.0, grid.dim);
          val = u_prev - dt * (model.lagrangian(xi, u_prev, v) + c);
        }
        vals[oi] = val;
        bool better = backward ? (val > best) : (val < best);
        if (better || (val == best && src < best_src)) {
          best = val;
          best_src = src;
        }
      }
      // Quantized velocities leave whole fans of sources within rounding of
      // the optimum; among those, keep the one the characteristic flow
      // predicts, so backtracked minimizers follow the lifted orbit.
      double tie = 1e-9 * (1.0 + std::abs(best));
      Vec p_loc = dprev.ctr_vec(idx);
      Vec v_pred = model.grad_H(xi, prev[idx], p_loc).dp;
      Vec y_pred = xi;
      double flip = backward ? 1.0 : -1.0;
      for (int d = 0; d < grid.dim; ++d) y_pred[d] = wrap_unit(y_pred[d] + flip * v_pred[d] * dt);
      double best_gap = std::numeric_limits<double>::infinity();
      for (size_t oi = 0; oi < offs.size(); ++oi) {
        if (std::abs(vals[oi] - best) > tie) continue;
        const NodeOffset& o = offs[oi];
        int src = grid.dim == 1 ? grid.index(i - o.di) : grid.index(i - o.di, j - o.dj);
        double gap = torus_dist(grid.node(src), y_pred, grid.dim);
        if (gap < best_gap - 1e-15 || (gap < best_gap + 1e-15 && src < best_src)) {
          best_gap = gap;
          best_src = src;
        }
      }
      cur[idx] = best;
      pred[static_cast<size_t>(idx)] = best_src;
    }
    f.layers.push_back(std::move(cur));
    f.pred.push_back(std::move(pred));
  }

  if (opts.check_wash) {
    const GridFunction& last = f.layers.back();
    double spread = last.max() - last.min();
    require(spread <= 0.5 * f.penalty, Errc::PenaltyDominates,
            "final layer still dominated by the seed penalty");
  }
  return f;
}

}  // namespace

ActionField forward_action(const HamiltonianModel& model, const TorusGrid& grid, const Vec& x0,
                           double u0, double c, double dt, int n_steps, double v_max,
                           const ActionBuildOptions& opts) {
  return build_field(model, grid, x0, u0, c, dt, n_steps, v_max, opts, false);
}

ActionField backward_action(const HamiltonianModel& model, const TorusGrid& grid, const Vec& x0,
                            double u0, double c, double dt, int n_steps, double v_max,
                            const ActionBuildOptions& opts) {
  return build_field(model, grid, x0, u0, c, dt, n_steps, v_max, opts, true);
}

std::vector<CurvePoint> backtrack_minimizer(const ActionField& field, const Vec& x) {
  require(field.n_steps() >= 1, Errc::ConfigError, "backtracking needs at least one layer");
  int node = field.grid.nearest_node(wrap(x, field.grid.dim));
  int n_steps = field.n_steps();
  // chain[k] = node index at layer k
  std::vector<int> chain(static_cast<size_t>(n_steps) + 1, -1);
  chain[static_cast<size_t>(n_steps)] = node;
  for (int k = n_steps; k >= 1; --k) {
    int src = field.pred[static_cast<size_t>(k - 1)][static_cast<size_t>(chain[static_cast<size_t>(k)])];
    require(src >= 0, Errc::BrokenChain, "missing predecessor link");
    chain[static_cast<size_t>(k - 1)] = src;
  }
  std::vector<CurvePoint> out;
  out.reserve(chain.size());
  for (int k = 0; k <= n_steps; ++k) {
    CurvePoint p;
    // layer index k is time k*dt for the forward field and remaining time
    // k*dt for the backward one; both emit the curve in increasing time.
    p.t = field.backward ? (n_steps - k) * field.dt : k * field.dt;
    p.x = field.grid.node(chain[static_cast<size_t>(k)]);
    p.u = field.layer(k)[chain[static_cast<size_t>(k)]];
    out.push_back(p);
  }
  if (field.backward) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace chj
