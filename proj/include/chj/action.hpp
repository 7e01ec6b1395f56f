#pragma once

#include <vector>

#include "chj/grid.hpp"
#include "chj/hamiltonian.hpp"

namespace chj {

struct ActionBuildOptions {
  double penalty_scale = 50.0;
  // Queries are only trusted once every node is reachable from the seed;
  // building a shorter field throws PenaltyDominates unless this is off.
  bool check_wash = true;
};

/// Discrete implicit action function h (forward) or h^ (backward) built by
/// dynamic programming from a penalized point seed at (x0, u0), with
/// predecessor links for minimizer backtracking. Immutable after build.
struct ActionField {
  TorusGrid grid;
  Vec x0{0.0, 0.0};
  double u0 = 0.0;
  double c = 0.0;
  double dt = 0.0;
  double v_max = 0.0;
  double penalty = 0.0;
  int seed_node = 0;
  bool backward = false;
  std::vector<GridFunction> layers;        // layers[k] ~ value at time k*dt
  std::vector<std::vector<int>> pred;      // pred[k][i], k >= 1: argmin/argmax source node

  int n_steps() const { return static_cast<int>(layers.size()) - 1; }
  double time() const { return n_steps() * dt; }
  const GridFunction& layer(int k) const { return layers[static_cast<size_t>(k)]; }
  double value_at(int k, const Vec& x) const { return interpolate(layer(k), x); }
};

/// Time needed for the seed information to cross the torus at speed v_max.
double wash_time(const TorusGrid& grid, double v_max);

ActionField forward_action(const HamiltonianModel& model, const TorusGrid& grid, const Vec& x0,
                           double u0, double c, double dt, int n_steps, double v_max,
                           const ActionBuildOptions& opts = {});

ActionField backward_action(const HamiltonianModel& model, const TorusGrid& grid, const Vec& x0,
                            double u0, double c, double dt, int n_steps, double v_max,
                            const ActionBuildOptions& opts = {});

struct CurvePoint {
  double t = 0.0;
  Vec x{0.0, 0.0};
  double u = 0.0;
};

/// Follows predecessor links from x at the final layer back to the seed.
/// Points come out in increasing time; front is the seed, back is x.
std::vector<CurvePoint> backtrack_minimizer(const ActionField& field, const Vec& x);

}  // namespace chj
