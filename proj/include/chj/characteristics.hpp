#pragma once

#include <vector>

#include "chj/action.hpp"
#include "chj/hamiltonian.hpp"

namespace chj {

/// Point on an orbit of the contact system: time stamp, position (mod 1),
/// value and momentum.
struct CharacteristicState {
  double t = 0.0;
  Vec x{0.0, 0.0};
  double u = 0.0;
  Vec p{0.0, 0.0};
};

struct FlowResult {
  std::vector<CharacteristicState> states;  // dense output at multiples of dt_ode
  bool blow_up = false;                     // ||p|| or |u| exceeded 1e6; partial orbit returned
};

/// Classical RK4 on dx = H_p, dp = -H_x - H_u p, du = p.H_p - H + c.
/// Negative t_span integrates backward in time. c_level = 0 is the unshifted flow.
FlowResult flow(const HamiltonianModel& model, const CharacteristicState& s0, double t_span,
                double dt_ode, double c_level);

/// Integrates the flow together with E(t) = int H_u ds and returns
/// max_t |(H(t)-c) - (H(0)-c) exp(-E(t))|.
double h_decay_check(const HamiltonianModel& model, const CharacteristicState& s0, double t_span,
                     double dt_ode, double c_level);

/// Lifts the terminal segment of the DP minimizer through x to (x,u,p),
/// integrates the contact system backward, and returns the sup of
/// d(x_DP, x_ODE) + |u_DP - u_ODE| over the trailing 80% of the curve.
double calibrated_cross_check(const HamiltonianModel& model, const ActionField& field, const Vec& x,
                              double dt_ode = 1e-3);

}  // namespace chj
